"""The metaconverse for learned codes.

Any code of size ``M`` learned from ``m`` samples has::

    log2 M <= -log2 beta_alpha(W^n x P, Q^n x P),    alpha = 1 - epsilon - kappa

for every input law ``P``, with ``kappa`` the penalty at ``n0 = n``. For a
product ``Q`` the supremum over ``P`` is reached by a single input string,
and beta only depends on that string through its composition. Inputs whose
per-letter log-likelihood laws coincide are pooled into classes, so the scan
runs over class compositions.

"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.special import comb

from .capacity import blahut_arimoto
from .channel import Dist
from .config import config
from .density import ConvolutionLadder, convolve, letter_pmf, np_beta
from .exceptions import InvalidAlpha, InvalidDelta, InvalidEpsilon, ParameterError
from .learning import penalty
from .parallel import pmap


log = logging.getLogger('fblearn')

#: log2 beta values closer than this count as a tie.
TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ConverseResult(object):

    log2_m_upper: float
    alpha_used: float
    kappa: float
    best_composition: Tuple[int, ...]
    vacuous: bool
    heuristic: bool = False
    n: int = 0
    rate_upper: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'rate_upper', self.log2_m_upper / self.n if self.n else math.inf)


def _input_classes(w_hat, qy):
    """Group inputs with identical per-letter log-likelihood laws.

    :returns: ``[(members, pmf), ...]`` ordered by the first member.

    """
    classes = []
    for x in range(w_hat.num_inputs):
        pmf = letter_pmf(w_hat, Dist.point(x, w_hat.num_inputs), qy)
        for members, other in classes:
            if (len(other) == len(pmf) and
                np.allclose(other.values, pmf.values, rtol=0, atol=TIE_TOLERANCE) and
                np.allclose(other.p, pmf.p, rtol=0, atol=TIE_TOLERANCE)):
                members.append(x)
                break
        else:
            classes.append(([x], pmf))
    return classes


def _compositions(n, k):
    """Every ``k``-tuple of nonnegative integers summing to ``n``, lexicographically."""
    if k == 1:
        yield (n, )
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first, ) + rest


def _spread(class_counts, classes, num_inputs):
    """Per-input counts; each class's count sits on its highest member."""
    counts = [0] * num_inputs
    for count, (members, _) in zip(class_counts, classes):
        counts[members[-1]] = count
    return tuple(counts)


class _BetaOracle(object):

    def __init__(self, classes, alpha, atom_cap=None):
        self.ladders = [ConvolutionLadder(pmf, atom_cap) for _, pmf in classes]
        self.alpha = alpha
        self.atom_cap = atom_cap
        self.cache = {}

    def __call__(self, class_counts):
        try:
            return self.cache[class_counts]
        except KeyError:
            pass
        pmf = None
        for ladder, count in zip(self.ladders, class_counts):
            if count:
                power = ladder.power(count)
                pmf = power if pmf is None else convolve(pmf, power, self.atom_cap)
        res = np_beta(pmf, self.alpha)
        self.cache[class_counts] = res
        return res


def _pick(scored, key):
    """Lowest log2 beta; ties go to the smallest ``key(composition)``."""
    best = min(r.log2_beta for _, r in scored)
    tol = TIE_TOLERANCE * max(1.0, abs(best)) if math.isfinite(best) else 0.0
    tied = [(c, r) for c, r in scored if r.log2_beta <= best + tol or r.log2_beta == best]
    return min(tied, key=lambda cr: key(cr[0]))


def _start(w_hat, classes, n):
    """The composition nearest to a capacity-achieving input, by largest remainder."""
    _, caid, _ = blahut_arimoto(w_hat)
    mass = np.array([caid.mass[members].sum() for members, _ in classes])
    raw = mass * n
    counts = np.floor(raw).astype(int)
    for i in np.argsort(-(raw - counts), kind='stable')[:n - counts.sum()]:
        counts[i] += 1
    return tuple(int(c) for c in counts)


def _hill_climb(oracle, start, n, key):
    current = start
    current_beta = oracle(current)
    step = max(1, n // 8)
    k = len(start)
    while True:
        neighbours = []
        for i, j in itertools.permutations(range(k), 2):
            if current[i] >= step:
                c = list(current)
                c[i] -= step
                c[j] += step
                neighbours.append(tuple(c))
        scored = list(zip(neighbours, pmap(oracle, neighbours)))
        if scored:
            cand, res = _pick(scored, key)
            if res.log2_beta < current_beta.log2_beta - TIE_TOLERANCE:
                current, current_beta = cand, res
                continue
        if step == 1:
            return current, current_beta
        step //= 2


def composition_search(w_hat, qy, n, alpha, atom_cap=None):
    """The input composition minimizing beta.

    Exact when the inputs fall into at most two classes or there are few
    enough class compositions to scan; otherwise a hill climb from the
    capacity-achieving composition.

    :returns: ``(best_composition, beta_result, heuristic)``; the composition
        counts every input.

    """

    if not 0 < alpha <= 1:
        raise InvalidAlpha('alpha must be in (0, 1]; got %r' % alpha)
    if n < 1:
        raise ParameterError('blocklength must be at least 1; got %r' % n)

    classes = _input_classes(w_hat, qy)
    oracle = _BetaOracle(classes, alpha, atom_cap)
    k = len(classes)
    key = lambda c: _spread(c, classes, w_hat.num_inputs)

    if k <= 2 or comb(n + k - 1, k - 1, exact=True) <= config.composition_scan_limit:
        candidates = list(_compositions(n, k))
        comp, res = _pick(list(zip(candidates, pmap(oracle, candidates))), key)
        heuristic = False
    else:
        log.warning('%d input classes at n=%d; composition search is heuristic' % (k, n))
        comp, res = _hill_climb(oracle, _start(w_hat, classes, n), n, key)
        heuristic = True

    return _spread(comp, classes, w_hat.num_inputs), res, heuristic


def converse_bound(w_hat, n, epsilon, m, delta, qy=None, atom_cap=None):
    """Upper bound on ``log2 M`` for a learned code; ``+inf`` when vacuous.

    :param m: Training size, or ``None`` for a known channel.
    :param qy: Auxiliary output law; the caod of ``w_hat`` by default.

    """

    if not 0 < epsilon < 1:
        raise InvalidEpsilon('epsilon must be in (0, 1); got %r' % epsilon)
    if not 0 < delta < 1:
        raise InvalidDelta('delta must be in (0, 1); got %r' % delta)

    kappa = penalty(m, w_hat.alphabet_product, delta, n)
    alpha = max(0.0, 1.0 - epsilon - kappa)
    if alpha <= 0:
        log.info('converse_bound(n=%d, eps=%g, m=%s) is vacuous; kappa=%.6g' % (n, epsilon, m, kappa))
        return ConverseResult(math.inf, 0.0, kappa, (), True, False, n)

    if qy is None:
        _, _, qy = blahut_arimoto(w_hat)

    comp, beta, heuristic = composition_search(w_hat, qy, n, alpha, atom_cap)
    result = ConverseResult(-beta.log2_beta, alpha, kappa, comp, False, heuristic, n)
    log.info('converse_bound(n=%d, eps=%g, m=%s) -> log2 M <= %.6f (rate %.6f)' % (
        n, epsilon, m, result.log2_m_upper, result.rate_upper))
    return result
