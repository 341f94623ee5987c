"""The random-coding union bound for learned codes, and the rate it achieves.

A code of blocklength ``n`` is built from ``L = n // n0`` independent
sub-blocks of length ``n0``, each with its own mini-codebook of
``M0 = ceil(2 ** (n R / L))`` words. The error of the learned code is then
bounded by::

    E[min(1, L (M0**L - 1) 2**-i(X^n0, Y^n0))] + kappa(n0)

where ``i`` is the information density of the estimated channel and
``kappa`` the total variation penalty of :mod:`fblearn.learning`. The bound
is minimized over ``n0``.

"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng
from .channel import info_density_table, output_marginal
from .config import config
from .density import ConvolutionLadder, expect_min_one, letter_pmf
from .exceptions import (AtomBudgetExceeded, InvalidDelta, InvalidEpsilon,
    InvalidN0, ParameterError)
from .learning import kl_concentration_bound, penalty
from .parallel import pmap


log = logging.getLogger('fblearn')

_LN2 = math.log(2)

#: Largest number of letters drawn at once by the Monte Carlo estimator.
MC_BLOCK_LETTERS = 1 << 22


@dataclass(frozen=True)
class BoundParams(object):

    """Code parameters.

    :param int n: Blocklength.
    :param float rate: Bits per channel use; ``M = 2 ** (n rate)``.
    :param float epsilon: Target error probability.
    :param float delta: Allowed probability of a bad training set.
    :param m: Training size, or ``None`` when the channel is known exactly.
    :param n0: Sub-blocklength to use instead of scanning for the best one.

    """

    n: int
    rate: float
    epsilon: float
    delta: float
    m: Optional[int] = None
    n0: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError('blocklength must be at least 1; got %r' % self.n)
        if not self.rate >= 0:
            raise ParameterError('rate must be nonnegative; got %r' % self.rate)
        if not 0 < self.epsilon < 1:
            raise InvalidEpsilon('epsilon must be in (0, 1); got %r' % self.epsilon)
        if not 0 < self.delta <= 1:
            raise InvalidDelta('delta must be in (0, 1]; got %r' % self.delta)
        if self.m is not None and self.m < 1:
            raise ParameterError('training size must be at least 1; got %r' % self.m)
        if self.n0 is not None and not 1 <= self.n0 <= self.n:
            raise InvalidN0('n0 must be in [1, %d]; got %r' % (self.n, self.n0))

    @classmethod
    def from_code_size(cls, code_size, n, epsilon, delta, m=None, n0=None):
        return cls(n, math.log2(code_size) / n, epsilon, delta, m, n0)

    @property
    def log2_code_size(self):
        return self.n * self.rate


@dataclass(frozen=True)
class AchievabilityResult(object):

    error_upper_bound: float
    best_n0: int
    first_term: float
    penalty_term: float
    method: str
    mc_std_error: Optional[float] = None
    raw_total: float = 0.0


def rcu_multiplier_log2(n, rate, n0):
    """``log2(L (ceil(2 ** (n rate / L)) ** L - 1))`` with ``L = n // n0``.

    Exact while ``M0`` fits in a double; beyond that the ``-1`` is dropped,
    which can only raise the bound.

    """
    if not 1 <= n0 <= n:
        raise InvalidN0('n0 must be in [1, %d]; got %r' % (n, n0))
    if rate <= 0:
        return -math.inf
    l_factor = n // n0
    x = n * rate / l_factor
    if x <= 52:
        m0 = int(math.ceil(2.0 ** x))
        # Same sizing as the simulator: 2 ** x can land a hair above an integer.
        if m0 > 1 and l_factor * math.log2(m0 - 1) >= n * rate - 1e-12:
            m0 -= 1
        total = m0 ** l_factor - 1
        if not total:
            return -math.inf
        return math.log2(l_factor) + math.log2(total)
    log2_m0 = x + math.log1p(2.0 ** -x) / _LN2
    return math.log2(l_factor) + l_factor * log2_m0


def _draw_sums(joint_cdf, values, n0, seed, block, rows):
    gen = rng.generator(seed, rng.MONTE_CARLO, block)
    idx = rng.categorical(gen, joint_cdf, (rows, n0))
    return values[idx].sum(axis=1)


def _sample_density_sums(w_hat, px, n0, samples, seed):
    """``samples`` draws of ``i(X^n0, Y^n0)`` under ``px W``."""
    table = info_density_table(px, w_hat)
    joint = table.joint.ravel()
    values = table.values.filled(0.0).ravel()
    cdf = np.cumsum(joint)
    rows = max(1, MC_BLOCK_LETTERS // n0)
    parts = pmap(lambda bc: _draw_sums(cdf, values, n0, seed, bc[0], bc[1]),
        rng.blocks(int(samples), rows))
    return np.concatenate(parts)


def _mc_term(sums, log_a):
    terms = np.exp2(np.minimum(0.0, log_a - sums))
    mean = float(terms.mean())
    std = float(terms.std(ddof=1) / math.sqrt(terms.size)) if terms.size > 1 else 0.0
    return mean, std


def monte_carlo_rcu_term(w_hat, px, n0, log_a, samples=None, seed=0):
    """Estimate ``E[min(1, 2 ** (log_a - i(X^n0, Y^n0)))]`` by sampling.

    :returns: ``(mean, std_error)``.

    """
    samples = samples or config.mc_samples
    if log_a == -math.inf:
        return 0.0, 0.0
    return _mc_term(_sample_density_sums(w_hat, px, n0, samples, seed), log_a)


class _DensitySum(object):

    """The law of ``i(X^n0, Y^n0)``, exact when it fits and sampled otherwise."""

    def __init__(self, ladder, w_hat, px, n0, seed=0, samples=None):
        self.n0 = n0
        self.pmf = None
        self.sums = None
        try:
            self.pmf = ladder.power(n0)
        except AtomBudgetExceeded as e:
            log.warning('%s; sampling n0=%d by Monte Carlo instead' % (e, n0))
            self.sums = _sample_density_sums(w_hat, px, n0, samples or config.mc_samples,
                rng.derive_seed(seed, n0))

    @property
    def method(self):
        return 'exact' if self.pmf is not None else 'monte_carlo'

    @property
    def max_value(self):
        if self.pmf is not None:
            return float(self.pmf.values[-1])
        return float(self.sums.max())

    def term(self, log_a):
        """``(value, std_error)``; the error is ``None`` for exact values."""
        if log_a == -math.inf:
            return 0.0, (None if self.pmf is not None else 0.0)
        if self.pmf is not None:
            return expect_min_one(self.pmf, log_a), None
        return _mc_term(self.sums, log_a)


def _ladder(w_hat, px, atom_cap=None):
    qy = output_marginal(px, w_hat)
    return ConvolutionLadder(letter_pmf(w_hat, px, qy), atom_cap)


def rcu_learning_term(w_hat, px, p, n0, seed=0, atom_cap=None):
    """First term of the bound at sub-blocklength ``n0``."""
    log_a = rcu_multiplier_log2(p.n, p.rate, n0)
    value, _ = _DensitySum(_ladder(w_hat, px, atom_cap), w_hat, px, n0, seed).term(log_a)
    return value


def candidate_n0s(n, epsilon, m=None, cardinality=1, delta=0.5):
    """Sub-blocklengths to try for a blocklength of ``n``.

    Every ``n0`` up to ``config.n0_full_scan``; above it, a geometric grid, ``n``
    itself, and the largest ``n0`` whose penalty stays within ``epsilon``. Above
    the full scan this is a subset of every ``n0`` with a penalty within
    ``epsilon``, so the minimum over it is still a valid bound, if possibly a
    looser one.

    """
    if n <= config.n0_full_scan:
        return list(range(1, n + 1))
    grid = set(int(round(v)) for v in np.geomspace(1, n, config.n0_grid_points))
    grid.add(n)
    if m is not None:
        bound = kl_concentration_bound(m, cardinality, delta)
        largest = int(math.floor(-math.log1p(-epsilon ** 2) / bound))
        if 1 <= largest <= n:
            grid.add(largest)
    return sorted(g for g in grid if 1 <= g <= n)


def _scan(p, w_hat):
    if p.n0 is not None:
        return [p.n0]
    return candidate_n0s(p.n, p.epsilon, p.m, w_hat.alphabet_product, p.delta)


def rcu_learning_bound(w_hat, px, p, seed=0, atom_cap=None):
    """Minimize the bound over the candidate sub-blocklengths.

    Ties go to the smallest ``n0``.

    """

    ladder = _ladder(w_hat, px, atom_cap)
    cardinality = w_hat.alphabet_product

    def evaluate(n0):
        first, std = _DensitySum(ladder, w_hat, px, n0, seed).term(
            rcu_multiplier_log2(p.n, p.rate, n0))
        pen = penalty(p.m, cardinality, p.delta, n0)
        raw = first + pen
        method = 'exact' if std is None else 'monte_carlo'
        return AchievabilityResult(min(1.0, max(0.0, raw)), n0, first, pen, method, std, raw)

    results = pmap(evaluate, _scan(p, w_hat))
    best = results[0]
    for res in results[1:]:
        if res.error_upper_bound < best.error_upper_bound:
            best = res

    log.info('rcu_learning_bound(n=%d, R=%.6f, m=%s) -> %.6g at n0=%d (%s)' % (
        p.n, p.rate, p.m, best.error_upper_bound, best.best_n0, best.method))
    return best


def _max_rate_at(density, n, n0, epsilon, pen, tol):

    if pen > epsilon:
        return 0.0

    def ok(rate):
        first, _ = density.term(rcu_multiplier_log2(n, rate, n0))
        return first + pen <= epsilon

    # At a rate of max_value the multiplier covers every sum, and the term is one.
    lo, hi = 0.0, max(density.max_value, tol)
    if ok(hi):
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_rate_achievable(w_hat, px, n, m, epsilon, delta, n0=None, tol=None,
    seed=0, atom_cap=None):
    """Largest rate whose bound is at most ``epsilon``; ``0`` if none is.

    Each candidate ``n0`` is bisected on its own and the best rate wins;
    the first term only grows with the rate, so this is the rate at which the
    minimum over ``n0`` crosses ``epsilon``.

    """

    tol = tol or config.rate_tol
    p = BoundParams(n, 0.0, epsilon, delta, m, n0)
    ladder = _ladder(w_hat, px, atom_cap)
    cardinality = w_hat.alphabet_product

    def best_at(n0):
        pen = penalty(m, cardinality, delta, n0)
        if pen > epsilon:
            return 0.0
        density = _DensitySum(ladder, w_hat, px, n0, seed)
        return _max_rate_at(density, n, n0, epsilon, pen, tol)

    candidates = _scan(p, w_hat)
    rates = pmap(best_at, candidates)
    best = int(np.argmax(rates))
    log.info('max_rate_achievable(n=%d, eps=%g, m=%s) -> %.6f at n0=%d' % (
        n, epsilon, m, rates[best], candidates[best]))
    return float(rates[best])
