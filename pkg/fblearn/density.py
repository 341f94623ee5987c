"""Exact distributions of sums of per-letter log-likelihoods.

A :class:`SparsePmf` is a finite set of real-valued atoms carrying mass under
two measures at once, ``P`` and ``Q``. Summing ``n`` i.i.d. letters is an
``n``-fold convolution, done by repeated doubling, and both the RCU
expectation and the Neyman-Pearson beta are functionals of the result.

"""

import logging
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .channel import _check_input
from .config import config
from .exceptions import (AtomBudgetExceeded, DimensionMismatch, InvalidAlpha,
    ParameterError, SupportViolation)


log = logging.getLogger('fblearn')


#: Values closer than this (relative, then absolute) are merged into one atom.
RELATIVE_GROUPING = 1e-11
ABSOLUTE_GROUPING = 1e-13

_LN2 = math.log(2)


def _group(values, p, q):
    """Sort atoms by value and merge runs within the grouping tolerance."""

    order = np.argsort(values, kind='stable')
    values = values[order]
    p = p[order]
    q = q[order]

    if values.size > 1:
        tol = np.maximum(ABSOLUTE_GROUPING, RELATIVE_GROUPING * np.abs(values[1:]))
        starts = np.concatenate(([0], np.flatnonzero(np.diff(values) > tol) + 1))
        if starts.size < values.size:
            values = values[starts]
            p = np.add.reduceat(p, starts)
            q = np.add.reduceat(q, starts)

    return values, p, q


class SparsePmf(object):

    """Atoms ``(value, p_mass, q_mass)`` with strictly increasing values.

    :param values: Atom values in bits; any order, merged on construction.
    :param p: Masses under ``P``; must be complete (sum to one).
    :param q: Masses under ``Q``; only on the atoms listed.
    :param bool llr: The values are ``log2(dP/dQ)``, so that every atom has
        ``q = p * 2**-value``. :func:`np_beta` then works in the log domain,
        which stays exact long after ``q`` underflows.

    """

    def __init__(self, values, p, q, llr=False, grouped=False):
        values = np.asarray(values, dtype=float)
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        if not (values.ndim == p.ndim == q.ndim == 1) or not (values.shape == p.shape == q.shape):
            raise DimensionMismatch('atom values and masses must be vectors of equal length')
        if not values.size:
            raise ParameterError('a pmf needs at least one atom')
        if not grouped:
            values, p, q = _group(values, p, q)
        for a in (values, p, q):
            a.flags.writeable = False
        self.values = values
        self.p = p
        self.q = q
        self.llr = bool(llr)

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return 'SparsePmf(%d atoms, P=%.6g, Q=%.6g)' % (len(self), self.p.sum(), self.q.sum())

    @property
    def atoms(self):
        return list(zip(self.values.tolist(), self.p.tolist(), self.q.tolist()))

    def mean(self):
        return float(np.dot(self.p, self.values))

    def variance(self):
        mu = self.mean()
        return float(np.dot(self.p, (self.values - mu) ** 2))


@dataclass(frozen=True)
class BetaResult(object):

    beta: float
    threshold: float
    randomization: float
    log2_beta: float


def letter_pmf(w, px, qy):
    """The pmf of ``log2(W(y|x) / qy(y))`` with ``P = px W`` and ``Q = px qy``.

    Only pairs with ``px(x) W(y|x) > 0`` become atoms, so ``P`` is complete and
    ``Q`` is the mass ``px qy`` puts on those pairs.

    """
    _check_input(px, w)
    if len(qy) != w.num_outputs:
        raise DimensionMismatch('output distribution has %d entries; channel has %d outputs' % (
            len(qy), w.num_outputs))

    live = (px.mass[:, None] > 0) & (w.transition > 0)
    starved = live & (qy.mass[None, :] == 0)
    if np.any(starved):
        x, y = np.argwhere(starved)[0]
        raise SupportViolation('qy(%d) = 0 but W(%d|%d) > 0' % (y, y, x))

    xs, ys = np.nonzero(live)
    wv = w.transition[xs, ys]
    values = np.log2(wv) - np.log2(qy.mass[ys])
    return SparsePmf(values, px.mass[xs] * wv, px.mass[xs] * qy.mass[ys], llr=True)


def convolve(a, b, atom_cap=None):
    """The pmf of the sum of independent draws from ``a`` and ``b``, under both measures."""

    atom_cap = atom_cap or config.atom_cap
    pairs = len(a) * len(b)
    if pairs > atom_cap:
        raise AtomBudgetExceeded('convolution of %d x %d atoms exceeds the cap of %d' % (
            len(a), len(b), atom_cap))

    values = np.add.outer(a.values, b.values).ravel()
    p = np.multiply.outer(a.p, b.p).ravel()
    q = np.multiply.outer(a.q, b.q).ravel()
    return SparsePmf(values, p, q, llr=a.llr and b.llr)


class ConvolutionLadder(object):

    """Powers ``pmf**n`` by repeated doubling, sharing the doublings between calls.

    Terms combine in increasing order of their binary digit, so results do not
    depend on which powers were asked for first.

    """

    def __init__(self, pmf, atom_cap=None):
        self.atom_cap = atom_cap
        self._doublings = [pmf]
        self._lock = threading.Lock()

    @property
    def base(self):
        return self._doublings[0]

    def _doubling(self, k):
        with self._lock:
            while len(self._doublings) <= k:
                last = self._doublings[-1]
                self._doublings.append(convolve(last, last, self.atom_cap))
            return self._doublings[k]

    def power(self, n):
        if n < 1:
            raise ParameterError('convolution power must be at least 1; got %r' % n)
        result = None
        k = 0
        while n:
            if n & 1:
                step = self._doubling(k)
                result = step if result is None else convolve(result, step, self.atom_cap)
            n >>= 1
            k += 1
        return result


def self_convolve(pmf, n, atom_cap=None):
    """The pmf of the sum of ``n`` i.i.d. draws from ``pmf``."""
    return ConvolutionLadder(pmf, atom_cap).power(n)


def expect_min_one(pmf, log_a):
    """``E_P[min(1, 2**(log_a - S))]``."""
    if math.isnan(log_a):
        raise ParameterError('log_a is NaN')
    terms = np.exp2(np.minimum(0.0, log_a - pmf.values))
    return min(1.0, max(0.0, float(np.dot(pmf.p, terms))))


def np_beta(pmf, alpha):
    """The smallest ``Q`` acceptance of any test accepting with ``P`` probability ``alpha``.

    ``pmf`` holds the log-likelihood ratio ``log2(dP/dQ)``. The optimal test
    accepts every atom above ``threshold`` and the threshold atom itself with
    probability ``randomization``.

    """

    if not 0 <= alpha <= 1:
        raise InvalidAlpha('alpha must be in [0, 1]; got %r' % alpha)
    if alpha == 0:
        return BetaResult(0.0, math.inf, 0.0, -math.inf)

    values = pmf.values[::-1]
    p = pmf.p[::-1]
    accepted = np.cumsum(p)

    k = min(int(np.searchsorted(accepted, alpha, side='left')), values.size - 1)
    before = accepted[k - 1] if k else 0.0
    r = (alpha - before) / p[k] if p[k] > 0 else 1.0
    r = min(1.0, max(0.0, r))

    if pmf.llr:
        with np.errstate(divide='ignore'):
            log_q = np.log(p[:k + 1]) - values[:k + 1] * _LN2
    else:
        with np.errstate(divide='ignore'):
            log_q = np.log(pmf.q[::-1][:k + 1])

    terms = list(log_q[:k])
    if r > 0:
        terms.append(log_q[k] + math.log(r))
    if terms and np.isfinite(np.max(terms)):
        log2_beta = float(logsumexp(terms)) / _LN2
    else:
        log2_beta = -math.inf

    beta = min(1.0, 2.0 ** log2_beta) if log2_beta > -1100 else 0.0
    return BetaResult(beta, float(values[k]), r, min(0.0, log2_beta))
