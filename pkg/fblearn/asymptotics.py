"""Normal approximations of the best rate, and their Berry-Esseen diagnostics.

To leading order the best rate at blocklength ``n`` and error ``epsilon`` is::

    C - sqrt(V / n) Qinv(epsilon)

with ``V`` the smallest (``epsilon < 1/2``) or largest (``epsilon > 1/2``)
dispersion over the capacity-achieving inputs. The ``O(log n / n)`` remainder
has no known constants and is never added; the Berry-Esseen radius is
reported next to the rate instead.

"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfc, ndtri

from .channel import info_density_table
from .exceptions import DomainError, InvalidN0, ParameterError, ZeroVariance
from .learning import max_blocklength


log = logging.getLogger('fblearn')

_LN2 = math.log(2)


def gaussian_q(t):
    """Tail probability of the standard normal."""
    return 0.5 * float(erfc(t / math.sqrt(2)))


def gaussian_q_inv(p):
    if not 0 < p < 1:
        raise DomainError('Qinv is defined on (0, 1); got %r' % p)
    return -float(ndtri(p))


@dataclass(frozen=True)
class BerryEsseenMoments(object):

    mean: float
    variance: float
    third_abs_central: float


def log_u_moments():
    """Mean, variance and third absolute central moment of ``log2 U``, ``U ~ Unif(0, 1)``.

    ``-ln U`` is a unit exponential, which gives every moment in closed form;
    ``E|V - 1|**3 = 12/e - 2`` for ``V ~ Exp(1)``.

    """
    return BerryEsseenMoments(
        mean=-1.0 / _LN2,
        variance=1.0 / _LN2 ** 2,
        third_abs_central=(12.0 / math.e - 2.0) / _LN2 ** 3,
    )


def info_density_moments(w_hat, px):
    """Moments of one letter of the information density under ``px W``."""
    values, masses = info_density_table(px, w_hat).atoms()
    mean = float(np.dot(masses, values))
    dev = np.abs(values - mean)
    variance = float(np.dot(masses, dev ** 2))
    third = float(np.dot(masses, dev ** 3))
    return BerryEsseenMoments(mean, variance, third)


def berry_esseen_radius(channel_moments, n):
    """``B(n) / sqrt(n)`` with ``B(n) = 6 (T + t/n) / (V + v/n) ** 1.5``.

    ``T`` and ``V`` are the channel's third absolute and second central
    moments; ``t`` and ``v`` those of ``log2 U``, which smooths the ceiling of
    the code size.

    """
    if n < 1:
        raise ParameterError('blocklength must be at least 1; got %r' % n)
    u = log_u_moments()
    variance = channel_moments.variance + u.variance / n
    if not variance > 0:
        raise ZeroVariance('Berry-Esseen radius needs a positive variance')
    b = 6.0 * (channel_moments.third_abs_central + u.third_abs_central / n) / variance ** 1.5
    return b / math.sqrt(n)


@dataclass(frozen=True)
class NormalApproxResult(object):

    """Leading-order rate; ``rate = capacity_term - dispersion_term``.

    ``condition_ok`` is ``None`` unless a training size was given.

    """

    rate: float
    capacity_term: float
    dispersion_term: float
    condition_ok: Optional[bool]
    min_n_hint: float
    n: int = 0
    n0: int = 0
    epsilon: float = 0.0
    berry_esseen: Optional[float] = None


def _condition(length, cd, m, delta, cardinality):
    if m is None or delta is None:
        return None
    cardinality = cardinality or cd.num_inputs * cd.num_outputs
    return length <= max_blocklength(m, cardinality, delta)


def _warn_short(n, epsilon):
    hint = 1.0 / epsilon ** 2
    if n < hint:
        log.warning('n=%d is below the 1/eps^2 = %.4g scale; the approximation may be loose' % (n, hint))
    return hint


def normal_approx_rate(cd, n, epsilon, moments=None, m=None, delta=None, cardinality=None):
    """``C - sqrt(V / n) Qinv(epsilon)``.

    :param cd: A :class:`~fblearn.capacity.CapacityDispersion`.
    :param moments: Channel moments; when given, the Berry-Esseen radius is
        attached to the result.
    :param m: Training size; with ``delta``, checks that ``n`` is within
        :func:`~fblearn.learning.max_blocklength`.

    """
    if n < 1:
        raise ParameterError('blocklength must be at least 1; got %r' % n)
    v = cd.dispersion_for(epsilon)
    dispersion = math.sqrt(v / n) * gaussian_q_inv(epsilon)
    hint = _warn_short(n, epsilon)
    result = NormalApproxResult(
        rate=cd.capacity - dispersion,
        capacity_term=cd.capacity,
        dispersion_term=dispersion,
        condition_ok=_condition(n, cd, m, delta, cardinality),
        min_n_hint=hint,
        n=n,
        n0=n,
        epsilon=epsilon,
        berry_esseen=berry_esseen_radius(moments, n) if moments is not None else None,
    )
    log.info('normal_approx_rate(n=%d, eps=%g) -> %.6f' % (n, epsilon, result.rate))
    return result


def normal_approx_rate_partial(cd, n, n0, epsilon, moments=None, m=None, delta=None, cardinality=None):
    """``n0 C / n - sqrt(n0 V) / n Qinv(epsilon)``; only ``n0`` letters carry information.

    The check against the training size applies to ``n0`` rather than ``n``.

    """
    if not 1 <= n0 <= n:
        raise InvalidN0('n0 must be in [1, %d]; got %r' % (n, n0))
    v = cd.dispersion_for(epsilon)
    capacity = n0 * cd.capacity / n
    dispersion = math.sqrt(n0 * v) / n * gaussian_q_inv(epsilon)
    hint = _warn_short(n, epsilon)
    return NormalApproxResult(
        rate=capacity - dispersion,
        capacity_term=capacity,
        dispersion_term=dispersion,
        condition_ok=_condition(n0, cd, m, delta, cardinality),
        min_n_hint=hint,
        n=n,
        n0=n0,
        epsilon=epsilon,
        berry_esseen=berry_esseen_radius(moments, n0) if moments is not None else None,
    )


def berry_esseen_rate_bounds(cd, moments, n, epsilon, kappa=0.0):
    """Explicit ``(lower, upper)`` rate bounds with the Berry-Esseen terms kept.

    Either side is ``nan`` when its Gaussian quantile is undefined, which
    happens for ``n`` too small for the radius to fit inside ``epsilon``.

    """
    u = log_u_moments()
    v = cd.dispersion_for(epsilon)
    root = math.sqrt(n)
    b = berry_esseen_radius(moments, n) * root

    low_arg = epsilon - (1.0 + b) / root
    if 0 < low_arg < 1:
        lower = cd.capacity + u.mean / n - math.sqrt((v + u.variance / n) / n) * gaussian_q_inv(low_arg)
    else:
        lower = math.nan

    high_arg = 1.0 - epsilon - kappa - (b + 1.0) / root
    if 0 < high_arg < 1:
        upper = cd.capacity + math.sqrt(v / n) * gaussian_q_inv(high_arg) + math.log2(n) / (2.0 * n)
    else:
        upper = math.nan

    return lower, upper
