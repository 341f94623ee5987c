"""Capacity, the capacity-achieving inputs, and the extremal dispersions.

The capacity-achieving output distribution (caod) is unique, but the inputs
that reach it form a polytope. Over that polytope the conditional variance of
the information density is linear in the input, so its extremes come out of a
pair of linear programs.

"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import rel_entr

from .channel import Dist, _check_input
from .config import config
from .exceptions import (DimensionMismatch, InfeasibleLp, InvalidEpsilon,
    NotConverged, SupportViolation)
from .simplex import linprog


log = logging.getLogger('fblearn')

_LN2 = math.log(2)


def _divergences(w, py):
    """``D(W(.|x) || py)`` in bits, for every input ``x``."""
    with np.errstate(divide='ignore'):
        return rel_entr(w.transition, py[None, :]).sum(axis=1) / _LN2


def blahut_arimoto(w, tol=None, max_iter=None, trace=None):
    """Capacity of ``w`` by alternating maximization.

    Stops once the mutual information of the current input is within ``tol``
    of ``max_x D(W(.|x) || py)``, which bounds the capacity from above.

    :param list trace: If given, receives ``(lower, upper)`` per iteration.
    :returns: ``(capacity, caid_witness, caod)``; ``caod`` is the output
        distribution of the witness.

    """

    tol = tol or config.ba_tol
    max_iter = max_iter or config.ba_max_iter
    px = np.full(w.num_inputs, 1.0 / w.num_inputs)

    for iteration in range(1, int(max_iter) + 1):

        py = px @ w.transition
        d = _divergences(w, py)
        lower = max(0.0, float(np.dot(px, d)))
        upper = float(d.max())
        if trace is not None:
            trace.append((lower, upper))
        if upper - lower <= tol:
            break

        # Multiplicative update, shifted by the max for range.
        px = px * np.exp2(d - upper)
        px /= px.sum()

    else:
        raise NotConverged('Blahut-Arimoto gap is %.3g bits after %d iterations' % (
            upper - lower, max_iter))

    log.info('blahut_arimoto(%dx%d) -> %.6f bits after %d iterations' % (
        w.num_inputs, w.num_outputs, lower, iteration))
    return lower, Dist(px), Dist(py)


def caid_support(w, caod, capacity, slack=None):
    """Inputs whose divergence to the caod is within ``slack`` of capacity.

    Every capacity-achieving input lives on this set.

    """
    slack = config.caid_slack if slack is None else slack
    if len(caod) != w.num_outputs:
        raise DimensionMismatch('caod has %d entries; channel has %d outputs' % (
            len(caod), w.num_outputs))
    d = _divergences(w, caod.mass)
    return tuple(int(x) for x in np.flatnonzero(d >= capacity - slack))


def _row_variances(w, caod):
    """``Var[log2(W(Y|x) / caod(Y))]`` under ``Y ~ W(.|x)``; ``inf`` where undefined."""

    t = w.transition
    q = caod.mass
    bad = np.any((t > 0) & (q[None, :] == 0), axis=1)
    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.log2(np.where(t > 0, t, 1.0)) - np.log2(np.where(q > 0, q, 1.0))[None, :]
    mean = (t * values).sum(axis=1)
    var = (t * (values - mean[:, None]) ** 2).sum(axis=1)
    var[bad] = np.inf
    return np.maximum(var, 0.0)


def conditional_dispersion(w, px, caod):
    """``sum_x px(x) Var[log2(W(Y|x) / caod(Y)) | X = x]`` in bits squared."""
    _check_input(px, w)
    if len(caod) != w.num_outputs:
        raise DimensionMismatch('caod has %d entries; channel has %d outputs' % (
            len(caod), w.num_outputs))
    var = _row_variances(w, caod)
    used = px.mass > 0
    if np.any(np.isinf(var[used])):
        x = int(np.flatnonzero(used & np.isinf(var))[0])
        raise SupportViolation('caod is zero on an output of input %d' % x)
    return float(np.dot(px.mass[used], var[used]))


def _check_epsilon(epsilon):
    if not 0 < epsilon < 1:
        raise InvalidEpsilon('epsilon must be in (0, 1); got %r' % epsilon)
    if epsilon == 0.5:
        raise InvalidEpsilon('the dispersion is undefined at epsilon = 1/2')


@dataclass(frozen=True)
class CapacityDispersion(object):

    """Capacity and the extremal dispersions over the capacity-achieving inputs."""

    capacity: float
    caod: Dist
    caid_witness: Dist
    dispersion_min: float
    dispersion_max: float
    unique_caid: bool
    caid_min: Dist
    caid_max: Dist
    support: Tuple[int, ...]
    num_inputs: int
    num_outputs: int
    epsilon: Optional[float] = None

    def dispersion_for(self, epsilon):
        """The minimum below ``epsilon = 1/2``, the maximum above it."""
        _check_epsilon(epsilon)
        return self.dispersion_min if epsilon < 0.5 else self.dispersion_max

    def caid_for(self, epsilon):
        """The capacity-achieving input that attains :meth:`dispersion_for`."""
        _check_epsilon(epsilon)
        return self.caid_min if epsilon < 0.5 else self.caid_max

    @property
    def dispersion(self):
        if self.epsilon is None:
            raise InvalidEpsilon('no epsilon was given; use dispersion_for()')
        return self.dispersion_for(self.epsilon)


def _extremes(w, caod, v, support, feasibility):

    s = list(support)
    ws = w.transition[s].T
    q = caod.mass
    a_ub = np.vstack([ws, -ws])
    b_ub = np.concatenate([q + feasibility, feasibility - q])
    a_eq = np.ones((1, len(s)))

    out = []
    for maximize in (False, True):
        res = linprog(v[s], a_eq=a_eq, b_eq=[1.0], a_ub=a_ub, b_ub=b_ub,
            maximize=maximize, feasibility=feasibility)
        mass = np.zeros(w.num_inputs)
        mass[s] = res.x
        mass /= mass.sum()
        out.append((max(0.0, res.value), Dist(mass)))
    return out


def capacity_dispersion(w, slack=None, feasibility=None, retries=None):
    """Capacity, caod, and the range of dispersions over the CAID polytope.

    On an infeasible program the support slack and the constraint tolerance
    both loosen tenfold, up to ``retries`` times.

    """

    slack = config.caid_slack if slack is None else slack
    feasibility = config.lp_feasibility if feasibility is None else feasibility
    retries = config.lp_retries if retries is None else retries

    capacity, witness, caod = blahut_arimoto(w)
    v = _row_variances(w, caod)

    for attempt in range(retries + 1):
        support = caid_support(w, caod, capacity, slack)
        try:
            (v_min, p_min), (v_max, p_max) = _extremes(w, caod, v, support, feasibility)
        except InfeasibleLp as e:
            if attempt == retries:
                raise
            log.warning('CAID program infeasible (%s); retrying with slack %.1g' % (e, slack * 10))
            slack *= 10
            feasibility *= 10
        else:
            break

    rank = np.linalg.matrix_rank(w.transition[list(support)].T, tol=1e-9)
    unique = rank == len(support)

    if v_min <= 0 and capacity > 0:
        log.warning('minimum dispersion is zero; the channel may be exotic and '
            'the normal approximation unreliable')

    log.info('capacity_dispersion(%dx%d) -> C=%.6f, V in [%.6f, %.6f]%s' % (
        w.num_inputs, w.num_outputs, capacity, v_min, v_max, '' if unique else ', CAID not unique'))

    return CapacityDispersion(
        capacity=capacity,
        caod=caod,
        caid_witness=witness,
        dispersion_min=v_min,
        dispersion_max=max(v_min, v_max),
        unique_caid=bool(unique),
        caid_min=p_min,
        caid_max=p_max,
        support=support,
        num_inputs=w.num_inputs,
        num_outputs=w.num_outputs,
    )


def dispersion_extremal(w, epsilon):
    """:func:`capacity_dispersion` with ``epsilon`` selecting the branch."""
    _check_epsilon(epsilon)
    return dataclasses.replace(capacity_dispersion(w), epsilon=epsilon)
