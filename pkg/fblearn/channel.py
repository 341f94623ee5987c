"""Discrete memoryless channels, distributions, and information measures.

All information quantities are in bits, except :func:`kl_divergence` which is
in nats.

"""

import logging

import numpy as np
from scipy.special import rel_entr

from .exceptions import (ChannelError, DimensionMismatch, NegativeEntry,
    RowNotStochastic, UnreachableOutputWithMass)


log = logging.getLogger('fblearn')


#: How far a user-supplied row may stray from summing to one.
ROW_TOLERANCE = 1e-9


def _normalize(rows, tolerance, what):
    """Validate and renormalize the last axis of ``rows`` in place."""

    if not np.all(np.isfinite(rows)):
        raise ChannelError('%s has non-finite entries' % what)

    negative = np.argwhere(rows < 0)
    if negative.size:
        raise NegativeEntry('%s has a negative entry at %s' % (
            what, tuple(int(i) for i in negative[0])))

    sums = rows.sum(axis=-1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > tolerance)
    if bad.size:
        raise RowNotStochastic('%s row %d sums to %r' % (
            what, bad[0], float(np.ravel(sums)[bad[0]])))

    # Only touch rows that are visibly off, so that a normalized matrix
    # survives another pass bit for bit.
    exact = max(1e-15, 4 * rows.shape[-1] * np.finfo(float).eps)
    off = np.abs(sums - 1.0) > exact
    if np.any(off):
        rows[off] /= sums[off, None] if rows.ndim > 1 else sums
    rows.flags.writeable = False
    return rows


class Dist(object):

    """A probability mass function over ``range(len(mass))``.

    :param mass: Probabilities; must sum to one within 1e-9.

    """

    def __init__(self, mass, tolerance=ROW_TOLERANCE):
        mass = np.array(mass, dtype=float)
        if mass.ndim != 1 or not mass.size:
            raise DimensionMismatch('distribution must be a non-empty vector')
        self._mass = _normalize(mass, tolerance, 'distribution')

    @classmethod
    def uniform(cls, size):
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point(cls, index, size):
        mass = np.zeros(size)
        mass[index] = 1.0
        return cls(mass)

    @property
    def mass(self):
        return self._mass

    @property
    def support(self):
        return tuple(int(i) for i in np.flatnonzero(self._mass > 0))

    def __len__(self):
        return self._mass.size

    def __repr__(self):
        return 'Dist(%s)' % np.array2string(self._mass, precision=6)


class Dmc(object):

    """A discrete memoryless channel; ``transition[x, y] = W(y|x)``.

    Construct through :func:`validate_dmc` or directly from a matrix.

    :param transition: Rectangular matrix of probabilities.
    :param flagged_rows: Inputs whose row is a fallback rather than data;
        set by :func:`~fblearn.learning.estimate_empirical_channel`.

    """

    def __init__(self, transition, flagged_rows=(), tolerance=ROW_TOLERANCE):
        try:
            transition = np.array(transition, dtype=float)
        except ValueError:
            raise DimensionMismatch('channel matrix is not rectangular')
        if transition.ndim != 2 or not transition.size:
            raise DimensionMismatch('channel matrix must be non-empty and 2-D')
        self._transition = _normalize(transition, tolerance, 'channel')
        self._flagged_rows = tuple(sorted(int(x) for x in flagged_rows))

    @property
    def transition(self):
        return self._transition

    @property
    def num_inputs(self):
        return self._transition.shape[0]

    @property
    def num_outputs(self):
        return self._transition.shape[1]

    @property
    def alphabet_product(self):
        return self._transition.size

    @property
    def flagged_rows(self):
        return self._flagged_rows

    def row(self, x):
        return self._transition[x]

    def __repr__(self):
        return 'Dmc(%dx%d%s)' % (self.num_inputs, self.num_outputs,
            ', flagged=%r' % (self._flagged_rows, ) if self._flagged_rows else '')


class InfoDensityTable(object):

    """Values of ``log2(W(y|x) / PY(y))`` for every pair with ``W(y|x) > 0``.

    ``values`` is a masked array; pairs the channel cannot produce are masked
    rather than stored as ``-inf``.

    """

    def __init__(self, values, input_dist, output_marginal, channel):
        self.values = values
        self.input_dist = input_dist
        self.output_marginal = output_marginal
        self.channel = channel

    @property
    def joint(self):
        """``px(x) W(y|x)``; the forward measure."""
        return self.input_dist.mass[:, None] * self.channel.transition

    def atoms(self):
        """Return ``(values, masses)`` of every pair with positive joint mass."""
        joint = self.joint
        live = joint > 0
        return self.values.data[live], joint[live]

    def mean(self):
        values, masses = self.atoms()
        return float(np.dot(masses, values))


def validate_dmc(raw):
    """Check a raw matrix and return it as a :class:`Dmc`."""
    return Dmc(raw)


def _check_input(px, w):
    if len(px) != w.num_inputs:
        raise DimensionMismatch('input distribution has %d entries; channel has %d inputs' % (
            len(px), w.num_inputs))


def output_marginal(px, w):
    """``PY(y) = sum_x px(x) W(y|x)``."""
    _check_input(px, w)
    return Dist(px.mass @ w.transition)


def info_density_table(px, w):
    """Tabulate the information density of ``w`` under input ``px``."""

    py = output_marginal(px, w).mass
    present = w.transition > 0
    reachable = present & (px.mass[:, None] > 0)

    starved = reachable & (py[None, :] == 0)
    if np.any(starved):
        x, y = np.argwhere(starved)[0]
        raise UnreachableOutputWithMass('output %d has no marginal mass but W(%d|%d) > 0' % (y, y, x))

    with np.errstate(divide='ignore', invalid='ignore'):
        values = np.log2(w.transition) - np.log2(py)[None, :]

    return InfoDensityTable(
        np.ma.masked_array(values, mask=~present),
        px, Dist(py), w,
    )


def mutual_information(px, w):
    """``I(px, w)`` in bits."""
    return max(0.0, info_density_table(px, w).mean())


def joint_distribution(w, px=None):
    """Flattened ``px(x) W(y|x)``, ``x``-major; uniform ``px`` by default."""
    px = px or Dist.uniform(w.num_inputs)
    _check_input(px, w)
    return Dist((px.mass[:, None] * w.transition).ravel())


def _check_pair(p, q):
    if len(p) != len(q):
        raise DimensionMismatch('distributions have %d and %d entries' % (len(p), len(q)))


def kl_divergence(p, q):
    """``KL(p || q)`` in nats; ``inf`` when ``p`` is not dominated by ``q``."""
    _check_pair(p, q)
    return max(0.0, float(rel_entr(p.mass, q.mass).sum()))


def total_variation(p, q):
    _check_pair(p, q)
    return 0.5 * float(np.abs(p.mass - q.mass).sum())


def format_channel(w):
    """Write ``w`` in the channel file format; see :func:`fblearn.cli.parse_channel_file`."""
    lines = ['dmc %d %d' % (w.num_inputs, w.num_outputs)]
    for row in w.transition:
        lines.append(' '.join(repr(float(v)) for v in row))
    return '\n'.join(lines) + '\n'
