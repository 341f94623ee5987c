"""Training sets, the empirical channel, and the concentration penalties.

Every bound in fblearn is data-dependent: it is computed on the channel
estimated from ``m`` training pairs, then paid for with a total variation
penalty that holds with probability ``1 - delta`` over the draw of the pairs.

"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .channel import Dist, Dmc
from .exceptions import (InvalidDelta, InvalidN0, ParameterError)
from .parallel import pmap


log = logging.getLogger('fblearn')


#: Draws per random block; fixed so results never depend on scheduling.
SAMPLE_BLOCK = 1 << 16


class TrainingSet(object):

    """``m`` pairs ``(x, y)`` of input and output indices.

    :param x: Input indices in ``[0, input_alphabet)``.
    :param y: Output indices in ``[0, output_alphabet)``.

    """

    def __init__(self, x, y, input_alphabet, output_alphabet):
        x = np.array(x, dtype=np.int64)
        y = np.array(y, dtype=np.int64)
        if x.ndim != 1 or x.shape != y.shape:
            raise ParameterError('training inputs and outputs must be vectors of equal length')
        if not x.size:
            raise ParameterError('training set must hold at least one pair')
        for name, values, size in (('input', x, input_alphabet), ('output', y, output_alphabet)):
            if size < 1:
                raise ParameterError('%s alphabet must be positive; got %d' % (name, size))
            if values.min() < 0 or values.max() >= size:
                raise ParameterError('%s index outside [0, %d)' % (name, size))
        x.flags.writeable = False
        y.flags.writeable = False
        self.x = x
        self.y = y
        self.input_alphabet = int(input_alphabet)
        self.output_alphabet = int(output_alphabet)

    @property
    def m(self):
        return self.x.size

    def __len__(self):
        return self.x.size

    @property
    def pairs(self):
        return list(zip(self.x.tolist(), self.y.tolist()))

    def counts(self):
        """``counts[x, y]``; how often each pair occurs."""
        flat = np.bincount(self.x * self.output_alphabet + self.y,
            minlength=self.input_alphabet * self.output_alphabet)
        return flat.reshape(self.input_alphabet, self.output_alphabet)

    def __repr__(self):
        return 'TrainingSet(m=%d, %dx%d)' % (self.m, self.input_alphabet, self.output_alphabet)


def _sample_block(w, seed, block, count):
    gen = rng.generator(seed, rng.TRAINING, block)
    x = gen.integers(0, w.num_inputs, count)
    cdf = np.cumsum(w.transition, axis=1)
    y = rng.categorical(gen, cdf[x], count)
    return x, y


def sample_training_set(w, m, seed):
    """Draw ``m`` pairs with ``x`` uniform and ``y ~ W(.|x)``.

    The draws depend only on ``seed``; the worker count does not matter.

    """
    if m < 1:
        raise ParameterError('training size must be at least 1; got %r' % m)
    parts = pmap(lambda bc: _sample_block(w, seed, bc[0], bc[1]), rng.blocks(int(m), SAMPLE_BLOCK))
    x = np.concatenate([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])
    return TrainingSet(x, y, w.num_inputs, w.num_outputs)


def estimate_empirical_channel(d):
    """Count ratios ``count(x, y) / count(x)``.

    Inputs that never occur get a uniform row, and are listed in the
    result's :attr:`~fblearn.channel.Dmc.flagged_rows`.

    """
    counts = d.counts().astype(float)
    totals = counts.sum(axis=1)
    unvisited = np.flatnonzero(totals == 0)
    if unvisited.size:
        log.warning('inputs %s never occur in %d training pairs; using uniform rows, '
            'the guarantee is vacuous for them' % (unvisited.tolist(), d.m))
        counts[unvisited] = 1.0
        totals[unvisited] = d.output_alphabet
    w_hat = Dmc(counts / totals[:, None], flagged_rows=unvisited)
    log.info('estimate_empirical_channel(m=%d) -> %r' % (d.m, w_hat))
    return w_hat


def empirical_joint(d):
    """The empirical distribution of the pairs, ``count(x, y) / m``, flattened ``x``-major."""
    return Dist(d.counts().ravel() / float(d.m))


def _check(m, cardinality, delta):
    if not 0 < delta < 1:
        raise InvalidDelta('delta must be in (0, 1); got %r' % delta)
    if m < 1:
        raise ParameterError('training size must be at least 1; got %r' % m)
    if cardinality < 1:
        raise ParameterError('cardinality must be at least 1; got %r' % cardinality)


def kl_concentration_bound(m, cardinality, delta):
    """``((cardinality - 1) ln(m + 1) - ln delta) / m``, in nats.

    With probability at least ``1 - delta``, the empirical distribution of
    ``m`` i.i.d. draws is within this KL divergence of the truth.

    """
    _check(m, cardinality, delta)
    return ((cardinality - 1) * math.log1p(m) - math.log(delta)) / m


@dataclass(frozen=True)
class PenaltyParams(object):

    m: int
    alphabet_product: int
    delta: float
    n0: int

    def __post_init__(self):
        _check(self.m, self.alphabet_product, self.delta)
        if self.n0 < 1:
            raise InvalidN0('n0 must be at least 1; got %r' % self.n0)


def tv_penalty(p):
    """``kappa = sqrt(1 - exp(-n0 * kl_concentration_bound(...)))``.

    Bounds the total variation between the true and the empirical
    ``n0``-fold product channels (Bretagnolle-Huber).

    """
    bound = kl_concentration_bound(p.m, p.alphabet_product, p.delta)
    return math.sqrt(-math.expm1(-p.n0 * bound))


def penalty(m, cardinality, delta, n0):
    """:func:`tv_penalty`, or ``0`` when ``m`` is ``None`` (the channel is known)."""
    if m is None:
        if n0 < 1:
            raise InvalidN0('n0 must be at least 1; got %r' % n0)
        return 0.0
    return tv_penalty(PenaltyParams(m, cardinality, delta, n0))


def max_blocklength(m, cardinality, delta):
    """Largest ``n`` with ``n <= sqrt(m / ((cardinality - 1) ln(m + 1) - ln delta))``."""
    _check(m, cardinality, delta)
    scale = (cardinality - 1) * math.log1p(m) - math.log(delta)
    n = int(math.floor(math.sqrt(m / scale)))
    # Settle the floor exactly on the squared inequality.
    while (n + 1) ** 2 * scale <= m:
        n += 1
    while n > 0 and n ** 2 * scale > m:
        n -= 1
    return n
