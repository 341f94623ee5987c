"""Built-in channel families, addressed as ``name:args`` (e.g. ``bsc:0.11``)."""

import numpy as np

from .channel import Dmc
from .exceptions import ChannelError, ParseError


_families = {}


def register(*names):
    def _register(func):
        for name in names:
            _families[name] = func
        return func
    return _register


def _probability(raw):
    p = float(raw)
    if not 0 <= p <= 1:
        raise ParseError('probability out of [0, 1]: %r' % raw)
    return p


def _size(raw):
    k = int(raw)
    if k < 1:
        raise ParseError('alphabet size must be positive: %r' % raw)
    return k


@register('bsc')
def bsc(p):
    p = _probability(p)
    return Dmc([[1 - p, p], [p, 1 - p]])


@register('bec')
def bec(p):
    """Binary erasure channel; the erasure is output ``2``."""
    p = _probability(p)
    return Dmc([[1 - p, 0, p], [0, 1 - p, p]])


@register('z')
def z_channel(p):
    """Input ``0`` is noiseless; input ``1`` flips to ``0`` with probability ``p``."""
    p = _probability(p)
    return Dmc([[1, 0], [p, 1 - p]])


@register('identity', 'noiseless')
def identity(k):
    return Dmc(np.eye(_size(k)))


@register('uniform')
def uniform(kx, ky):
    kx, ky = _size(kx), _size(ky)
    return Dmc(np.full((kx, ky), 1.0 / ky))


def family_names():
    return sorted(_families)


def channel_family(spec):
    """Build a channel from ``name:arg[,arg...]``."""
    name, _, raw_args = spec.partition(':')
    try:
        func = _families[name.strip().lower()]
    except KeyError:
        raise ParseError('unknown channel family %r; expected one of %s' % (
            name, ', '.join(family_names())))
    args = [a.strip() for a in raw_args.split(',')] if raw_args.strip() else []
    try:
        return func(*args)
    except (TypeError, ValueError) as e:
        raise ParseError('bad arguments for %s: %s' % (name, e))
    except ChannelError as e:
        raise ParseError('%s does not give a channel: %s' % (spec, e))
