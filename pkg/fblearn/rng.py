"""Counter-based random streams.

Every random draw in fblearn comes from a :class:`numpy.random.Generator` on a
Philox bit generator keyed by ``(seed, stream)``. Work is cut into fixed-size
blocks and the block index sits in the high word of the counter, so block
``k`` produces the same numbers no matter which thread runs it, or when.

"""

import numpy as np


_MASK64 = (1 << 64) - 1

# Streams; one per kind of draw so they never overlap for a shared seed.
TRAINING = 1
CODEBOOK = 2
CHANNEL = 3
MONTE_CARLO = 4
RELIABILITY = 5
ENSEMBLE = 6


def generator(seed, stream=0, block=0):
    """Return the generator for one block of one stream.

    :param int seed: Any integer; reduced to 64 bits.
    :param int stream: Purpose of the draws; see the module constants.
    :param int block: Index of the block of draws.

    """
    key = ((int(stream) & _MASK64) << 64) | (int(seed) & _MASK64)
    counter = (int(block) & _MASK64) << 128
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def derive_seed(seed, *words):
    """Derive a child seed from a seed and any number of integer words."""
    entropy = [int(seed) & _MASK64] + [int(w) & _MASK64 for w in words]
    state = np.random.SeedSequence(entropy).generate_state(1, np.uint64)
    return int(state[0])


def blocks(total, size):
    """Yield ``(block, count)`` pairs covering ``total`` draws."""
    block = 0
    start = 0
    while start < total:
        count = min(size, total - start)
        yield block, count
        block += 1
        start += count


def categorical(gen, cdf, size):
    """Draw indices from cumulative distributions by inversion.

    :param gen: The generator to draw uniforms from.
    :param cdf: Cumulative masses; either one row, or one row per draw.
    :param size: Number of draws.

    """
    cdf = np.asarray(cdf)
    u = gen.random(size)
    if cdf.ndim == 1:
        idx = np.searchsorted(cdf, u, side='right')
    else:
        idx = (cdf <= u[..., None]).sum(axis=-1)
    # The last cumulative mass can round below one; a uniform above it goes
    # to the last letter that has mass, never to a trailing zero.
    live = np.diff(cdf, axis=-1, prepend=0.0) > 0
    last = cdf.shape[-1] - 1 - np.argmax(live[..., ::-1], axis=-1)
    return np.minimum(idx, last)
