"""Monte Carlo simulation of the learned random code.

The code is the ``L``-fold product of a random mini-codebook of ``M0`` words
of length ``n0``. The decoder is maximum likelihood under the *estimated*
channel, one sub-block at a time; the message is the mixed-radix number formed
by the decoded sub-block indices, most significant first.

Everything random is drawn in fixed-size blocks from :mod:`fblearn.rng`, so a
seed gives the same numbers on any number of threads.

"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import rng
from .capacity import capacity_dispersion
from .config import config
from .exceptions import (CodebookTooLarge, ComputationError, InvalidN0,
    LengthMismatch, ParameterError)
from .learning import estimate_empirical_channel, sample_training_set
from .parallel import pmap


log = logging.getLogger('fblearn')


#: Returned by the decoder when every codeword is impossible under the estimate.
ERASURE = -1

#: Trials per random block.
SIM_BLOCK = 1 << 12

#: Largest ``trials x L x M0 x n0`` tensor formed while decoding.
DECODE_CHUNK = 1 << 22

#: Largest number of sub-block outputs :func:`exact_error_prob` will enumerate.
EXACT_OUTPUT_LIMIT = 1 << 16

TIE_BREAKS = ('lowest', 'random')


class Codebook(object):

    """An ``L``-fold product of a mini-codebook.

    :param mini: ``M0 x n0`` input symbols.
    :param int l_factor: Number of sub-blocks ``L``.
    :param int n: Blocklength the code was built for; ``n0 L <= n``.

    """

    def __init__(self, mini, l_factor, n, m_target=0.0):
        mini = np.array(mini, dtype=np.int64)
        mini.flags.writeable = False
        self.mini = mini
        self.l_factor = int(l_factor)
        self.n = int(n)
        self.m_target = float(m_target)

    @property
    def m0(self):
        return self.mini.shape[0]

    @property
    def n0(self):
        return self.mini.shape[1]

    @property
    def log2_effective_m(self):
        return self.l_factor * math.log2(self.m0)

    @property
    def effective_m(self):
        return self.m0 ** self.l_factor

    @property
    def effective_n(self):
        return self.n0 * self.l_factor

    def message_index(self, sub_indices):
        index = 0
        for j in sub_indices:
            index = index * self.m0 + int(j)
        return index

    def sub_indices(self, message):
        out = []
        for _ in range(self.l_factor):
            message, j = divmod(int(message), self.m0)
            out.append(j)
        return out[::-1]

    def encode(self, message):
        """The ``n0 L`` input symbols sent for ``message``."""
        if not 0 <= message < self.effective_m:
            raise ParameterError('message %r outside [0, %d)' % (message, self.effective_m))
        return self.mini[self.sub_indices(message)].ravel()

    def __repr__(self):
        return 'Codebook(M0=%d, n0=%d, L=%d)' % (self.m0, self.n0, self.l_factor)


@dataclass(frozen=True)
class SimResult(object):

    error_estimate: float
    trials: int
    std_error: float
    seed: int
    errors: int = 0


def _mini_size(m_target, l_factor, cap):
    x = m_target / l_factor
    if x > 60:
        raise CodebookTooLarge('mini-codebook of 2**%.4g words exceeds the cap of %d' % (x, cap))
    m0 = max(1, int(math.ceil(2.0 ** x)))
    # 2 ** x can land a hair above an integer.
    if m0 > 1 and l_factor * math.log2(m0 - 1) >= m_target - 1e-12:
        m0 -= 1
    if m0 > cap:
        raise CodebookTooLarge('mini-codebook of %d words exceeds the cap of %d' % (m0, cap))
    return m0


def generate_codebook(px, m_target, n, n0, seed, cap=None):
    """Draw a mini-codebook for ``2 ** m_target`` messages at blocklength ``n``.

    ``M0 = ceil(2 ** (m_target / L))`` words of ``n0`` symbols, i.i.d. from
    ``px``, with ``L = n // n0``.

    """
    if not 1 <= n0 <= n:
        raise InvalidN0('n0 must be in [1, %d]; got %r' % (n, n0))
    if m_target < 0:
        raise ParameterError('log2 of the code size must be nonnegative; got %r' % m_target)
    cap = cap or config.codebook_cap
    l_factor = n // n0
    m0 = _mini_size(m_target, l_factor, cap)
    gen = rng.generator(seed, rng.CODEBOOK)
    mini = rng.categorical(gen, np.cumsum(px.mass), (m0, n0))
    return Codebook(mini, l_factor, n, m_target)


def _scores(log_w, mini, y):
    """``log W(y | row)`` for every mini-codeword; ``y`` has shape ``(..., n0)``."""
    return log_w[mini, y[..., None, :]].sum(axis=-1)


def _argmax(scores, tie_break='lowest', gen=None):
    best = scores.max(axis=-1)
    if tie_break == 'lowest':
        idx = scores.argmax(axis=-1)
    elif tie_break == 'random':
        if gen is None:
            raise ParameterError('random tie-breaking needs a generator')
        ties = scores == best[..., None]
        count = ties.sum(axis=-1)
        pick = np.floor(gen.random(best.shape) * count).astype(np.int64)
        idx = (np.cumsum(ties, axis=-1) > pick[..., None]).argmax(axis=-1)
    else:
        raise ParameterError('unknown tie-break %r; expected one of %s' % (tie_break, ', '.join(TIE_BREAKS)))
    return np.where(best == -np.inf, ERASURE, idx)


def _log_channel(w):
    with np.errstate(divide='ignore'):
        return np.log(w.transition)


def empirical_ml_decode(w_hat, codebook, y, tie_break='lowest', gen=None):
    """Decode ``y`` by maximum likelihood under ``w_hat``, sub-block by sub-block.

    :returns: The message index, or :data:`ERASURE` when some sub-block is
        impossible for every mini-codeword.

    """
    y = np.asarray(y, dtype=np.int64)
    if y.shape != (codebook.effective_n, ):
        raise LengthMismatch('received %d symbols; the code sends %d' % (y.size, codebook.effective_n))
    subs = _argmax(_scores(_log_channel(w_hat), codebook.mini, y.reshape(codebook.l_factor, codebook.n0)),
        tie_break, gen)
    if np.any(subs == ERASURE):
        return ERASURE
    message = codebook.message_index(subs)
    # The product book holds every index combination.
    assert 0 <= message < codebook.effective_m
    return message


def _simulate_block(w_true, log_hat, codebook, seed, block, count, tie_break):

    gen = rng.generator(seed, rng.CHANNEL, block)
    sent = gen.integers(0, codebook.m0, (count, codebook.l_factor))
    x = codebook.mini[sent]
    cdf = np.cumsum(w_true.transition, axis=1)
    y = rng.categorical(gen, cdf[x], x.shape)

    rows = max(1, DECODE_CHUNK // (codebook.l_factor * codebook.m0 * codebook.n0))
    errors = 0
    for start in range(0, count, rows):
        decoded = _argmax(_scores(log_hat, codebook.mini, y[start:start + rows]), tie_break, gen)
        errors += int(np.any(decoded != sent[start:start + rows], axis=1).sum())
    return errors


def _sim_result(errors, trials, seed):
    p = errors / float(trials)
    return SimResult(p, trials, math.sqrt(p * (1 - p) / trials), seed, errors)


def simulate_error_prob(w_true, w_hat, codebook, trials, seed, tie_break='lowest'):
    """Send uniform messages through ``w_true`` and decode with ``w_hat``."""
    if trials < 1:
        raise ParameterError('need at least one trial; got %r' % trials)
    log_hat = _log_channel(w_hat)
    errors = sum(pmap(
        lambda bc: _simulate_block(w_true, log_hat, codebook, seed, bc[0], bc[1], tie_break),
        rng.blocks(int(trials), SIM_BLOCK)))
    result = _sim_result(errors, int(trials), seed)
    log.info('simulate_error_prob(%r, %d trials) -> %.6g' % (codebook, trials, result.error_estimate))
    return result


def exact_error_prob(w_true, w_hat, codebook, tie_break='lowest'):
    """The decoder's error probability, by enumerating every sub-block output.

    With random tie-breaking this is the average over the tie-breaks.

    """
    k = w_true.num_outputs ** codebook.n0
    if k > EXACT_OUTPUT_LIMIT:
        raise ComputationError('%d sub-block outputs exceed the enumeration limit of %d' % (
            k, EXACT_OUTPUT_LIMIT))
    outputs = np.indices((w_true.num_outputs, ) * codebook.n0).reshape(codebook.n0, -1).T

    scores = _scores(_log_channel(w_hat), codebook.mini, outputs)
    true = np.exp(_scores(_log_channel(w_true), codebook.mini, outputs))

    best = scores.max(axis=-1)
    if tie_break == 'lowest':
        credit = np.zeros_like(scores)
        credit[np.arange(k), scores.argmax(axis=-1)] = 1.0
    elif tie_break == 'random':
        ties = (scores == best[:, None]).astype(float)
        credit = ties / ties.sum(axis=-1, keepdims=True)
    else:
        raise ParameterError('unknown tie-break %r; expected one of %s' % (tie_break, ', '.join(TIE_BREAKS)))
    credit[best == -np.inf] = 0.0

    correct = (credit * true).sum(axis=0).mean()
    return float(min(1.0, max(0.0, 1.0 - correct ** codebook.l_factor)))


def simulate_ensemble(w_true, w_hat, px, m_target, n, n0, codebooks, trials_per_codebook, seed,
    tie_break='lowest'):
    """:func:`simulate_error_prob` over ``codebooks`` freshly drawn codebooks.

    Estimates the error averaged over the random-coding ensemble.

    """
    if codebooks < 1:
        raise ParameterError('need at least one codebook; got %r' % codebooks)

    def one(i):
        book = generate_codebook(px, m_target, n, n0, rng.derive_seed(seed, rng.ENSEMBLE, i))
        return simulate_error_prob(w_true, w_hat, book, trials_per_codebook,
            rng.derive_seed(seed, rng.CHANNEL, i), tie_break).errors

    errors = sum(pmap(one, range(codebooks)))
    return _sim_result(errors, codebooks * int(trials_per_codebook), seed)


@dataclass(frozen=True)
class ReliabilityReport(object):

    """Per-draw error estimates against the reliability target.

    ``reliability_ok``: at least ``1 - delta`` of the draws reach ``epsilon``.
    ``lemma_ok``: the mean error is at most ``epsilon + delta``. Both allow
    three standard errors.

    """

    draws: int
    errors: Tuple[float, ...]
    fraction_within: float
    mean_error: float
    fraction_sigma: float
    mean_sigma: float
    reliability_ok: bool
    lemma_ok: bool
    epsilon: float
    delta: float


def verify_reliability(w_true, params, training_draws, trials_per_draw, seed, px=None,
    codebook_seed=None, tie_break='lowest'):
    """Learn, build and simulate a code once per training draw.

    Each draw samples ``params.m`` pairs, estimates the channel, picks the
    input law (``px``, or the CAID of the estimate for ``params.epsilon``),
    draws a codebook and estimates its error on the true channel.

    """

    if training_draws < 1:
        raise ParameterError('need at least one training draw; got %r' % training_draws)
    if params.m is None:
        raise ParameterError('verification needs a training size')
    n0 = params.n0 or params.n
    m_target = params.log2_code_size

    def one(draw):
        s = rng.derive_seed(seed, rng.RELIABILITY, draw)
        w_hat = estimate_empirical_channel(sample_training_set(w_true, params.m, s))
        if px is not None:
            law = px
        elif params.epsilon == 0.5:
            law = capacity_dispersion(w_hat).caid_witness
        else:
            law = capacity_dispersion(w_hat).caid_for(params.epsilon)
        book_seed = codebook_seed if codebook_seed is not None else rng.derive_seed(s, rng.CODEBOOK)
        book = generate_codebook(law, m_target, params.n, n0, book_seed)
        return simulate_error_prob(w_true, w_hat, book, trials_per_draw,
            rng.derive_seed(s, rng.CHANNEL), tie_break).error_estimate

    errors = np.array(pmap(one, range(int(training_draws))))
    draws = errors.size
    eps, delta = params.epsilon, params.delta

    fraction = float(np.mean(errors <= eps))
    mean = float(errors.mean())
    fraction_sigma = math.sqrt(delta * (1 - delta) / draws)
    mean_sigma = float(errors.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0

    report = ReliabilityReport(
        draws=draws,
        errors=tuple(float(e) for e in errors),
        fraction_within=fraction,
        mean_error=mean,
        fraction_sigma=fraction_sigma,
        mean_sigma=mean_sigma,
        reliability_ok=fraction >= 1 - delta - 3 * fraction_sigma,
        lemma_ok=mean <= eps + delta + 3 * mean_sigma,
        epsilon=eps,
        delta=delta,
    )
    log.info('verify_reliability(%d draws) -> within=%.4f mean=%.6g' % (draws, fraction, mean))
    return report
