"""The ``fblearn`` command.

Every subcommand prints CSV with a header row. Key/value commands print
``quantity,value`` rows; floats carry 12 significant digits.

A channel is given with ``--channel``, either as a family (``bsc:0.11``, see
:mod:`fblearn.families`) or as a file in the channel format::

    # comments start with a hash
    dmc 2 2
    0.9 0.1
    0.1 0.9

With ``--m`` the channel is treated as unknown: ``m`` training pairs are drawn
from it (``--seed``) and every bound is computed on the estimate. Without
``--m`` the channel is known exactly and the penalty is zero. ``--training``
reads the pairs from a CSV of ``x,y`` rows instead.

Errors print one line, ``error,<ClassName>,<message>``, to stderr and exit
with the error's code.

"""

import argparse
import csv
import functools
import logging
import os
import re
import sys

from .achievability import BoundParams, max_rate_achievable, rcu_learning_bound
from .asymptotics import info_density_moments, normal_approx_rate, normal_approx_rate_partial
from .capacity import capacity_dispersion
from .channel import format_channel, validate_dmc
from .codesim import TIE_BREAKS, generate_codebook, simulate_ensemble, simulate_error_prob, verify_reliability
from .config import config
from .converse import converse_bound
from .exceptions import FblearnError, IndexOutOfRange, InternalError, ParseError
from .families import channel_family, family_names
from .learning import TrainingSet, estimate_empirical_channel, penalty, sample_training_set


log = logging.getLogger('fblearn')


def parse_channel_file(text):
    """Parse the channel format into a :class:`~fblearn.channel.Dmc`."""

    header = None
    rows = []
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        tokens = stripped.split()

        if header is None:
            if len(tokens) != 3 or tokens[0] != 'dmc':
                raise ParseError('expected "dmc <inputs> <outputs>"', number, 1)
            try:
                header = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise ParseError('alphabet sizes must be integers', number, 1)
            if min(header) < 1:
                raise ParseError('alphabet sizes must be positive', number, 1)
            continue

        if len(rows) == header[0]:
            raise ParseError('more than %d rows' % header[0], number, 1)
        if len(tokens) != header[1]:
            raise ParseError('expected %d columns, found %d' % (header[1], len(tokens)), number, 1)
        row = []
        for match in re.finditer(r'\S+', line):
            try:
                row.append(float(match.group()))
            except ValueError:
                raise ParseError('not a number: %r' % match.group(), number, match.start() + 1)
        rows.append(row)

    if header is None:
        raise ParseError('no "dmc" header')
    if len(rows) != header[0]:
        raise ParseError('expected %d rows, found %d' % (header[0], len(rows)))
    return validate_dmc(rows)


def parse_training_file(text, num_inputs, num_outputs):
    """Parse ``x,y`` rows into a :class:`~fblearn.learning.TrainingSet`."""

    xs = []
    ys = []
    for number, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        parts = stripped.split(',')
        if len(parts) != 2:
            raise ParseError('expected two columns "x,y"', number, 1)
        pair = []
        for col, (raw, size) in enumerate(zip(parts, (num_inputs, num_outputs))):
            try:
                value = int(raw.strip())
            except ValueError:
                raise ParseError('not an integer: %r' % raw.strip(), number, col + 1)
            if not 0 <= value < size:
                raise IndexOutOfRange('%s index %d outside [0, %d)' % (
                    'input' if col == 0 else 'output', value, size), number, col + 1)
            pair.append(value)
        xs.append(pair[0])
        ys.append(pair[1])

    if not xs:
        raise ParseError('training set is empty')
    return TrainingSet(xs, ys, num_inputs, num_outputs)


class RunConfig(argparse.Namespace):

    """Parsed command line.

    Attributes are the long option names (``n``, ``eps``, ``m``, ...) plus
    ``command`` and ``func``.

    """

    @property
    def exact(self):
        return self.m is None and getattr(self, 'training', None) is None


_commands = {}

_arguments = {
    'channel': (('--channel', ), dict(help='channel file or family (%s)' % ', '.join(family_names()))),
    'training': (('--training', ), dict(help='CSV of x,y training pairs')),
    'inputs': (('--inputs', ), dict(type=int, help='input alphabet size for --training')),
    'outputs': (('--outputs', ), dict(type=int, help='output alphabet size for --training')),
    'm': (('--m', ), dict(type=int, help='training size; omit when the channel is known')),
    'seed': (('--seed', ), dict(type=int, default=0)),
    'n': (('--n', ), dict(type=int, required=True, help='blocklength')),
    'ns': (('--n', ), dict(dest='ns', required=True, help='comma-separated blocklengths')),
    'n0': (('--n0', ), dict(type=int, help='sub-blocklength; scanned when omitted')),
    'rate': (('--rate', ), dict(type=float, help='bits per channel use')),
    'code_size': (('--code-size', ), dict(type=int, help='number of messages, instead of --rate')),
    'eps': (('--eps', ), dict(type=float, required=True, help='target error probability')),
    'delta': (('--delta', ), dict(type=float, default=0.05, help='confidence parameter')),
    'trials': (('--trials', ), dict(type=int, default=10000)),
    'draws': (('--draws', ), dict(type=int, default=100, help='training draws')),
    'codebooks': (('--codebooks', ), dict(type=int, help='fresh codebook per draw, this many times')),
    'tie_break': (('--tie-break', ), dict(choices=TIE_BREAKS, default='lowest')),
    'atom_cap': (('--atom-cap', ), dict(type=int, help='largest convolution, in atom pairs')),
}


def command(func, name=None, args=()):
    if isinstance(func, str):
        return functools.partial(command, name=func, args=args)
    _commands[name or func.__name__] = (func, args)
    return func


def _fmt(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return '%.12g' % value
    if isinstance(value, (tuple, list)):
        return ' '.join(_fmt(v) for v in value)
    return str(value)


def _write_rows(out, header, rows):
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _write_pairs(out, pairs):
    _write_rows(out, ('quantity', 'value'), pairs)


def _read(path):
    if path == '-':
        return sys.stdin.read()
    with open(path, encoding='utf-8') as fh:
        return fh.read()


def _channel(spec):
    if spec is None:
        raise ParseError('--channel is required')
    if os.path.exists(spec) or spec == '-':
        return parse_channel_file(_read(spec))
    return channel_family(spec)


def _learn(args):
    """``(w_true, w_hat, m)``; ``w_true`` is ``None`` for a training file."""
    if getattr(args, 'training', None):
        if not args.inputs or not args.outputs:
            raise ParseError('--training needs --inputs and --outputs')
        d = parse_training_file(_read(args.training), args.inputs, args.outputs)
        return None, estimate_empirical_channel(d), d.m
    w = _channel(args.channel)
    if args.m is None:
        return w, w, None
    return w, estimate_empirical_channel(sample_training_set(w, args.m, args.seed)), args.m


def _epsilon_branch(eps):
    if eps == 0.5:
        log.warning('epsilon = 1/2 has no dispersion branch; using the minimum')
        return 0.25
    return eps


def _input_law(w_hat, eps):
    return capacity_dispersion(w_hat).caid_for(_epsilon_branch(eps))


def _rate(args):
    if args.code_size is not None:
        return BoundParams.from_code_size(args.code_size, args.n, args.eps, args.delta).rate
    if args.rate is None:
        raise ParseError('one of --rate or --code-size is required')
    return args.rate


@command('estimate', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed'))
def estimate(args, out):
    """Estimate a channel from training pairs and print it in the channel format."""
    _, w_hat, _ = _learn(args)
    out.write(format_channel(w_hat))


@command('sample', args=('channel', 'm', 'seed'))
def sample(args, out):
    """Draw training pairs from a channel and print them as x,y rows."""
    if args.m is None:
        raise ParseError('--m is required')
    d = sample_training_set(_channel(args.channel), args.m, args.seed)
    writer = csv.writer(out, lineterminator='\n')
    writer.writerows(d.pairs)


@command('capacity', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed'))
def capacity(args, out):
    """Capacity and capacity-achieving distributions."""
    _, w_hat, _ = _learn(args)
    cd = capacity_dispersion(w_hat)
    _write_pairs(out, [
        ('capacity_bits', cd.capacity),
        ('caid', [float(v) for v in cd.caid_witness.mass]),
        ('caod', [float(v) for v in cd.caod.mass]),
        ('support', list(cd.support)),
        ('unique_caid', cd.unique_caid),
    ])


@command('dispersion', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'eps'))
def dispersion(args, out):
    """Extremal dispersions over the capacity-achieving inputs."""
    _, w_hat, _ = _learn(args)
    cd = capacity_dispersion(w_hat)
    _write_pairs(out, [
        ('capacity_bits', cd.capacity),
        ('dispersion', cd.dispersion_for(_epsilon_branch(args.eps))),
        ('dispersion_min', cd.dispersion_min),
        ('dispersion_max', cd.dispersion_max),
        ('unique_caid', cd.unique_caid),
    ])


@command('achieve', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'n', 'n0',
    'rate', 'code_size', 'eps', 'delta', 'atom_cap'))
def achieve(args, out):
    """Error bound of the learned random code at a given rate."""
    _, w_hat, m = _learn(args)
    p = BoundParams(args.n, _rate(args), args.eps, args.delta, m, args.n0)
    res = rcu_learning_bound(w_hat, _input_law(w_hat, args.eps), p, args.seed, args.atom_cap)
    _write_pairs(out, [
        ('error_upper_bound', res.error_upper_bound),
        ('best_n0', res.best_n0),
        ('first_term', res.first_term),
        ('penalty_term', res.penalty_term),
        ('raw_total', res.raw_total),
        ('method', res.method),
        ('mc_std_error', res.mc_std_error),
    ])


@command('max-rate', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'n', 'n0',
    'eps', 'delta', 'atom_cap'))
def max_rate(args, out):
    """Largest rate the learned random code reaches at the target error."""
    _, w_hat, m = _learn(args)
    rate = max_rate_achievable(w_hat, _input_law(w_hat, args.eps), args.n, m, args.eps, args.delta,
        n0=args.n0, seed=args.seed, atom_cap=args.atom_cap)
    _write_pairs(out, [('achievable_rate', rate)])


@command('converse', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'n', 'eps',
    'delta', 'atom_cap'))
def converse(args, out):
    """Upper bound on the size of any learned code."""
    _, w_hat, m = _learn(args)
    res = converse_bound(w_hat, args.n, args.eps, m, args.delta, atom_cap=args.atom_cap)
    _write_pairs(out, [
        ('log2_m_upper', res.log2_m_upper),
        ('rate_upper', res.rate_upper),
        ('alpha', res.alpha_used),
        ('kappa', res.kappa),
        ('best_composition', list(res.best_composition)),
        ('vacuous', res.vacuous),
        ('heuristic', res.heuristic),
    ])


@command('normal-approx', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'n', 'n0',
    'eps', 'delta'))
def normal_approx(args, out):
    """Normal approximation of the best rate."""
    _, w_hat, m = _learn(args)
    cd = capacity_dispersion(w_hat)
    eps = args.eps
    moments = info_density_moments(w_hat, cd.caid_for(_epsilon_branch(eps)))
    kwargs = dict(moments=moments, m=m, delta=args.delta if m else None)
    if args.n0 is not None and args.n0 != args.n:
        res = normal_approx_rate_partial(cd, args.n, args.n0, eps, **kwargs)
    else:
        res = normal_approx_rate(cd, args.n, eps, **kwargs)
    _write_pairs(out, [
        ('rate', res.rate),
        ('capacity_term', res.capacity_term),
        ('dispersion_term', res.dispersion_term),
        ('condition_ok', res.condition_ok),
        ('min_n_hint', res.min_n_hint),
        ('berry_esseen', res.berry_esseen),
    ])


@command('simulate', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'n', 'n0',
    'rate', 'code_size', 'eps', 'delta', 'trials', 'codebooks', 'tie_break'))
def simulate(args, out):
    """Simulate the learned random code on the true channel."""
    w_true, w_hat, _ = _learn(args)
    if w_true is None:
        raise ParseError('simulate needs --channel for the true channel')
    px = _input_law(w_hat, args.eps)
    n0 = args.n0 or args.n
    m_target = args.n * _rate(args)
    if args.codebooks:
        res = simulate_ensemble(w_true, w_hat, px, m_target, args.n, n0, args.codebooks,
            args.trials, args.seed, args.tie_break)
        book = None
    else:
        book = generate_codebook(px, m_target, args.n, n0, args.seed)
        res = simulate_error_prob(w_true, w_hat, book, args.trials, args.seed, args.tie_break)
    rows = [
        ('error_estimate', res.error_estimate),
        ('std_error', res.std_error),
        ('trials', res.trials),
    ]
    if book is not None:
        rows += [('m0', book.m0), ('l_factor', book.l_factor)]
    _write_pairs(out, rows)


@command('verify', args=('channel', 'm', 'seed', 'n', 'n0', 'rate', 'code_size', 'eps', 'delta',
    'trials', 'draws', 'tie_break'))
def verify(args, out):
    """Check the reliability of the learned code over many training draws."""
    if args.m is None:
        raise ParseError('--m is required')
    w = _channel(args.channel)
    p = BoundParams(args.n, _rate(args), args.eps, args.delta, args.m, args.n0)
    rep = verify_reliability(w, p, args.draws, args.trials, args.seed, tie_break=args.tie_break)
    _write_pairs(out, [
        ('draws', rep.draws),
        ('fraction_within', rep.fraction_within),
        ('mean_error', rep.mean_error),
        ('fraction_sigma', rep.fraction_sigma),
        ('mean_sigma', rep.mean_sigma),
        ('reliability_ok', rep.reliability_ok),
        ('lemma_ok', rep.lemma_ok),
    ])


@command('sandwich', args=('channel', 'training', 'inputs', 'outputs', 'm', 'seed', 'ns', 'n0',
    'eps', 'delta', 'atom_cap'))
def sandwich(args, out):
    """Achievable, converse and approximate rates over a range of blocklengths."""
    try:
        ns = [int(v) for v in args.ns.split(',') if v.strip()]
    except ValueError:
        raise ParseError('--n takes comma-separated integers')
    _, w_hat, m = _learn(args)
    cd = capacity_dispersion(w_hat)
    px = cd.caid_for(_epsilon_branch(args.eps))
    rows = []
    for n in ns:
        achievable = max_rate_achievable(w_hat, px, n, m, args.eps, args.delta, n0=args.n0,
            seed=args.seed, atom_cap=args.atom_cap)
        conv = converse_bound(w_hat, n, args.eps, m, args.delta, atom_cap=args.atom_cap)
        approx = normal_approx_rate(cd, n, args.eps, m=m, delta=args.delta if m else None)
        kappa = penalty(m, w_hat.alphabet_product, args.delta, n)
        rows.append((n, achievable, conv.rate_upper, approx.rate, kappa, approx.condition_ok))
    _write_rows(out, ('n', 'achievable_rate', 'converse_rate', 'normal_approx_rate', 'penalty',
        'condition_ok'), rows)


def build_parser():

    parser = argparse.ArgumentParser(prog='fblearn',
        description='Finite-blocklength bounds for codes learned from channel samples.')
    parser.add_argument('-v', '--verbose', action='store_true', help='log progress to stderr')
    parser.add_argument('--threads', type=int, help='worker threads; defaults to FBLEARN_THREADS')
    parser.add_argument('-o', '--output', help='write the CSV here instead of stdout')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for name, (func, names) in sorted(_commands.items()):
        sub = subparsers.add_parser(name, help=(func.__doc__ or '').strip())
        for key in names:
            flags, kwargs = _arguments[key]
            sub.add_argument(*flags, **kwargs)
        sub.set_defaults(func=func)
        for key in ('m', 'n0', 'rate', 'code_size', 'channel', 'training'):
            if key not in names:
                sub.set_defaults(**{key: None})

    return parser


def run(argv=None, stdout=None, stderr=None):
    """Run one command in-process; return the exit status."""

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    try:
        args = build_parser().parse_args(argv, namespace=RunConfig())
    except SystemExit as e:
        return e.code

    # Attached per call so that each in-process run logs to its own stderr.
    handler = logging.StreamHandler(stderr)
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    level, propagate = log.level, log.propagate
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    log.propagate = False

    threads = config.threads
    if args.threads:
        config.threads = args.threads

    try:
        if args.output:
            with open(args.output, 'w', encoding='utf-8') as out:
                args.func(args, out)
        else:
            args.func(args, stdout)
    except FblearnError as e:
        if isinstance(e, InternalError):
            log.error('%s: %s' % (type(e).__name__, e.args[0] if e.args else ''))
        stderr.write('error,%s,%s\n' % (type(e).__name__, str(e.args[0] if e.args else '').replace('\n', ' ')))
        return e.code
    finally:
        config.threads = threads
        log.removeHandler(handler)
        log.setLevel(level)
        log.propagate = propagate

    return 0


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
