from pprint import pprint, pformat
import io
import itertools
import math
import os
import tempfile

import numpy as np
from scipy.optimize import brentq

from fblearn import *
from fblearn import rng
from fblearn.achievability import *
from fblearn.asymptotics import *
from fblearn.capacity import *
from fblearn.channel import *
from fblearn.cli import parse_channel_file, parse_training_file, run
from fblearn.codesim import *
from fblearn.config import config
from fblearn.converse import *
from fblearn.density import *
from fblearn.exceptions import *
from fblearn.families import *
from fblearn.learning import *
from fblearn.simplex import linprog


def binary_entropy(p):
    if p in (0, 1):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc_capacity(p):
    return 1.0 - binary_entropy(p)


def bsc_dispersion(p):
    return p * (1 - p) * math.log2((1 - p) / p) ** 2


def binary_channel(a, b):
    """``0 -> 1`` with probability ``a``, ``1 -> 0`` with probability ``b``."""
    return Dmc([[1 - a, a], [b, 1 - b]])


def mixed_caid_channel():
    """Four inputs, four outputs, capacity 1/2, and CAIDs with different dispersions.

    Rows ``u``, ``u'`` mix to uniform, as do ``w``, ``w'``; every row has
    entropy 3/2 bits, so every mixture reaching the uniform output achieves
    capacity.

    """
    p = brentq(lambda t: binary_entropy(t) - 0.5, 1e-3, 0.5, xtol=1e-15)
    a = p / 2
    b = 0.5 - a
    return Dmc([
        [0.5, 0.25, 0.25, 0.0],
        [0.0, 0.25, 0.25, 0.5],
        [a, a, b, b],
        [b, b, a, a],
    ])


def brute_rcu_term(w, px, n0, log_a):
    """``E[min(1, 2**(log_a - i))]`` by enumerating every ``(x^n0, y^n0)``."""
    t = w.transition
    p = px.mass
    py = p @ t
    total = 0.0
    for xs in itertools.product(range(w.num_inputs), repeat=n0):
        for ys in itertools.product(range(w.num_outputs), repeat=n0):
            prob = 1.0
            for x, y in zip(xs, ys):
                prob *= p[x] * t[x, y]
            if prob == 0:
                continue
            i = sum(math.log2(t[x, y] / py[y]) for x, y in zip(xs, ys))
            total += prob * min(1.0, 2.0 ** (log_a - i))
    return total


def product_pairs(w, px, qy, n):
    """``(P, Q)`` of every ``(x^n, y^n)`` with ``P = (px W)^n``, ``Q = (px qy)^n``."""
    t = w.transition
    out = []
    for xs in itertools.product(range(w.num_inputs), repeat=n):
        for ys in itertools.product(range(w.num_outputs), repeat=n):
            p = q = 1.0
            for x, y in zip(xs, ys):
                p *= px.mass[x] * t[x, y]
                q *= px.mass[x] * qy.mass[y]
            if p > 0:
                out.append((p, q))
    return out


def string_pairs(w, qy, xs):
    """``(P, Q)`` of every ``y^n`` for a fixed input string."""
    t = w.transition
    out = []
    for ys in itertools.product(range(w.num_outputs), repeat=len(xs)):
        p = q = 1.0
        for x, y in zip(xs, ys):
            p *= t[x, y]
            q *= qy.mass[y]
        if p > 0:
            out.append((p, q))
    return out


def brute_beta(pairs, alpha):
    """Neyman-Pearson beta by filling the likelihood ratio order greedily."""
    pairs = sorted(pairs, key=lambda pq: -math.log2(pq[0] / pq[1]))
    beta = 0.0
    left = alpha
    for p, q in pairs:
        if left <= 0:
            break
        take = min(1.0, left / p)
        beta += take * q
        left -= take * p
    return beta


def brute_min_string_beta(w, qy, n, alpha):
    return min(brute_beta(string_pairs(w, qy, xs), alpha)
        for xs in itertools.product(range(w.num_inputs), repeat=n))


def vertex_extremes(w, caod, support, values):
    """Min and max of ``values . px`` over the CAID polytope, by enumerating vertices."""
    t = w.transition
    found = []
    for size in range(1, len(support) + 1):
        for subset in itertools.combinations(support, size):
            s = list(subset)
            a = np.vstack([t[s].T, np.ones((1, len(s)))])
            b = np.concatenate([caod.mass, [1.0]])
            p, _, _, _ = np.linalg.lstsq(a, b, rcond=None)
            if np.max(np.abs(a @ p - b)) < 1e-9 and np.min(p) > -1e-12:
                found.append(float(np.dot(values[s], p)))
    return min(found), max(found)


def brute_decoder_error(w_true, w_hat, book, tie_break='lowest'):
    """Average error of :func:`empirical_ml_decode`, by enumerating messages and outputs."""
    t = w_true.transition
    total = 0.0
    for message in range(book.effective_m):
        xs = book.encode(message)
        for ys in itertools.product(range(w_true.num_outputs), repeat=book.effective_n):
            prob = 1.0
            for x, y in zip(xs, ys):
                prob *= t[x, y]
            if prob and empirical_ml_decode(w_hat, book, ys, tie_break) != message:
                total += prob
    return total / book.effective_m


def run_cli(*argv):
    """Run the command line in-process; return ``(status, stdout, stderr)``."""
    out = io.StringIO()
    err = io.StringIO()
    status = run(list(argv), stdout=out, stderr=err)
    return status, out.getvalue(), err.getvalue()


def read_pairs(text):
    """``quantity,value`` CSV as a dict of strings."""
    lines = text.strip().splitlines()
    assert lines[0] == 'quantity,value', lines[0]
    return dict(line.split(',', 1) for line in lines[1:])
