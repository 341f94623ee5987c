from unittest import TestCase as BaseTestCase
import math

import numpy as np


class TestCase(BaseTestCase):

    """Extensions to :class:`python:unittest.TestCase` which understand
    distributions, pmfs and noisy estimates.

    """

    def assertDistAlmostEqual(self, a, b, places=None, delta=1e-9, msg=None):
        """Assert that two distributions (or plain vectors) agree entrywise.

        Accepts :class:`~fblearn.channel.Dist` objects or anything numpy can
        turn into a vector.

        """
        a = np.asarray(getattr(a, 'mass', a), dtype=float)
        b = np.asarray(getattr(b, 'mass', b), dtype=float)
        if a.shape != b.shape:
            self.fail(msg or 'shapes do not match; %r != %r' % (a.shape, b.shape))
            return
        tol = 10.0 ** -places if places is not None else delta
        worst = float(np.max(np.abs(a - b))) if a.size else 0.0
        if worst > tol:
            self.fail(msg or 'distributions differ by %.3g > %.3g; %r != %r' % (worst, tol, a, b))

    def assertPmfAlmostEqual(self, a, b, delta=1e-9, msg=None):
        """Assert that two :class:`~fblearn.density.SparsePmf` have the same atoms.

        ``b`` may also be a list of ``(value, p_mass)`` or
        ``(value, p_mass, q_mass)`` tuples.

        """
        def atoms(x):
            if hasattr(x, 'atoms'):
                return [tuple(t) for t in x.atoms]
            return sorted(tuple(t) for t in x)

        aa, bb = atoms(a), atoms(b)
        errors = []
        if len(aa) != len(bb):
            errors.append('atom counts differ; %d != %d' % (len(aa), len(bb)))
        else:
            for i, (x, y) in enumerate(zip(aa, bb)):
                for j, (u, v) in enumerate(zip(x, y)):
                    if abs(u - v) > delta:
                        errors.append('atom %d field %d: %r != %r' % (i, j, u, v))
        if errors:
            self.fail(msg or '; '.join(errors))

    def assertWithinSigma(self, estimate, expected, sigma, k=3.0, msg=None):
        """Assert that a noisy ``estimate`` is within ``k`` standard errors of ``expected``."""
        if not abs(estimate - expected) <= k * sigma:
            self.fail(msg or '%r is %.3g sigma from %r (sigma=%.3g)' % (
                estimate, abs(estimate - expected) / sigma if sigma else math.inf, expected, sigma))

    def assertNondecreasing(self, values, tol=1e-12, msg=None):
        values = list(values)
        for i in range(1, len(values)):
            if values[i] < values[i - 1] - tol:
                self.fail(msg or 'decreases at %d; %r > %r' % (i, values[i - 1], values[i]))

    def assertNonincreasing(self, values, tol=1e-12, msg=None):
        values = list(values)
        for i in range(1, len(values)):
            if values[i] > values[i - 1] + tol:
                self.fail(msg or 'increases at %d; %r < %r' % (i, values[i - 1], values[i]))

    def assertConvex(self, xs, ys, tol=1e-12, msg=None):
        """Assert that the points ``(xs, ys)``, sorted by ``x``, lie on a convex curve."""
        pts = sorted(zip(xs, ys))
        for (x0, y0), (x1, y1), (x2, y2) in zip(pts, pts[1:], pts[2:]):
            if x2 == x0:
                continue
            chord = y0 + (y2 - y0) * (x1 - x0) / (x2 - x0)
            if y1 > chord + tol:
                self.fail(msg or 'not convex at x=%r; %r above chord %r' % (x1, y1, chord))
