"""A small dense two-phase simplex, for linear programs of a few dozen variables.

Solves::

    minimize (or maximize)  c . x
    subject to              a_eq x == b_eq
                            a_ub x <= b_ub
                            x >= 0

Pivots follow Bland's rule, so the method never cycles.

"""

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleLp, NotConverged, UnboundedLp


log = logging.getLogger('fblearn')


#: Entries smaller than this are treated as zero when choosing pivots.
PIVOT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LpResult(object):

    x: np.ndarray
    value: float
    iterations: int


def _pivot(table, row, col):
    table[row] /= table[row, col]
    factor = table[:, col].copy()
    factor[row] = 0.0
    table -= np.outer(factor, table[row])


def _iterate(table, basis, allowed, max_iter, tol):
    """Run simplex pivots on ``table`` until optimal; return the pivot count."""

    rows = len(basis)
    for iteration in range(max_iter):

        costs = table[-1, :allowed]
        entering = np.flatnonzero(costs < -tol)
        if not entering.size:
            return iteration
        col = int(entering[0])

        column = table[:rows, col]
        positive = np.flatnonzero(column > tol)
        if not positive.size:
            raise UnboundedLp('objective is unbounded along variable %d' % col)

        ratios = table[positive, -1] / column[positive]
        best = ratios.min()
        ties = positive[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))

        _pivot(table, row, col)
        basis[row] = col

    raise NotConverged('simplex did not finish in %d pivots' % max_iter)


def linprog(c, a_eq=None, b_eq=None, a_ub=None, b_ub=None, maximize=False,
    feasibility=1e-9, tol=PIVOT_TOLERANCE, max_iter=10000):
    """Solve a linear program over the nonnegative orthant.

    :raises InfeasibleLp: If no ``x >= 0`` meets the constraints within
        ``feasibility``.
    :raises UnboundedLp: If the objective is unbounded.

    """

    c = np.asarray(c, dtype=float)
    n = c.size

    blocks = []
    rhs = []
    slacks = 0
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        slacks = a_ub.shape[0]
        blocks.append(np.hstack([a_ub, np.eye(slacks)]))
        rhs.append(np.asarray(b_ub, dtype=float))
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        blocks.append(np.hstack([a_eq, np.zeros((a_eq.shape[0], slacks))]))
        rhs.append(np.asarray(b_eq, dtype=float))
    if not blocks:
        raise InfeasibleLp('linear program has no constraints')

    a = np.vstack(blocks)
    b = np.concatenate(rhs)
    flip = b < 0
    a[flip] *= -1
    b[flip] *= -1

    rows, cols = a.shape
    cost = np.concatenate([-c if maximize else c, np.zeros(slacks)])

    # Phase one; an artificial variable on every row.
    table = np.zeros((rows + 1, cols + rows + 1))
    table[:rows, :cols] = a
    table[:rows, cols:cols + rows] = np.eye(rows)
    table[:rows, -1] = b
    table[-1, cols:cols + rows] = 1.0
    table[-1] -= table[:rows].sum(axis=0)
    basis = list(range(cols, cols + rows))

    pivots = _iterate(table, basis, cols + rows, max_iter, tol)
    residual = -table[-1, -1]
    if residual > feasibility:
        raise InfeasibleLp('constraints are infeasible; residual %.3g' % residual)

    # Drive artificials out of the basis, dropping redundant rows.
    keep = []
    for i in range(rows):
        if basis[i] >= cols:
            candidates = np.flatnonzero(np.abs(table[i, :cols]) > tol)
            if not candidates.size:
                continue
            _pivot(table, i, int(candidates[0]))
            basis[i] = int(candidates[0])
        keep.append(i)

    # Phase two, on the original objective.
    table = np.vstack([
        np.hstack([table[keep, :cols], table[keep, -1:]]),
        np.zeros((1, cols + 1)),
    ])
    basis = [basis[i] for i in keep]
    table[-1, :cols] = cost
    for i, j in enumerate(basis):
        table[-1] -= cost[j] * table[i]

    pivots += _iterate(table, basis, cols, max_iter, tol)

    x = np.zeros(cols)
    for i, j in enumerate(basis):
        x[j] = table[i, -1]
    x = np.maximum(x[:n], 0.0)
    log.debug('linprog(%d vars, %d rows) -> %d pivots' % (n, rows, pivots))
    return LpResult(x, float(np.dot(c, x)), pivots)
