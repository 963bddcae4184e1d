"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Small problems only: the tableau is a dense array and every pivot touches all
of it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPInfeasible(Exception):
    """The equality system has no nonnegative solution."""


class LPUnbounded(Exception):
    """The objective decreases without bound on the feasible set."""


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    pivots: int


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])


def _run(T, basis, ncols, tol, max_pivots):
    """Minimize the cost row T[-1] over the first ``ncols`` columns."""
    pivots = 0
    while True:
        reduced = T[-1, :ncols]
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            return pivots
        col = int(candidates[0])
        column = T[:-1, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise LPUnbounded
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit reached")


def simplex(c, A_eq, b_eq, tol: float = 1e-11, max_pivots: int = 50_000) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_eq @ x == b_eq`` and ``x >= 0``."""
    c = np.asarray(c, dtype=float)
    A = np.array(A_eq, dtype=float, ndmin=2)
    b = np.array(b_eq, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase one: artificial basis, minimize the sum of artificials
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    pivots = _run(T, basis, n + m, tol, max_pivots)
    if -T[-1, -1] > 1e-9 * max(1.0, np.abs(b).max(initial=0.0)):
        raise LPInfeasible

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cols = np.flatnonzero(np.abs(T[r, :n]) > 1e-9)
            if cols.size == 0:
                continue
            _pivot(T, r, int(cols[0]))
            basis[r] = int(cols[0])
            pivots += 1
        keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros(n + 1)])
    basis = [basis[r] for r in keep]

    # phase two
    T[-1, :n] = c
    for r, j in enumerate(basis):
        T[-1] -= c[j] * T[r]
    pivots += _run(T, basis, n, tol, max_pivots)
    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = max(T[r, -1], 0.0)
    return LPResult(x=x, fun=float(c @ x), pivots=pivots)
