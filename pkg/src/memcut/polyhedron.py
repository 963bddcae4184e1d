"""Indexed polyhedra ``{x : a_i.x >= b_i}`` and volumetric-barrier machinery."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import CenteringFailure, DegenerateState
from .simplex import simplex

CUBE_INDEX = -1


class IndexedPolyhedron:
    """Ordered constraints ``(k, a, b)`` meaning ``a.x >= b``.

    ``k`` is the iteration that produced the cut, or -1 for cube and box cuts.
    """

    def __init__(self, indices, normals, offsets):
        self.indices = np.asarray(indices, dtype=np.int64)
        self.normals = np.array(normals, dtype=float, ndmin=2)
        self.offsets = np.asarray(offsets, dtype=float)
        if not (len(self.indices) == len(self.normals) == len(self.offsets)):
            raise ValueError("constraint arrays have mismatched lengths")

    @classmethod
    def cube(cls, n: int) -> "IndexedPolyhedron":
        """The 2n constraints of ``[-1, 1]^n`` ordered +e_1, -e_1, +e_2, ..."""
        normals = np.zeros((2 * n, n))
        for i in range(n):
            normals[2 * i, i] = 1.0
            normals[2 * i + 1, i] = -1.0
        return cls(np.full(2 * n, CUBE_INDEX), normals, np.full(2 * n, -1.0))

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def __len__(self) -> int:
        return len(self.offsets)

    def copy(self) -> "IndexedPolyhedron":
        return IndexedPolyhedron(self.indices.copy(), self.normals.copy(), self.offsets.copy())

    def append(self, k: int, a, b: float) -> None:
        self.indices = np.append(self.indices, k)
        self.normals = np.vstack([self.normals, np.asarray(a, dtype=float)])
        self.offsets = np.append(self.offsets, b)

    def delete(self, position: int) -> None:
        self.indices = np.delete(self.indices, position)
        self.normals = np.delete(self.normals, position, axis=0)
        self.offsets = np.delete(self.offsets, position)

    def digest(self) -> str:
        h = hashlib.sha256()
        for arr in (self.indices, self.normals, self.offsets):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"k": int(k), "a": a.tolist(), "b": float(b)})
            for k, a, b in zip(self.indices, self.normals, self.offsets)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, n: int) -> "IndexedPolyhedron":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not rows:
            return cls(np.zeros(0, dtype=np.int64), np.zeros((0, n)), np.zeros(0))
        return cls([r["k"] for r in rows], [r["a"] for r in rows], [r["b"] for r in rows])


def slacks(poly: IndexedPolyhedron, x) -> np.ndarray:
    return poly.normals @ np.asarray(x, dtype=float) - poly.offsets


def _scaled_rows(poly, x):
    s = slacks(poly, x)
    if np.any(s <= 0):
        raise DegenerateState("nonpositive slack")
    return poly.normals / s[:, None]


def _factor(H):
    try:
        return linalg.cho_factor(H, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise DegenerateState("singular barrier Hessian") from exc


def leverage_scores(poly: IndexedPolyhedron, x) -> np.ndarray:
    """Diagonal of ``A_x H^{-1} A_x^T`` with ``A_x = S^{-1} A`` and ``H = A_x^T A_x``."""
    Ax = _scaled_rows(poly, x)
    Z = linalg.cho_solve(_factor(Ax.T @ Ax), Ax.T, check_finite=False)
    return np.einsum("ij,ji->i", Ax, Z)


def volumetric_barrier(poly: IndexedPolyhedron, x) -> float:
    Ax = _scaled_rows(poly, x)
    sign, logdet = np.linalg.slogdet(Ax.T @ Ax)
    if sign <= 0:
        raise DegenerateState("singular barrier Hessian")
    return 0.5 * logdet


@dataclass
class Center:
    point: np.ndarray
    leverage: np.ndarray
    newton_steps: int


def _barrier_terms(poly, x):
    Ax = _scaled_rows(poly, x)
    H = Ax.T @ Ax
    cf = _factor(H)
    Z = linalg.cho_solve(cf, Ax.T, check_finite=False)
    P = Ax @ Z
    sigma = np.diag(P).copy()
    logdet = 2.0 * np.log(np.diag(cf[0])).sum()
    return Ax, P, sigma, 0.5 * logdet


def volumetric_center(poly: IndexedPolyhedron, start, tol: float = 1e-8,
                      max_iter: int = 200, floor_tol: float = 1e-3) -> Center:
    """Minimize the volumetric barrier from a strictly feasible ``start``.

    Newton's method on the exact Hessian ``A_x^T (3 Sigma - 2 P*P) A_x`` with
    backtracking; stops once ``||grad||`` in the ``Q^{-1}`` norm is below ``tol``,
    where ``Q = A_x^T Sigma A_x``.  If rounding stops progress first, a point
    whose norm is below ``floor_tol`` is accepted.
    """
    x = np.array(start, dtype=float)
    Ax, P, sigma, value = _barrier_terms(poly, x)
    best, stalled = np.inf, 0
    for it in range(max_iter + 1):
        grad = -Ax.T @ sigma
        Q = Ax.T @ (sigma[:, None] * Ax)
        q_norm2 = grad @ linalg.solve(Q, grad, assume_a="pos", check_finite=False)
        if q_norm2 <= tol * tol:
            return Center(x, sigma, it)
        # thin polyhedra hit a rounding floor above tol; accept once progress stops
        stalled = stalled + 1 if value >= best - 1e-13 * max(1.0, abs(best)) else 0
        best = min(best, value)
        if stalled >= 3 and q_norm2 <= floor_tol * floor_tol:
            return Center(x, sigma, it)
        if it == max_iter:
            break
        hess = 3.0 * Q - 2.0 * Ax.T @ (P * P) @ Ax
        step = -linalg.solve(hess, grad, assume_a="pos", check_finite=False)
        decrement2 = -grad @ step
        alpha = 1.0
        while True:
            trial = x + alpha * step
            if np.all(slacks(poly, trial) > 0):
                try:
                    terms = _barrier_terms(poly, trial)
                except DegenerateState:
                    terms = None
                if terms is not None and (decrement2 < 1e-14
                                          or terms[3] <= value - 0.25 * alpha * decrement2):
                    break
            alpha *= 0.5
            if alpha < 1e-20:
                raise CenteringFailure("line search stalled")
        x = trial
        Ax, P, sigma, value = terms
    raise CenteringFailure(f"no convergence after {max_iter} Newton steps")


def interior_point(poly: IndexedPolyhedron) -> tuple[np.ndarray, float]:
    """Point maximizing the smallest slack (capped at 1), with that slack.

    Phase-I LP: maximize r subject to ``A x - r >= b`` and ``r <= 1``.
    """
    m, n = poly.normals.shape
    A = poly.normals
    # variables: x+ (n), x- (n), r+, r-, surplus (m), w
    nv = 2 * n + 2 + m + 1
    E = np.zeros((m + 1, nv))
    E[:m, :n] = A
    E[:m, n:2 * n] = -A
    E[:m, 2 * n] = -1.0
    E[:m, 2 * n + 1] = 1.0
    E[:m, 2 * n + 2:2 * n + 2 + m] = -np.eye(m)
    E[m, 2 * n] = 1.0
    E[m, 2 * n + 1] = -1.0
    E[m, -1] = 1.0
    rhs = np.append(poly.offsets, 1.0)
    cost = np.zeros(nv)
    cost[2 * n] = -1.0
    cost[2 * n + 1] = 1.0
    res = simplex(cost, E, rhs)
    x = res.x[:n] - res.x[n:2 * n]
    return x, float(slacks(poly, x).min()) if m else 1.0


def is_empty(poly: IndexedPolyhedron, tol: float = 1e-10) -> bool:
    """True when the polyhedron has no point with all slacks above ``tol``."""
    return interior_point(poly)[1] <= tol
