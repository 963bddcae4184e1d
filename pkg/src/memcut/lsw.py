"""Regularized cutting-plane engine built on the hybrid barrier

    p(x) = -c_e sum_i ln s_i(x) + 1/2 ln det(A_x^T A_x + lam I) + lam/2 ||x||^2

with ``A_x = S^{-1} A``.  The iterate is kept near the minimizer of ``p`` and each
new cut is placed at a fixed fraction of the local ellipsoid width from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .aux_lp import DualCertificate
from .errors import (CenteringFailure, CenteringPreconditionError, CertificateError,
                     DegenerateState, InvariantViolation)
from .polyhedron import CUBE_INDEX, IndexedPolyhedron, slacks


@dataclass(frozen=True)
class LswParams:
    c_e: float = 1.0
    c_d: float = 1e-2
    c_a: float = 1e2
    c_delta: float = 1e-1
    lam: float = 1.0
    centering_iters: int = 270
    final_iters_scale: float = 64.0

    def __post_init__(self):
        if min(self.c_e, self.c_d, self.c_a, self.c_delta, self.lam) <= 0:
            raise ValueError("engine constants must be positive")
        if not self.c_d < self.c_e + 1:
            raise ValueError("deletion threshold must stay below c_e + 1")
        if self.centering_iters < 270:
            raise ValueError("centering needs at least 270 steps")


@dataclass
class HybridTerms:
    s: np.ndarray
    Ax: np.ndarray
    psi: np.ndarray
    grad: np.ndarray
    Q: np.ndarray
    value: float


def hybrid_terms(poly: IndexedPolyhedron, x, params: LswParams) -> HybridTerms:
    x = np.asarray(x, dtype=float)
    s = slacks(poly, x)
    if np.any(s <= 0):
        raise DegenerateState("nonpositive slack")
    Ax = poly.normals / s[:, None]
    M = Ax.T @ Ax + params.lam * np.eye(poly.dim)
    cf = linalg.cho_factor(M, lower=True, check_finite=False)
    Z = linalg.cho_solve(cf, Ax.T, check_finite=False)
    psi = np.einsum("ij,ji->i", Ax, Z)
    weights = params.c_e + psi
    grad = -Ax.T @ weights + params.lam * x
    Q = Ax.T @ (weights[:, None] * Ax) + params.lam * np.eye(poly.dim)
    value = (-params.c_e * np.log(s).sum() + np.log(np.diag(cf[0])).sum()
             + 0.5 * params.lam * x @ x)
    return HybridTerms(s, Ax, psi, grad, Q, float(value))


def reg_leverage(poly, x, lam: float) -> np.ndarray:
    return hybrid_terms(poly, x, LswParams(lam=lam)).psi


def hybrid_gradient(poly, x, params: LswParams) -> np.ndarray:
    return hybrid_terms(poly, x, params).grad


def q_matrix(poly, x, params: LswParams) -> np.ndarray:
    return hybrid_terms(poly, x, params).Q


def _dual_norm(cf, v) -> float:
    return math.sqrt(max(float(v @ linalg.cho_solve(cf, v, check_finite=False)), 0.0))


def entry_radius(terms: HybridTerms, params: LswParams) -> float:
    """Largest gradient norm from which the fixed-matrix centering may start."""
    return 0.01 * math.sqrt(params.c_e + terms.psi.min())


def centering(poly: IndexedPolyhedron, x0, r: int, params: LswParams,
              history: list | None = None) -> np.ndarray:
    """Gradient steps of length 1/8 preconditioned by the frozen ``Q(x0)``.

    Stops once the gradient's ``Q(x0)^{-1}`` norm is below ``2 (1 - 1/64)^r eta``.
    ``history`` collects those norms when given.
    """
    x0 = np.asarray(x0, dtype=float)
    terms = hybrid_terms(poly, x0, params)
    eta = entry_radius(terms, params)
    cf = linalg.cho_factor(terms.Q, lower=True, check_finite=False)
    norm = _dual_norm(cf, terms.grad)
    if norm > eta * (1 + 1e-9):
        raise CenteringPreconditionError(f"gradient norm {norm:.3g} exceeds entry radius {eta:.3g}")
    stop = 2.0 * (1.0 - 1.0 / 64.0) ** r * eta
    s0 = terms.s
    x = x0
    for _ in range(r):
        if history is not None:
            history.append(norm)
        if norm <= stop:
            break
        x = x - 0.125 * linalg.cho_solve(cf, terms.grad, check_finite=False)
        s = slacks(poly, x)
        if np.linalg.norm((s - s0) / s0) > 0.1:
            raise InvariantViolation("centering iterate left the slack neighbourhood")
        terms = hybrid_terms(poly, x, params)
        norm = _dual_norm(cf, terms.grad)
    return x


def precenter(poly: IndexedPolyhedron, x, params: LswParams, max_iter: int = 500) -> np.ndarray:
    """Damped Newton steps with ``Q(x)`` until the centering entry condition holds."""
    x = np.asarray(x, dtype=float)
    terms = hybrid_terms(poly, x, params)
    for _ in range(max_iter):
        cf = linalg.cho_factor(terms.Q, lower=True, check_finite=False)
        direction = -linalg.cho_solve(cf, terms.grad, check_finite=False)
        decrement2 = -terms.grad @ direction
        if math.sqrt(max(decrement2, 0.0)) <= 0.5 * entry_radius(terms, params):
            return x
        alpha = 1.0
        while True:
            trial = x + alpha * direction
            if np.all(slacks(poly, trial) > 0):
                trial_terms = hybrid_terms(poly, trial, params)
                if trial_terms.value <= terms.value - 0.25 * alpha * decrement2:
                    break
            alpha *= 0.5
            if alpha < 1e-20:
                raise CenteringFailure("line search stalled while recentring")
        x, terms = trial, trial_terms
    raise CenteringFailure(f"entry condition not reached in {max_iter} steps")


def recenter(poly, x, params: LswParams, r: int) -> np.ndarray:
    return centering(poly, precenter(poly, x, params), r, params)


class LswEngine:
    """Resumable regularized cutting-plane run over ``n`` coordinates.

    The run ends when some slack at the iterate drops below ``2 * eps``, when the
    oracle returns a cut too short to matter, or after ``t_max`` iterations.
    """

    def __init__(self, n: int, eps: float, params: LswParams | None = None,
                 t_max: int | None = None):
        self.n = n
        self.eps = eps
        self.params = params or LswParams()
        self.t_max = t_max
        self.small_norm = eps / (2.0 * math.sqrt(n) + 1.0 / math.sqrt(self.params.c_a * self.params.lam))
        self.reset()

    def reset(self) -> None:
        self.poly = IndexedPolyhedron.cube(self.n)
        self.x = np.zeros(self.n)
        self.t = 0
        self.done = False
        self.status = "running"
        self.oracle_calls = 0
        self.final_point = None
        self._check_exit()

    @property
    def point(self) -> np.ndarray:
        return self.x

    def digest(self) -> str:
        return f"{self.t}:{self.poly.digest()}:{self.x.tobytes().hex()}"

    def _check_exit(self) -> None:
        if slacks(self.poly, self.x).min() < 2.0 * self.eps:
            self.done, self.status = True, "slack"

    def step(self, oracle) -> None:
        if self.done:
            raise RuntimeError("run already finished")
        p = self.params
        terms = hybrid_terms(self.poly, self.x, p)
        if terms.psi.min() <= p.c_d:
            self.poly.delete(int(np.argmin(terms.psi)))
        else:
            outside = np.flatnonzero(np.abs(self.x) > 1.0)
            if outside.size:
                j = int(outside[0])
                a = np.zeros(self.n)
                a[j] = -math.copysign(1.0, self.x[j])
                k = CUBE_INDEX
            else:
                a = np.asarray(oracle(self.x), dtype=float)
                self.oracle_calls += 1
                if a.shape != (self.n,) or np.linalg.norm(a) > 1.0 + 1e-12:
                    raise InvariantViolation("oracle response must have norm at most 1")
                k = self.t
            M = self.poly.normals.T @ (self.poly.normals / terms.s[:, None] ** 2) + p.lam * np.eye(self.n)
            width = math.sqrt(max(float(a @ linalg.solve(M, a, assume_a="pos")), 0.0))
            self.poly.append(k, a, float(a @ self.x) - width / math.sqrt(p.c_a))
            if k != CUBE_INDEX and np.linalg.norm(a) <= self.small_norm:
                self.done, self.status = True, "small"
        if not self.done:
            self.x = recenter(self.poly, self.x, p, p.centering_iters)
            if np.linalg.norm(self.x) > 3.0 * math.sqrt(self.n):
                raise InvariantViolation("iterate left the 3 sqrt(n) ball")
        self.t += 1
        if not self.done:
            self._check_exit()
        if not self.done and self.t_max is not None and self.t > self.t_max:
            self.done, self.status = True, "budget"

    def run(self, oracle) -> tuple[IndexedPolyhedron, np.ndarray]:
        while not self.done:
            self.step(oracle)
        return self.poly, self.x

    def finish(self) -> DualCertificate:
        """Certificate weights ``(c_e + psi_i) / s_i`` at a final, tighter center."""
        if self.status == "small":
            weights = np.zeros(len(self.poly))
            weights[-1] = 1.0
            self.final_point = self.x.copy()
        else:
            r = max(1, math.ceil(self.params.final_iters_scale * math.log(2.0 / self.eps)))
            self.final_point = centering(self.poly, self.x, r, self.params)
            terms = hybrid_terms(self.poly, self.final_point, self.params)
            raw = (self.params.c_e + terms.psi) / terms.s
            weights = raw / raw.sum()
        value = float(weights @ slacks(self.poly, self.final_point))
        return DualCertificate(weights, self.poly.indices.copy(), value)


def lsw_cutting_plane(oracle, eps: float, params: LswParams | None = None, n: int = 1,
                      t_max: int | None = None) -> tuple[IndexedPolyhedron, np.ndarray]:
    return LswEngine(n, eps, params, t_max).run(oracle)


@dataclass
class CertifiedResult:
    poly: IndexedPolyhedron
    point: np.ndarray
    weights: np.ndarray
    combination_norm: float
    slack_gap: float


def certificate_magnitudes(poly: IndexedPolyhedron, point, weights) -> tuple[float, float]:
    """``||sum_i w_i a_i||`` and ``sum_i w_i s_i(point)``."""
    return (float(np.linalg.norm(poly.normals.T @ weights)),
            float(weights @ slacks(poly, point)))


def certified_solve(oracle, eps: float, params: LswParams | None = None, n: int = 1,
                    t_max: int | None = None, k1: float | None = None,
                    k2: float | None = None) -> CertifiedResult:
    """Run the engine, recentre tightly and return simplex weights over the cuts.

    When ``k1``/``k2`` are given, the two certificate magnitudes are checked
    against ``k1 eps sqrt(n) ln(n/eps)`` and ``k2 n eps ln(n/eps)``.
    """
    engine = LswEngine(n, eps, params, t_max)
    engine.run(oracle)
    cert = engine.finish()
    x = engine.final_point
    if np.any(slacks(engine.poly, x) <= 0):
        raise CertificateError("final point is infeasible")
    if np.linalg.norm(x) > 3.0 * math.sqrt(n):
        raise CertificateError("final point outside the 3 sqrt(n) ball")
    combo, gap = certificate_magnitudes(engine.poly, x, cert.weights)
    scale = eps * math.log(max(n, 2) / eps)
    if k1 is not None and combo > k1 * math.sqrt(n) * scale:
        raise CertificateError(f"||sum w a|| = {combo:.3g} exceeds {k1} eps sqrt(n) ln(n/eps)")
    if k2 is not None and gap > k2 * n * scale:
        raise CertificateError(f"sum w s = {gap:.3g} exceeds {k2} n eps ln(n/eps)")
    return CertifiedResult(engine.poly, x, cert.weights, combo, gap)
