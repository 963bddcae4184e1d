"""Memory-constrained Vaidya cutting-plane loop as a resumable engine.

The engine state is only the indexed polyhedron and the iteration counter; the
query point (volumetric center) is recomputed from it, which is what makes a
run replayable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .aux_lp import DualCertificate, solve_aux
from .errors import InvariantViolation
from .polyhedron import (CUBE_INDEX, Center, IndexedPolyhedron, interior_point,
                         slacks, volumetric_center)

SIGMA_MIN = 0.04
C_PROOF = 1.0 / 0.0014


def iteration_budget(delta: float, n: int, c_scale: float = 1.0,
                     sigma_min: float = SIGMA_MIN, c: float = C_PROOF) -> int:
    """Number of iterations after which the polyhedron holds no ball of radius ``delta``."""
    core = 1.4 * math.log(1.0 / delta) + 2.0 * math.log(n) + 2.0 * math.log(1.0 + 1.0 / sigma_min)
    return math.ceil(c_scale * c * n * core)


@dataclass(frozen=True)
class VaidyaParams:
    delta: float
    xi: float
    sigma_min: float = SIGMA_MIN
    c: float = C_PROOF
    c_scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.sigma_min < 1:
            raise ValueError("sigma_min must lie in (0, 1)")
        if not (0 < self.delta < 1 and 0 < self.xi < 1):
            raise ValueError("delta and xi must lie in (0, 1)")
        if not 0 < self.c_scale <= 1 or self.c <= 0:
            raise ValueError("need c > 0 and c_scale in (0, 1]")

    def budget(self, n: int) -> int:
        return iteration_budget(self.delta, n, self.c_scale, self.sigma_min, self.c)

    def max_constraints(self, n: int) -> int:
        return math.floor(n / self.sigma_min) + 1


def _ceil_to_lattice(v: float, step: float) -> float:
    q = math.ceil(v / step)
    while q * step < v:
        q += 1
    while (q - 1) * step >= v:
        q -= 1
    return q * step


def _shifted_start(poly: IndexedPolyhedron, point: np.ndarray, a: np.ndarray, b: float):
    """Cheap strictly feasible point after appending ``a.x >= b`` (last row of ``poly``)."""
    s = slacks(poly, point)[:-1]
    need = b - a @ point
    if need < 0:
        return point
    norm2 = a @ a
    if norm2 == 0:
        return None
    rates = poly.normals[:-1] @ a
    shrinking = rates < 0
    tau_max = 0.5 * np.min(s[shrinking] / -rates[shrinking]) if shrinking.any() else np.inf
    tau_need = need / norm2
    if tau_need >= tau_max:
        return None
    tau = 0.5 * (tau_need + min(tau_max, tau_need + 1.0))
    trial = point + tau * a
    return trial if np.all(slacks(poly, trial) > 0) else None


class VaidyaEngine:
    """One run of the classic loop over ``n`` coordinates.

    Call :meth:`step` with an oracle mapping the current center to a cut
    direction until :attr:`done`.  :attr:`point` is the query point for the
    current iteration.
    """

    def __init__(self, n: int, params: VaidyaParams, tol_feas: float = 1e-10):
        self.n = n
        self.params = params
        self.tol_feas = tol_feas
        self.t_max = params.budget(n)
        self.max_constraints = params.max_constraints(n)
        self.reset()

    def reset(self) -> None:
        self.poly = IndexedPolyhedron.cube(self.n)
        self.t = 0
        self.done = False
        self.status = "running"
        self.oracle_calls = 0
        self._start = np.zeros(self.n)
        self._center: Center | None = None

    def _prepare(self) -> None:
        if self._center is not None:
            return
        if self._start is None:
            start, margin = interior_point(self.poly)
            if margin <= self.tol_feas:
                self.done, self.status = True, "empty"
                return
            self._start = start
        self._center = volumetric_center(self.poly, self._start)

    @property
    def point(self) -> np.ndarray:
        self._prepare()
        if self._center is None:
            raise RuntimeError("engine has no query point (polyhedron is empty)")
        return self._center.point

    def digest(self) -> str:
        return f"{self.t}:{self.poly.digest()}"

    def step(self, oracle) -> None:
        if self.done:
            raise RuntimeError("run already finished")
        self._prepare()
        if self.done:
            return
        center = self._center
        omega, sigma = center.point, center.leverage
        p = self.params
        if sigma.min() < p.sigma_min:
            self.poly.delete(int(np.argmin(sigma)))
            self._start = omega
        else:
            outside = np.flatnonzero(np.abs(omega) > 1.0)
            if outside.size:
                j = int(outside[0])
                a = np.zeros(self.n)
                a[j] = -math.copysign(1.0, omega[j])
                b = -1.0
                self.poly.append(CUBE_INDEX, a, b)
            else:
                a = np.asarray(oracle(omega), dtype=float)
                self.oracle_calls += 1
                if a.shape != (self.n,) or np.linalg.norm(a) > 1.0 + 1e-12:
                    raise InvariantViolation("oracle response must have norm at most 1")
                v = float(a @ omega)
                b = _ceil_to_lattice(v, p.xi)
                if not (v <= b and (round(b / p.xi) - 1) * p.xi < v):
                    raise InvariantViolation("cut offset outside its rounding window")
                self.poly.append(self.t, a, b)
                if np.linalg.norm(a) <= p.delta / (2.0 * math.sqrt(self.n)):
                    self.done, self.status = True, "small"
            self._start = _shifted_start(self.poly, omega, a, b)
        self._center = None
        if len(self.poly) > self.max_constraints:
            raise InvariantViolation(f"{len(self.poly)} constraints exceed {self.max_constraints}")
        self.t += 1
        if not self.done and self.t > self.t_max:
            self.done, self.status = True, "budget"

    def run(self, oracle) -> IndexedPolyhedron:
        while not self.done:
            self.step(oracle)
        return self.poly

    def finish(self) -> DualCertificate:
        return solve_aux(self.poly)


def vaidya_run(oracle, params: VaidyaParams, n: int) -> IndexedPolyhedron:
    """Run the classic loop to completion with ``oracle`` queried at volumetric centers."""
    return VaidyaEngine(n, params).run(oracle)
