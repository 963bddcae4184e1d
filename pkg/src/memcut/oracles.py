"""Deterministic separation oracles, instance generators and the counting wrapper.

A separation oracle maps a query point of ``[-1, 1]^d`` either to ``SUCCESS`` or
to a direction ``g`` with ``g.x < g.z`` for every ``z`` in the target set.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO, Union

import numpy as np

from .geometry import discretize
from .simplex import simplex


class _Success:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "SUCCESS"


SUCCESS = _Success()
Response = Union[_Success, np.ndarray]


class FeasiblePointFound(Exception):
    """Raised through every recursion level once the oracle accepts a query."""

    def __init__(self, point):
        super().__init__("feasible point found")
        self.point = np.asarray(point, dtype=float)


def _check_query(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (d,) or not np.all(np.isfinite(x)):
        raise ValueError(f"query must be a finite vector of length {d}")
    if np.any(np.abs(x) > 1.0):
        raise ValueError("query lies outside [-1, 1]^d")
    return x


def _unit(g: np.ndarray) -> np.ndarray:
    return g / np.linalg.norm(g)


def minimize_max_affine(G: np.ndarray, h: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimize ``max_i (G_i . x + h_i)`` over ``[-1, 1]^d`` as an LP."""
    G = np.atleast_2d(G)
    N, d = G.shape
    # x = u - 1 with 0 <= u <= 2; t = t+ - t-; variables u, box slack, t+, t-, row slack
    nv = 2 * d + 2 + N
    E = np.zeros((N + d, nv))
    E[:N, :d] = G
    E[:N, 2 * d] = -1.0
    E[:N, 2 * d + 1] = 1.0
    E[:N, 2 * d + 2:] = np.eye(N)
    E[N:, :d] = np.eye(d)
    E[N:, d:2 * d] = np.eye(d)
    rhs = np.concatenate([G.sum(axis=1) - h, np.full(d, 2.0)])
    cost = np.zeros(nv)
    cost[2 * d], cost[2 * d + 1] = 1.0, -1.0
    res = simplex(cost, E, rhs)
    x = np.clip(res.x[:d] - 1.0, -1.0, 1.0)
    return float(np.max(G @ x + h)), x


@dataclass
class BallInstance:
    """Target set is the Euclidean ball of radius ``eps`` around a hidden center."""

    center: np.ndarray
    eps: float
    seed: Optional[int] = None

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        if np.any(np.abs(self.center) > 1.0 - self.eps + 1e-15):
            raise ValueError("ball must lie inside the cube")

    kind = "ball"

    @classmethod
    def generate(cls, d: int, eps: float, seed: int) -> "BallInstance":
        rng = np.random.default_rng(seed)
        return cls(rng.uniform(-1.0 + eps, 1.0 - eps, size=d), eps, seed)

    @property
    def d(self) -> int:
        return self.center.size

    @property
    def witness(self) -> np.ndarray:
        return self.center

    def direction(self, x) -> np.ndarray:
        """Unit vector from ``x`` toward the center, with no success test."""
        diff = self.center - np.asarray(x, dtype=float)
        norm = np.linalg.norm(diff)
        return diff / norm if norm > 0 else np.zeros_like(diff)

    def __call__(self, x) -> Response:
        x = _check_query(x, self.d)
        if np.linalg.norm(x - self.center) <= self.eps:
            return SUCCESS
        return _unit(self.center - x)

    def params(self) -> dict:
        return {}


@dataclass
class LipschitzInstance:
    """Minimize a convex 1-Lipschitz ``f`` to accuracy ``eps`` through a feasibility oracle.

    Success when the subgradient is shorter than ``eps / (2 sqrt(d))`` or, if the
    minimum value is known, when ``f(x) <= f_min + eps``.
    """

    f: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]
    d: int
    eps: float
    f_min: Optional[float] = None
    seed: Optional[int] = None
    pieces: int = 0

    kind = "lipschitz"

    @classmethod
    def max_affine(cls, d: int, eps: float, seed: int, pieces: Optional[int] = None):
        """``f(x) = max_i w_i.(x - c)`` with unit normals ``w_i`` and ``c`` inside the cube."""
        pieces = pieces or 2 * d
        rng = np.random.default_rng(seed)
        W = rng.standard_normal((pieces, d))
        W /= np.linalg.norm(W, axis=1, keepdims=True)
        c = rng.uniform(-1.0 + eps, 1.0 - eps, size=d)
        h = -W @ c

        def f(x):
            return float(np.max(W @ x + h))

        def subgradient(x):
            return W[int(np.argmax(W @ x + h))].copy()

        f_min, _ = minimize_max_affine(W, h)
        return cls(f, subgradient, d, eps, f_min, seed, pieces)

    def __call__(self, x) -> Response:
        x = _check_query(x, self.d)
        g = np.asarray(self.subgradient(x), dtype=float)
        if not np.all(np.isfinite(g)):
            raise ValueError("instance produced a non-finite subgradient")
        norm = np.linalg.norm(g)
        if norm <= self.eps / (2.0 * math.sqrt(self.d)):
            return SUCCESS
        if self.f_min is not None and self.f(x) <= self.f_min + self.eps:
            return SUCCESS
        return -g / norm

    def params(self) -> dict:
        return {"pieces": self.pieces}


@dataclass
class HardInstance:
    """``f(x) = max(||A x||_inf - mu, mu * max_i (v_i.x - i*gamma))`` with a known minimum."""

    A: np.ndarray
    v: np.ndarray
    gamma: float
    mu: float
    eps: float
    seed: Optional[int] = None
    f_min: float = field(init=False)

    kind = "hard"

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.v = np.atleast_2d(np.asarray(self.v, dtype=float))
        if self.v.shape[0] > self.v.shape[1]:
            raise ValueError("need at most d chain vectors")
        G, h = self._pieces()
        self.f_min, _ = minimize_max_affine(G, h)

    @classmethod
    def generate(cls, d: int, eps: float, seed: int, n_vectors: Optional[int] = None,
                 gamma: Optional[float] = None, mu: float = 0.5) -> "HardInstance":
        rng = np.random.default_rng(seed)
        n_vectors = n_vectors or max(1, d // 2)
        gamma = gamma if gamma is not None else 1.0 / (4 * n_vectors)
        A = rng.choice([-1.0, 1.0], size=(max(1, d // 2), d)) / math.sqrt(d)
        v = rng.choice([-1.0, 1.0], size=(n_vectors, d)) / math.sqrt(d)
        return cls(A, v, gamma, mu, eps, seed)

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def _pieces(self):
        # wall rows +A_j, -A_j then chain rows; argmax over this order is the tie-break
        rows = []
        for a in self.A:
            rows.extend([a, -a])
        N = self.v.shape[0]
        G = np.vstack(rows + [self.mu * self.v])
        h = np.concatenate([np.full(2 * len(self.A), -self.mu),
                            -self.mu * self.gamma * np.arange(1, N + 1)])
        return G, h

    def value(self, x) -> float:
        G, h = self._pieces()
        return float(np.max(G @ np.asarray(x, dtype=float) + h))

    def subgradient(self, x) -> np.ndarray:
        G, h = self._pieces()
        return G[int(np.argmax(G @ np.asarray(x, dtype=float) + h))].copy()

    def __call__(self, x) -> Response:
        x = _check_query(x, self.d)
        if self.value(x) <= self.f_min + self.eps:
            return SUCCESS
        return _unit(-self.subgradient(x))

    def params(self) -> dict:
        return {"n_vectors": int(self.v.shape[0]), "gamma": self.gamma, "mu": self.mu}


INSTANCE_KINDS = ("ball", "lipschitz", "hard")


def make_instance(kind: str, d: int, eps: float, seed: int, **params):
    if kind == "ball":
        return BallInstance.generate(d, eps, seed)
    if kind == "lipschitz":
        return LipschitzInstance.max_affine(d, eps, seed, **params)
    if kind == "hard":
        return HardInstance.generate(d, eps, seed, **params)
    raise ValueError(f"unknown instance kind {kind!r}")


def instance_to_json(inst) -> str:
    return json.dumps({"kind": inst.kind, "d": inst.d, "eps": inst.eps,
                       "seed": inst.seed, "params": inst.params()}, sort_keys=True)


def instance_from_json(text: str):
    payload = json.loads(text)
    return make_instance(payload["kind"], payload["d"], payload["eps"], payload["seed"], **payload["params"])


class CountingOracle:
    """Counts queries and stores each response discretized at ``step``.

    ``level`` and ``t`` are set by the caller so that trace lines can say where a
    query came from.
    """

    def __init__(self, inner, d: int, step: Optional[float] = None,
                 trace: Optional[TextIO] = None, max_calls: Optional[int] = None):
        self.inner = inner
        self.d = d
        self.step = step
        self.trace = trace
        self.max_calls = max_calls
        self.calls = 0
        self.level = 1
        self.t = 0

    def __call__(self, x) -> Response:
        if self.max_calls is not None and self.calls >= self.max_calls:
            raise ResourceLimit(f"oracle call budget {self.max_calls} exhausted")
        self.calls += 1
        response = self.inner(x)
        if response is not SUCCESS and self.step is not None:
            response = discretize(response, self.step)
        if self.trace is not None:
            norm = 0.0 if response is SUCCESS else float(np.linalg.norm(response))
            self.trace.write(json.dumps({"level": self.level, "t": self.t,
                                         "query": np.asarray(x, dtype=float).tolist(),
                                         "responseNorm": norm}) + "\n")
        return response


class ResourceLimit(RuntimeError):
    """A solve exceeded its oracle-call or wall-clock budget."""
