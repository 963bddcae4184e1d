"""Block-recursive feasibility solver.

Coordinates are split into blocks ``k_1 + ... + k_p = d``.  A cutting-plane run on
block 1 queries an approximate oracle; for ``p > 1`` that oracle runs a full
cutting-plane pass on block 2 (recursively), keeps only a dual certificate
over the cuts it produced, then replays the pass and sums the outer-block
components of the subgradients at the certified iterations.  Only the
certificate and the iteration counter survive between passes.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np

from .aux_lp import DualCertificate
from .errors import InvariantViolation, ReplayError
from .geometry import (BlockPartition, bits_for_counter, bits_for_discretized_vector,
                       bits_for_scalar, discretize)
from .lsw import LswEngine, LswParams
from .memory import MemoryLedger
from .oracles import SUCCESS, CountingOracle, FeasiblePointFound, ResourceLimit
from .report import RunReport
from .vaidya import SIGMA_MIN, VaidyaEngine, VaidyaParams, iteration_budget

ENGINES = ("classic", "regularized")


@dataclass(frozen=True)
class SolveConfig:
    d: int
    eps: float
    p: int = 1
    engine: str = "classic"
    c_scale: float = 1.0
    delta: Optional[float] = None
    xi: Optional[float] = None
    inner_c: float = 1.0
    lsw: LswParams = field(default_factory=LswParams)
    max_calls: Optional[int] = None
    max_seconds: Optional[float] = None
    audit: bool = True

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if not 1 <= self.p <= self.d:
            raise ValueError("need 1 <= p <= d")

    @property
    def partition(self) -> BlockPartition:
        return BlockPartition.balanced(self.d, self.p)

    @property
    def target_delta(self) -> float:
        return self.delta if self.delta is not None else self.eps / (4 * self.d)

    @property
    def step(self) -> float:
        if self.xi is not None:
            return self.xi
        return SIGMA_MIN * self.eps / (32 * self.d ** 2.5)

    @property
    def inner_eps(self) -> float:
        delta = self.target_delta
        return self.inner_c * delta / (self.d * math.log(self.d / delta))


class RecursiveSolver:
    """Runs one solve; holds the oracle wrapper, memory ledger and audit counters."""

    def __init__(self, instance, config: SolveConfig, trace: Optional[TextIO] = None):
        self.instance = instance
        self.config = config
        self.sizes = config.partition.sizes
        self.blocks = config.partition.slices()
        self.p = len(self.sizes)
        self.xi = config.step
        self.delta = config.target_delta
        self.oracle = CountingOracle(instance, config.d, self.xi, trace, config.max_calls)
        self.ledger = MemoryLedger()
        self.stats = {"norm_violations": 0, "replays": 0, "replay_checks": 0,
                      "replay_mismatches": 0, "call_law_violations": 0,
                      "max_output_norm": 0.0, "max_rows": 0}
        self._engines: list = []
        self._deadline = None

    # engines and memory charges

    def _engine(self, block: int):
        k = self.sizes[block - 1]
        cfg = self.config
        if cfg.engine == "classic":
            return VaidyaEngine(k, VaidyaParams(self.delta, self.xi, c_scale=cfg.c_scale))
        eps = self.delta if block == 1 else cfg.inner_eps
        t_max = iteration_budget(self.delta, k, cfg.c_scale)
        return LswEngine(k, eps, cfg.lsw, t_max)

    def _index_bits(self, engine) -> int:
        return bits_for_counter(engine.t_max)

    def _charge_frame(self, block: int, engine) -> None:
        k = self.sizes[block - 1]
        row = (bits_for_discretized_vector(k, self.xi)
               + bits_for_scalar(math.sqrt(k) + 1.0, self.xi) + self._index_bits(engine))
        self.ledger.charge((block, "poly"), len(engine.poly) * row)
        self.stats["max_rows"] = max(self.stats["max_rows"], len(engine.poly))
        self.ledger.charge((block, "t"), self._index_bits(engine))
        if self.config.engine == "regularized":
            self.ledger.charge((block, "iterate"), k * bits_for_scalar(3.0 * math.sqrt(k), self.xi))

    def _charge_static(self) -> None:
        d = self.config.d
        self.ledger.charge((0, "N"), bits_for_scalar(1.0, self.xi))
        self.ledger.charge((0, "R"), bits_for_discretized_vector(d, self.xi))
        self.ledger.charge((0, "Q"), 0)
        if self.config.engine == "regularized":
            k = max(self.sizes)
            self.ledger.charge((0, "scratch"), k * k * math.ceil(math.log2(d / self.config.eps)))

    def _release_frame(self, block: int) -> None:
        for kind in ("poly", "t", "iterate", "dual", "u", "j"):
            if (block, kind) in self.ledger.placements:
                self.ledger.release((block, kind))

    # recursion

    def _leaf(self, j: int, points: list) -> np.ndarray:
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise ResourceLimit("wall-clock budget exhausted")
        x = np.concatenate(points)
        self.oracle.level = len(self._engines)
        self.oracle.t = self._engines[-1].t if self._engines else 0
        response = self.oracle(x)
        if response is SUCCESS:
            raise FeasiblePointFound(x)
        return discretize(response[self.blocks[j - 1]], self.xi)

    def approx_oracle(self, i: int, j: int, points: list) -> np.ndarray:
        """Approximate separation vector for block ``j`` given points for blocks ``1..i``."""
        if i == self.p:
            out = self._leaf(j, points)
        else:
            out = self.approx_separation_vector(
                i, j,
                lambda y: self.approx_oracle(i + 1, j, points + [y]),
                lambda y: self.approx_oracle(i + 1, i + 1, points + [y]))
        norm = float(np.linalg.norm(out))
        self.stats["max_output_norm"] = max(self.stats["max_output_norm"], norm)
        if norm > 1.0 + 1e-12:
            self.stats["norm_violations"] += 1
        return out

    def approx_separation_vector(self, i: int, j: int, oracle_x, oracle_y) -> np.ndarray:
        """Two passes of a cutting-plane run on block ``i + 1``.

        Pass one localizes with ``oracle_y`` and keeps a rounded dual certificate.
        Pass two replays the same run and, at each certified iteration, adds the
        weighted ``oracle_x`` response into the rounded accumulator.
        """
        block = i + 1
        engine = self._engine(block)
        self._engines.append(engine)
        self.ledger.charge((block, "j"), bits_for_counter(self.p))
        y_calls = x_calls = 0

        def counted_y(y):
            nonlocal y_calls
            y_calls += 1
            return oracle_y(y)

        digests = []
        self._charge_frame(block, engine)
        while not engine.done:
            if self.config.audit:
                digests.append(engine.digest())
            engine.step(counted_y)
            self._charge_frame(block, engine)
        cert: DualCertificate = engine.finish()
        m = len(cert.weights)
        weights = discretize(cert.weights, self.xi)
        # only weights that the replay will use are kept: nonzero ones on oracle cuts
        targets = {int(k): float(w) for k, w in zip(cert.indices, weights) if k >= 0 and w != 0}
        del cert, weights
        self.ledger.charge((block, "dual"), len(targets) * (
            bits_for_scalar(1.0, self.xi / math.sqrt(m)) + self._index_bits(engine)))

        k_j = self.sizes[j - 1]
        u = np.zeros(k_j)
        self.ledger.charge((block, "u"), bits_for_discretized_vector(k_j, self.xi))
        if targets:
            self.stats["replays"] += 1
            last = max(targets)
            engine.reset()
            self._charge_frame(block, engine)
            while True:
                if self.config.audit:
                    self.stats["replay_checks"] += 1
                    if engine.t >= len(digests) or engine.digest() != digests[engine.t]:
                        self.stats["replay_mismatches"] += 1
                        raise ReplayError(f"replay diverged at iteration {engine.t}")
                if engine.t in targets:
                    x_calls += 1
                    g = oracle_x(engine.point)
                    u = discretize(u + targets[engine.t] * g, self.xi)
                    if np.linalg.norm(u) > 1.0 + 1e-12:
                        raise InvariantViolation("accumulator left the unit ball")
                if engine.t == last:
                    break
                if engine.done:
                    raise ReplayError(f"replay ended before iteration {last}")
                engine.step(counted_y)
                self._charge_frame(block, engine)

        budget = getattr(engine, "t_max", None)
        if budget is not None and y_calls > 2 * (budget + 1):
            self.stats["call_law_violations"] += 1
        if self.config.engine == "classic" and x_calls > self.sizes[block - 1] / SIGMA_MIN + 1:
            self.stats["call_law_violations"] += 1
        self._engines.pop()
        self._release_frame(block)
        return u

    def solve(self) -> RunReport:
        cfg = self.config
        start = time.perf_counter()
        if cfg.max_seconds is not None:
            self._deadline = start + cfg.max_seconds
        self._charge_static()
        engine = self._engine(1)
        self._engines.append(engine)
        self._charge_frame(1, engine)
        point, failure = None, None
        try:
            while not engine.done:
                engine.step(lambda y: self.approx_oracle(1, 1, [y]))
                self._charge_frame(1, engine)
            failure = f"cutting-plane run ended ({engine.status}) without a feasible query"
        except FeasiblePointFound as found:
            point = found.point
        except ResourceLimit as exc:
            failure = f"ResourceLimit: {exc}"
        if point is not None and self.instance(point) is not SUCCESS:
            raise InvariantViolation("returned point does not verify against the oracle")
        method = "vaidya-p1" if cfg.p == 1 and cfg.engine == "classic" else (
            "lsw" if cfg.p == 1 else f"recursive-{cfg.engine}")
        return RunReport(method=method, engine=cfg.engine, d=cfg.d, p=cfg.p, eps=cfg.eps,
                         seed=getattr(self.instance, "seed", None), success=point is not None,
                         calls=self.oracle.calls, peak_bits=self.ledger.peak_bits,
                         wall_seconds=time.perf_counter() - start, point=point, failure=failure,
                         ledger=self.ledger.snapshot(), stats=dict(self.stats))


def solve_feasibility(instance, config: SolveConfig, trace: Optional[TextIO] = None) -> RunReport:
    """Find a point accepted by ``instance`` with the block-recursive solver."""
    return RecursiveSolver(instance, config, trace).solve()
