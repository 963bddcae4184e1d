"""Memory-light gradient-descent baseline for feasibility.

Each step moves a distance ``eps`` along the returned separating direction and
rounds the iterate to accuracy ``eta``; only the iterate and the counter are
stored.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import bits_for_counter, bits_for_discretized_vector, bits_for_scalar, discretize
from .memory import MemoryLedger
from .oracles import SUCCESS, CountingOracle
from .report import RunReport


@dataclass(frozen=True)
class GdParams:
    eps: float
    eta: float
    T: int

    @classmethod
    def proof(cls, eps: float) -> "GdParams":
        return cls(eps, eps * eps / 40.0, math.ceil(8.0 / (eps * eps)))


def gd_solve(instance, params: GdParams, d: int,
             on_step: Optional[Callable[[np.ndarray, np.ndarray], None]] = None) -> RunReport:
    """Run at most ``T + 1`` queries; ``on_step(x_t, x_{t+1})`` observes each move."""
    if params.eps > 1.0 / math.sqrt(d) + 1e-12:
        raise ValueError("accuracy must satisfy eps <= 1/sqrt(d)")
    start = time.perf_counter()
    oracle = CountingOracle(instance, d, params.eta)
    ledger = MemoryLedger()
    ledger.charge((0, "N"), bits_for_scalar(1.0, params.eta))
    ledger.charge((0, "R"), bits_for_discretized_vector(d, params.eta))
    ledger.charge((0, "Q"), 0)
    ledger.charge((1, "iterate"), bits_for_discretized_vector(d, params.eta))
    ledger.charge((1, "t"), bits_for_counter(params.T))
    x = np.zeros(d)
    point = None
    for t in range(params.T + 1):
        oracle.t = t
        g = oracle(x)
        if g is SUCCESS:
            point = x
            break
        # stay in the cube: projection onto it never moves away from the target set
        nxt = discretize(np.clip(x + params.eps * g, -1.0, 1.0), params.eta)
        if on_step is not None:
            on_step(x, nxt)
        x = nxt
    return RunReport(method="gd", engine="none", d=d, p=1, eps=params.eps,
                     seed=getattr(instance, "seed", None), success=point is not None,
                     calls=oracle.calls, peak_bits=ledger.peak_bits,
                     wall_seconds=time.perf_counter() - start, point=point,
                     failure=None if point is not None else "iteration budget exhausted",
                     ledger=ledger.snapshot())
