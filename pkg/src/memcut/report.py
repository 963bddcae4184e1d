"""Outcome record shared by every solver."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np


@dataclass
class RunReport:
    method: str
    engine: str
    d: int
    p: int
    eps: float
    seed: Optional[int]
    success: bool
    calls: int
    peak_bits: int
    wall_seconds: float
    point: Optional[np.ndarray] = None
    failure: Optional[str] = None
    ledger: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["point"] = None if self.point is None else np.asarray(self.point).tolist()
        out["peakBits"] = out.pop("peak_bits")
        out["wallSeconds"] = out.pop("wall_seconds")
        return out
