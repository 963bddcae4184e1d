"""Discretization primitives and block partitions shared by every solver."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _check_step(step: float) -> None:
    if not (step > 0 and math.isfinite(step)):
        raise ValueError(f"discretization step must be positive and finite, got {step!r}")


def _floor_multiples(ax: np.ndarray, step: float) -> np.ndarray:
    """Largest q with q*step <= ax, robust to rounding in ax/step."""
    q = np.floor(ax / step)
    q = np.where((q + 1.0) * step <= ax, q + 1.0, q)
    q = np.where(q * step > ax, q - 1.0, q)
    return q


def discretize1(x: float, step: float) -> float:
    """Round ``x`` toward zero onto the lattice ``step * Z``."""
    _check_step(step)
    if not math.isfinite(x):
        raise ValueError(f"cannot discretize non-finite value {x!r}")
    ax = abs(x)
    q = float(_floor_multiples(np.array(ax), step))
    return math.copysign(q * step, x) if q > 0 else 0.0


def discretize(x, step: float) -> np.ndarray:
    """Round each coordinate toward zero at step ``step / sqrt(d)``.

    The result lies within ``step`` of ``x`` in the Euclidean norm and is never
    longer than ``x``.
    """
    _check_step(step)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("expected a non-empty vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot discretize non-finite coordinates")
    cell = step / math.sqrt(x.size)
    q = _floor_multiples(np.abs(x), cell)
    out = np.sign(x) * q * cell
    out[q == 0] = 0.0
    return out


def bits_for_discretized_vector(d: int, step: float) -> int:
    """Bits needed to store one discretized point of ``[-1, 1]^d``."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    _check_step(step)
    ratio = 2.0 * math.sqrt(d) / step
    if ratio <= 1.0:
        raise ValueError(f"step {step} carries no information in dimension {d}")
    return d * math.ceil(math.log2(ratio) - 1e-12)


def bits_for_scalar(bound: float, step: float) -> int:
    """Bits for a multiple of ``step`` in ``[-bound, bound]`` (at least one)."""
    _check_step(step)
    return max(1, math.ceil(math.log2(2.0 * bound / step + 1.0) - 1e-12))


def bits_for_counter(limit: int) -> int:
    """Bits for an integer counter taking values in ``[-1, limit]``."""
    return max(1, math.ceil(math.log2(limit + 2)))


def in_cube(x: np.ndarray) -> bool:
    return bool(np.all(np.abs(x) <= 1.0))


@dataclass(frozen=True)
class BlockPartition:
    """Split of ``d`` coordinates into consecutive blocks of sizes ``sizes``."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes or any(k < 1 for k in self.sizes):
            raise ValueError("block sizes must be positive")
        cap = math.ceil(self.total / len(self.sizes))
        if any(k > cap for k in self.sizes):
            raise ValueError(f"block sizes {self.sizes} exceed the balanced cap {cap}")

    @classmethod
    def balanced(cls, d: int, p: int) -> "BlockPartition":
        if not 1 <= p <= d:
            raise ValueError(f"need 1 <= p <= d, got p={p}, d={d}")
        base, extra = divmod(d, p)
        return cls(tuple(base + 1 if i < extra else base for i in range(p)))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def levels(self) -> int:
        return len(self.sizes)

    def slices(self) -> list[slice]:
        out, start = [], 0
        for k in self.sizes:
            out.append(slice(start, start + k))
            start += k
        return out
