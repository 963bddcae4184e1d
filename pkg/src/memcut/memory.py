"""Bit-accounting memory model: named placements with a running peak."""
from __future__ import annotations

from .errors import LedgerError


class MemoryLedger:
    """Current bits per placement and the peak of their total.

    Placement ids are ``(level, kind)`` pairs; level 0 holds the oracle
    placements shared by the whole solve.
    """

    def __init__(self):
        self.placements: dict[tuple[int, str], int] = {}
        self.total = 0
        self.peak = 0
        self.peak_placements: dict[tuple[int, str], int] = {}

    def charge(self, placement, bits: int) -> None:
        """Set the size of ``placement`` to ``bits`` (charging it if new)."""
        if bits < 0:
            raise ValueError("cannot charge negative bits")
        self.total += bits - self.placements.get(placement, 0)
        self.placements[placement] = int(bits)
        if self.total > self.peak:
            self.peak = self.total
            self.peak_placements = dict(self.placements)

    def release(self, placement) -> None:
        try:
            bits = self.placements.pop(placement)
        except KeyError:
            raise LedgerError(f"placement {placement!r} was never charged") from None
        self.total -= bits

    def release_level(self, level: int) -> None:
        for key in [k for k in self.placements if k[0] == level]:
            self.release(key)

    @property
    def peak_bits(self) -> int:
        return self.peak

    def snapshot(self) -> dict:
        return {
            "placements": {f"{lvl}.{kind}": bits
                           for (lvl, kind), bits in sorted(self.peak_placements.items())},
            "peakBits": self.peak,
        }
