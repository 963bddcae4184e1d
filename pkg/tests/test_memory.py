import math

import pytest

from memcut.errors import LedgerError
from memcut.memory import MemoryLedger
from memcut.oracles import BallInstance
from memcut.recursive import SolveConfig, solve_feasibility


def test_charge_and_release():
    ledger = MemoryLedger()
    ledger.charge((1, "poly"), 10)
    ledger.charge((1, "t"), 5)
    assert ledger.total == 15 and ledger.peak_bits == 15
    ledger.release((1, "poly"))
    assert ledger.total == 5 and ledger.peak_bits == 15


def test_charge_resizes_placement():
    ledger = MemoryLedger()
    ledger.charge((0, "N"), 8)
    ledger.charge((0, "N"), 3)
    assert ledger.total == 3 and ledger.peak_bits == 8


def test_release_level():
    ledger = MemoryLedger()
    ledger.charge((2, "u"), 4)
    ledger.charge((2, "dual"), 6)
    ledger.charge((1, "u"), 1)
    ledger.release_level(2)
    assert ledger.placements == {(1, "u"): 1}


def test_errors():
    ledger = MemoryLedger()
    with pytest.raises(LedgerError):
        ledger.release((0, "Q"))
    with pytest.raises(ValueError):
        ledger.charge((0, "Q"), -1)


def test_snapshot_reports_peak_placements():
    ledger = MemoryLedger()
    ledger.charge((1, "poly"), 20)
    ledger.release((1, "poly"))
    ledger.charge((1, "t"), 3)
    assert ledger.snapshot() == {"placements": {"1.poly": 20}, "peakBits": 20}


def test_single_level_peak_within_fit_window():
    report = solve_feasibility(BallInstance.generate(2, 0.1, 0), SolveConfig(d=2, eps=0.1))
    scale = 4 * math.log(2 / 0.1) * math.log2(math.e)
    assert scale <= report.peak_bits <= 64 * scale
    placements = report.ledger["placements"]
    assert {"0.N", "0.R", "0.Q", "1.poly", "1.t"} <= set(placements)
    assert placements["0.Q"] == 0


def test_two_levels_lower_peak():
    inst = BallInstance.generate(4, 0.1, 0)
    one = solve_feasibility(inst, SolveConfig(d=4, eps=0.1, p=1, c_scale=0.05))
    two = solve_feasibility(inst, SolveConfig(d=4, eps=0.1, p=2, c_scale=0.05))
    assert one.success and two.success
    assert two.peak_bits < one.peak_bits
    assert "2.dual" in two.ledger["placements"] or "2.poly" in two.ledger["placements"]


def test_regularized_charges_shared_scratch():
    inst = BallInstance.generate(2, 0.1, 1)
    report = solve_feasibility(inst, SolveConfig(d=2, eps=0.1, p=2, engine="regularized", c_scale=0.05))
    assert "0.scratch" in report.ledger["placements"]
    assert "1.iterate" in report.ledger["placements"]
