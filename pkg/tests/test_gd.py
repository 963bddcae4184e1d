import math

import numpy as np
import pytest

from memcut.gd import GdParams, gd_solve
from memcut.oracles import SUCCESS, BallInstance


def test_proof_parameters():
    params = GdParams.proof(0.1)
    assert params.eta == pytest.approx(0.1 ** 2 / 40)
    assert params.T == 800


def test_first_step_moves_toward_center():
    moves = []
    gd_solve(BallInstance([0.5, 0.0], 0.1), GdParams.proof(0.1), 2,
             on_step=lambda x, nxt: moves.append(nxt))
    np.testing.assert_allclose(moves[0], [0.1, 0.0], atol=GdParams.proof(0.1).eta)


def test_origin_inside_ball_succeeds_at_first_query():
    report = gd_solve(BallInstance([0.02, 0.0], 0.1), GdParams.proof(0.1), 2)
    assert report.success and report.calls == 1


def test_rejects_too_coarse_accuracy():
    with pytest.raises(ValueError):
        gd_solve(BallInstance([0.5, 0.0, 0.0, 0.0, 0.0], 0.5), GdParams.proof(0.5), 5)


@pytest.mark.parametrize("seed", range(20))
def test_potential_decreases_every_step(seed):
    eps = 0.1
    params = GdParams.proof(eps)
    inst = BallInstance.generate(2, eps, seed)
    bad = []

    def check(x, nxt):
        lhs = np.sum((nxt - inst.center) ** 2)
        rhs = np.sum((x - inst.center) ** 2) - eps ** 2 + 20 * params.eta
        if lhs > rhs:
            bad.append((x, nxt))

    report = gd_solve(inst, params, 2, on_step=check)
    assert report.success and report.calls <= params.T
    assert not bad
    assert inst(report.point) is SUCCESS


def test_memory_is_linear_in_dimension():
    params = GdParams.proof(0.1)
    peaks = [gd_solve(BallInstance.generate(d, 0.1, 0), params, d).peak_bits for d in (2, 4, 8)]
    ratios = [peak / (d * math.log(d / 0.1)) for peak, d in zip(peaks, (2, 4, 8))]
    assert max(ratios) / min(ratios) < 3
