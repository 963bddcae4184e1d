import io
import json
import math

import numpy as np
import pytest

from memcut.aux_lp import solve_aux
from memcut.geometry import discretize
from memcut.oracles import SUCCESS, BallInstance
from memcut.recursive import RecursiveSolver, SolveConfig, solve_feasibility
from memcut.vaidya import VaidyaEngine, VaidyaParams, iteration_budget


def test_config_defaults():
    cfg = SolveConfig(d=4, eps=0.1)
    assert cfg.target_delta == pytest.approx(0.1 / 16)
    assert cfg.step == pytest.approx(0.04 * 0.1 / (32 * 4 ** 2.5))
    with pytest.raises(ValueError):
        SolveConfig(d=2, eps=0.1, p=3)
    with pytest.raises(ValueError):
        SolveConfig(d=2, eps=0.1, engine="ellipsoid")


@pytest.mark.parametrize("engine", ["classic", "regularized"])
def test_origin_ball_succeeds_immediately(engine):
    report = solve_feasibility(BallInstance([0.05, 0.0, 0.0], 0.1), SolveConfig(d=3, eps=0.1, p=2, engine=engine))
    assert report.success and report.calls == 1
    np.testing.assert_array_equal(report.point, 0)


def test_proof_faithful_single_level_call_bound():
    inst = BallInstance.generate(2, 0.1, seed=0)
    report = solve_feasibility(inst, SolveConfig(d=2, eps=0.1))
    assert report.success
    assert report.calls <= iteration_budget(0.1 / 8, 2) + 1
    assert inst(report.point) is SUCCESS


@pytest.mark.slow
def test_regularized_two_levels_use_less_memory():
    inst = BallInstance.generate(4, 0.05, seed=0)
    one = solve_feasibility(inst, SolveConfig(d=4, eps=0.05, p=1, engine="regularized", c_scale=0.02))
    two = solve_feasibility(inst, SolveConfig(d=4, eps=0.05, p=2, engine="regularized", c_scale=0.02))
    assert one.success and two.success
    assert two.peak_bits < one.peak_bits


def block_oracle(center, xi):
    ball = BallInstance(center, 0.05)
    return lambda y: discretize(ball.direction(np.asarray(y)), xi)


def two_level_solver():
    inst = BallInstance([0.5, -0.4], 0.05)
    return RecursiveSolver(inst, SolveConfig(d=2, eps=0.05, p=2))


def test_separation_vector_of_zero_oracle_is_zero():
    solver = two_level_solver()
    oracle_y = block_oracle([-0.4], solver.xi)
    u = solver.approx_separation_vector(1, 1, lambda y: np.zeros(1), oracle_y)
    np.testing.assert_array_equal(u, 0)


def test_separation_vector_sums_certificate_weights():
    solver = two_level_solver()
    oracle_y = block_oracle([-0.4], solver.xi)
    u = solver.approx_separation_vector(1, 1, lambda y: np.ones(1), oracle_y)
    # independent run of the same inner loop
    engine = VaidyaEngine(1, VaidyaParams(solver.delta, solver.xi, c_scale=solver.config.c_scale))
    engine.run(oracle_y)
    cert = solve_aux(engine.poly)
    weights = discretize(cert.weights, solver.xi)
    total = weights[cert.indices >= 0].sum()
    assert abs(u[0] - total) <= len(weights) * solver.xi
    assert abs(u[0]) <= 1


def test_full_two_level_solve_audits():
    buf = io.StringIO()
    inst = BallInstance.generate(2, 0.1, seed=3)
    solver = RecursiveSolver(inst, SolveConfig(d=2, eps=0.1, p=2, c_scale=0.05), trace=buf)
    report = solver.solve()
    assert report.success
    stats = report.stats
    assert stats["norm_violations"] == 0
    assert stats["max_output_norm"] <= 1 + 1e-12
    assert stats["call_law_violations"] == 0
    assert stats["replay_mismatches"] == 0
    assert stats["replay_checks"] > 0
    lines = [json.loads(line) for line in buf.getvalue().splitlines()]
    assert len(lines) == report.calls
    assert {line["level"] for line in lines} <= {1, 2}


def test_call_budget_turns_into_failure():
    inst = BallInstance.generate(3, 0.05, seed=1)
    report = solve_feasibility(inst, SolveConfig(d=3, eps=0.05, p=2, max_calls=5))
    assert not report.success
    assert report.failure.startswith("ResourceLimit")
    assert report.calls <= 5


def test_regularized_two_level_solve():
    inst = BallInstance.generate(2, 0.1, seed=2)
    report = solve_feasibility(inst, SolveConfig(d=2, eps=0.1, p=2, engine="regularized", c_scale=0.05))
    assert report.success
    assert report.stats["norm_violations"] == 0
    assert report.stats["replay_mismatches"] == 0
    assert inst(report.point) is SUCCESS
