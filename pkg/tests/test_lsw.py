import math

import numpy as np
import pytest

from memcut.errors import CenteringPreconditionError, DegenerateState
from memcut.geometry import discretize
from memcut.lsw import (LswEngine, LswParams, certified_solve, centering, entry_radius,
                        hybrid_gradient, hybrid_terms, lsw_cutting_plane, precenter,
                        q_matrix, reg_leverage)
from memcut.oracles import BallInstance
from memcut.polyhedron import IndexedPolyhedron, leverage_scores, slacks

P = LswParams()


def random_poly(rng, n=2, m=6):
    poly = IndexedPolyhedron.cube(n)
    for k in range(m - 2 * n):
        a = rng.standard_normal(n)
        a /= np.linalg.norm(a)
        poly.append(k, a, -0.6)
    return poly


def test_params_validation():
    with pytest.raises(ValueError):
        LswParams(c_d=2.5)
    with pytest.raises(ValueError):
        LswParams(centering_iters=100)


@pytest.mark.parametrize("lam", [1.0, 0.5, 3.0])
def test_cube_leverage(lam):
    np.testing.assert_allclose(reg_leverage(IndexedPolyhedron.cube(3), np.zeros(3), lam), 1 / (2 + lam))


def test_small_regularization_recovers_classic_scores():
    poly = IndexedPolyhedron.cube(2)
    poly.append(0, [0.6, 0.8], -0.5)
    x = np.array([0.1, -0.2])
    np.testing.assert_allclose(reg_leverage(poly, x, 1e-12), leverage_scores(poly, x), atol=1e-9)


def test_cube_gradient_vanishes_at_center():
    np.testing.assert_allclose(hybrid_gradient(IndexedPolyhedron.cube(4), np.zeros(4), P), 0, atol=1e-15)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    poly = random_poly(rng, 3, 9)
    x = np.array([-0.3, 0.2, -0.1])
    while np.any(slacks(poly, x) <= 0):
        x *= 0.5
    g = hybrid_gradient(poly, x, P)
    h = 1e-6
    fd = [(hybrid_terms(poly, x + h * e, P).value - hybrid_terms(poly, x - h * e, P).value) / (2 * h)
          for e in np.eye(3)]
    np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-7)


def test_nonpositive_slack_is_rejected():
    with pytest.raises(DegenerateState):
        reg_leverage(IndexedPolyhedron.cube(2), np.array([1.0, 0.0]), 1.0)


@pytest.mark.parametrize("seed", range(20))
def test_leverage_range_and_q_conditioning(seed):
    rng = np.random.default_rng(seed)
    poly = random_poly(rng, 3, 10)
    x = precenter(poly, np.zeros(3) if np.all(slacks(poly, np.zeros(3)) > 0) else
                  _interior(poly), P)
    terms = hybrid_terms(poly, x, P)
    assert np.all((terms.psi >= 0) & (terms.psi < 1))
    assert terms.psi.sum() <= 3 + 1e-9
    Q = q_matrix(poly, x, P)
    np.testing.assert_allclose(Q, Q.T)
    upper = P.lam + len(poly) * (P.c_e + 1) / terms.s.min() ** 2
    for v in rng.standard_normal((50, 3)):
        rq = v @ Q @ v / (v @ v)
        assert P.lam - 1e-9 <= rq <= upper


def _interior(poly):
    from memcut.polyhedron import interior_point
    return interior_point(poly)[0]


def test_centering_returns_optimal_start():
    poly = IndexedPolyhedron.cube(2)
    history = []
    x = centering(poly, np.zeros(2), 270, P, history)
    np.testing.assert_array_equal(x, 0)
    assert len(history) == 1


def test_centering_precondition():
    with pytest.raises(CenteringPreconditionError):
        centering(IndexedPolyhedron.cube(2), np.array([0.5, 0.0]), 270, P)


def test_one_step_decreases_gradient_norm():
    history = []
    centering(IndexedPolyhedron.cube(2), np.array([1e-3, -2e-3]), 270, P, history)
    assert history[1] < history[0]


def test_contraction_rate_over_random_starts():
    rng = np.random.default_rng(1)
    poly = random_poly(rng, 2, 6)
    center = precenter(poly, _interior(poly), P)
    worst, starts = 0.0, 0
    while starts < 50:
        x0 = center + rng.normal(scale=2e-3, size=2)
        terms = hybrid_terms(poly, x0, P)
        from scipy import linalg
        cf = linalg.cho_factor(terms.Q)
        if math.sqrt(terms.grad @ linalg.cho_solve(cf, terms.grad)) > entry_radius(terms, P):
            continue
        starts += 1
        history = []
        centering(poly, x0, 40, P, history)
        ratios = [b / a for a, b in zip(history, history[1:]) if a > 0]
        worst = max([worst, *ratios])
    assert worst <= 1 - 1 / 64


def test_new_cut_keeps_iterate_feasible():
    inst = BallInstance.generate(2, 0.1, seed=3)
    engine = LswEngine(2, 0.02)
    while not engine.done:
        x = engine.point.copy()
        before = len(engine.poly)
        engine.step(lambda z: discretize(inst.direction(z), 1e-6))
        if len(engine.poly) > before:
            assert engine.poly.offsets[-1] <= engine.poly.normals[-1] @ x
        assert np.linalg.norm(engine.point) <= 3 * math.sqrt(2)


def test_deletion_removes_low_leverage_constraint():
    # a far away redundant cut has tiny regularized leverage
    poly = IndexedPolyhedron.cube(2)
    poly.append(0, [0.0, 1.0], -50.0)
    engine = LswEngine(2, 0.01)
    engine.poly = poly
    assert hybrid_terms(poly, engine.x, P).psi.min() <= P.c_d
    engine.step(lambda z: pytest.fail("oracle should not be queried on a deletion step"))
    assert 0 not in engine.poly.indices
    assert len(engine.poly) == 4


@pytest.mark.parametrize("seed", range(5))
def test_ball_run_terminates_near_boundary(seed):
    inst = BallInstance.generate(2, 0.1, seed)
    poly, x = lsw_cutting_plane(lambda z: discretize(inst.direction(z), 1e-6), 0.02, n=2)
    assert slacks(poly, x).min() < 2 * 0.02


def test_uniform_weights_on_pristine_cube():
    engine = LswEngine(2, 0.6)
    assert engine.done
    cert = engine.finish()
    np.testing.assert_allclose(cert.weights, 1 / 4)


@pytest.mark.parametrize("seed", range(5))
def test_certificate_bounds(seed):
    inst = BallInstance.generate(2, 0.1, seed)
    result = certified_solve(lambda z: discretize(inst.direction(z), 1e-6), 0.05, n=2,
                             k1=0.25, k2=1.5)
    assert result.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(result.weights >= 0)
    assert np.all(slacks(result.poly, result.point) > 0)
