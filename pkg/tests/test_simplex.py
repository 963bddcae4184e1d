import numpy as np
import pytest
from scipy.optimize import linprog

from memcut.simplex import LPInfeasible, LPUnbounded, simplex


def test_small_lp_by_hand():
    # min -x - y  s.t. x + y + s = 1 ; optimum value -1
    res = simplex([-1, -1, 0], [[1, 1, 1]], [1])
    assert res.fun == pytest.approx(-1.0)


def test_infeasible_and_unbounded():
    with pytest.raises(LPInfeasible):
        simplex([0, 0], [[1, 1]], [-1])
    with pytest.raises(LPUnbounded):
        simplex([-1, 0], [[1, -1]], [0])


@pytest.mark.parametrize("seed", range(30))
def test_matches_reference_solver(seed):
    rng = np.random.default_rng(seed)
    m, n = rng.integers(2, 6), rng.integers(4, 10)
    A = rng.standard_normal((m, n))
    x0 = rng.uniform(0, 1, n)
    b = A @ x0
    c = rng.uniform(0, 1, n)  # bounded below on the nonnegative orthant
    ours = simplex(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, None)] * n, method="highs")
    assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
    np.testing.assert_allclose(A @ ours.x, b, atol=1e-8)
    assert np.all(ours.x >= 0)


def test_degenerate_problem_terminates():
    # classic cycling example for the largest-coefficient rule
    c = [-0.75, 150, -0.02, 6, 0, 0, 0]
    A = [[0.25, -60, -0.04, 9, 1, 0, 0],
         [0.5, -90, -0.02, 3, 0, 1, 0],
         [0, 0, 1, 0, 0, 0, 1]]
    res = simplex(c, A, [0, 0, 1])
    assert res.fun == pytest.approx(-0.05)
