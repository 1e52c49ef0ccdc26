import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from panelcause.exceptions import SolverFailure
from panelcause.scm.simplex import project_simplex, solve_simplex_lstsq

SOLVERS = ("active_set", "projected_gradient")


def grid_oracle(A, b, step=0.001):
    """Exhaustive search over the simplex lattice with spacing ``step``
    (at most three donors)."""
    m = A.shape[1]
    n = int(round(1 / step))
    if m == 1:
        W = np.ones((1, 1))
    elif m == 2:
        t = np.arange(n + 1) * step
        W = np.column_stack([t, 1 - t])
    else:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        keep = i + j <= n
        w0, w1 = i[keep] * step, j[keep] * step
        W = np.column_stack([w0, w1, np.clip(1 - w0 - w1, 0, None)])
    R = W @ A.T - b
    obj = np.einsum("ij,ij->i", R, R)
    k = int(np.argmin(obj))
    return W[k], float(obj[k])


def slsqp_reference(A, b):
    m = A.shape[1]
    res = minimize(
        lambda w: float(np.sum((A @ w - b) ** 2)), np.full(m, 1 / m),
        jac=lambda w: 2 * A.T @ (A @ w - b),
        bounds=[(0, 1)] * m, constraints=[{"type": "eq", "fun": lambda w: w.sum() - 1}],
        method="SLSQP", options={"ftol": 1e-15, "maxiter": 1000},
    )
    return float(np.sum((A @ res.x - b) ** 2))


@pytest.mark.parametrize("solver", SOLVERS)
def test_matches_grid_oracle(solver):
    rng = np.random.default_rng(7)
    for _ in range(25):
        m, k = int(rng.integers(1, 4)), int(rng.integers(1, 7))
        A, b = rng.normal(size=(k, m)), rng.normal(size=k)
        sol = solve_simplex_lstsq(A, b, solver=solver)
        _, best = grid_oracle(A, b)
        assert sol.objective <= best + 1e-9
        assert abs(sol.objective - best) < 1e-5


def test_matches_continuous_reference_on_larger_pools():
    rng = np.random.default_rng(11)
    for _ in range(40):
        m, k = int(rng.integers(4, 30)), int(rng.integers(3, 25))
        A, b = rng.normal(size=(k, m)), rng.normal(size=k)
        sol = solve_simplex_lstsq(A, b)
        assert sol.objective <= slsqp_reference(A, b) + 1e-7


def test_solvers_agree():
    rng = np.random.default_rng(3)
    for _ in range(30):
        A, b = rng.uniform(size=(10, 8)), rng.uniform(size=10)
        a = solve_simplex_lstsq(A, b, solver="active_set")
        p = solve_simplex_lstsq(A, b, solver="projected_gradient", max_iter=100_000, tol=1e-14)
        assert abs(a.objective - p.objective) < 1e-7


def test_vertex_and_interior_solutions():
    A = np.eye(3)
    assert np.allclose(solve_simplex_lstsq(A, np.array([1.0, 0, 0])).weights, [1, 0, 0])
    assert np.allclose(solve_simplex_lstsq(A, np.full(3, 1 / 3)).weights, np.full(3, 1 / 3))
    # target outside the hull projects onto the nearest face
    w = solve_simplex_lstsq(A, np.array([0.8, 0.8, -1.0])).weights
    assert np.allclose(w, [0.5, 0.5, 0.0])


def test_tied_donors_are_deterministic():
    A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    b = np.array([1.0, 0.0])
    w1 = solve_simplex_lstsq(A, b).weights
    w2 = solve_simplex_lstsq(A, b).weights
    assert np.array_equal(w1, w2)
    assert w1[2] == 0.0 and w1[:2].sum() == pytest.approx(1.0)


def test_warm_start_does_not_change_the_answer():
    rng = np.random.default_rng(5)
    A, b = rng.normal(size=(12, 9)), rng.normal(size=12)
    cold = solve_simplex_lstsq(A, b)
    warm = solve_simplex_lstsq(A, b, warm_start=cold.weights)
    bad_warm = solve_simplex_lstsq(A, b, warm_start=np.ones(9))
    assert warm.objective == pytest.approx(cold.objective, abs=1e-12)
    assert bad_warm.objective == pytest.approx(cold.objective, abs=1e-12)


def test_iteration_budget_raises():
    rng = np.random.default_rng(0)
    A, b = rng.normal(size=(10, 10)), rng.normal(size=10)
    with pytest.raises(SolverFailure):
        solve_simplex_lstsq(A, b, solver="projected_gradient", max_iter=2)
    with pytest.raises(SolverFailure):
        solve_simplex_lstsq(A, b, max_iter=1)


def test_unknown_solver():
    with pytest.raises(ValueError):
        solve_simplex_lstsq(np.eye(2), np.ones(2), solver="cvx")


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1), st.sampled_from(SOLVERS))
def test_solution_is_on_simplex(k, m, seed, solver):
    rng = np.random.default_rng(seed)
    A, b = rng.normal(size=(k, m)) * rng.uniform(0.01, 100), rng.normal(size=k)
    w = solve_simplex_lstsq(A, b, solver=solver, max_iter=200_000).weights
    assert np.all(w >= 0)
    assert abs(w.sum() - 1) < 1e-12


@settings(max_examples=100)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=20))
def test_projection_properties(v):
    y = np.array(v)
    p = project_simplex(y)
    assert np.all(p >= 0) and abs(p.sum() - 1) < 1e-9
    # idempotent, and the residual is orthogonal to moves inside the simplex
    assert np.allclose(project_simplex(p), p, atol=1e-12)
    support = p > 0
    shift = (y - p)[support]
    assert np.ptp(shift) < 1e-9 if shift.size else True
