"""Least squares over the probability simplex.

Solves ``min ||A w - b||^2`` subject to ``w >= 0`` and ``sum(w) == 1``.

Two solvers are provided:

* ``active_set`` (default): a Lawson-Hanson style primal active-set method.
  It starts at the best single vertex, adds the coordinate with the most
  negative reduced gradient, and steps back along the segment whenever the
  equality-constrained subproblem leaves the simplex. Exact up to round-off
  and naturally sparse.
* ``projected_gradient``: accelerated projected gradient (FISTA with
  function-value restart) from the uniform point, using Euclidean projection
  onto the simplex.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..exceptions import SolverFailure

SOLVERS = ("active_set", "projected_gradient")
_NO_WARM = np.empty(0)


@dataclass(frozen=True)
class SimplexSolution:
    weights: np.ndarray
    objective: float
    n_iter: int


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection of ``y`` onto the probability simplex (sort method)."""
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, n + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def _objective(A, b, w):
    r = A @ w - b
    return float(r @ r)


def _finalize(w: np.ndarray) -> np.ndarray:
    w = np.where(w < 0.0, 0.0, w)
    return w / w.sum()


@njit(cache=True)
def _subproblem(A, b, free, nfree):
    """Minimise ||A_F z - b|| with sum(z) == 1 by eliminating the constraint:
    z = e_0 + N y with N's columns e_k - e_0."""
    z = np.empty(nfree)
    if nfree == 1:
        z[0] = 1.0
        return z
    k = A.shape[0]
    a0 = A[:, free[0]]
    rest = np.empty((k, nfree - 1))
    for c in range(1, nfree):
        rest[:, c - 1] = A[:, free[c]] - a0
    rhs = b - a0
    gram = rest.T @ rest
    ok = False
    y = np.zeros(nfree - 1)
    if nfree - 1 <= k:
        try:
            y = np.linalg.solve(gram, rest.T @ rhs)
            ok = True
        except Exception:  # singular: numba raises a generic LinAlgError
            ok = False
        if ok:
            # normal equations square the condition number; accept only if
            # the residual is orthogonal to the columns
            g = rest.T @ (rest @ y - rhs)
            if np.max(np.abs(g)) > 1e-9 * max(1.0, np.max(np.abs(gram))):
                ok = False
            elif not np.all(np.isfinite(y)):
                ok = False
    if not ok:
        y = np.linalg.lstsq(rest, rhs)[0]
    z[0] = 1.0 - y.sum()
    z[1:] = y
    return z


@njit(cache=True)
def _active_set_kernel(A, b, warm, max_iter, kkt_tol):
    """Returns (w, n_iter, status); status 0 ok, 1 budget exhausted,
    2 lost feasibility."""
    k, m = A.shape
    w = np.zeros(m)
    in_free = np.zeros(m, dtype=np.bool_)
    blocked = np.zeros(m, dtype=np.bool_)
    free = np.empty(m, dtype=np.int64)
    nfree = 0
    started = False
    if warm.shape[0] == m:
        for i in range(m):
            if warm[i] > 0.0:
                free[nfree] = i
                nfree += 1
        if nfree > 0:
            z = _subproblem(A, b, free, nfree)
            if np.all(z > 0.0):
                for c in range(nfree):
                    w[free[c]] = z[c]
                    in_free[free[c]] = True
                started = True
    if not started:
        best, start = np.inf, 0
        for j in range(m):
            r = A[:, j] - b
            d = r @ r
            if d < best:
                best, start = d, j
        w[start] = 1.0
        free[0] = start
        nfree = 1
        in_free[:] = False
        in_free[start] = True

    n_iter = 0
    while True:
        n_iter += 1
        if n_iter > max_iter:
            return w, n_iter, 1
        g = 2.0 * (A.T @ (A @ w - b))
        mu = w @ g
        j, best = -1, -kkt_tol
        for i in range(m):
            if not in_free[i] and not blocked[i] and g[i] - mu < best:
                best, j = g[i] - mu, i
        if j < 0:
            break
        # insert j keeping free sorted
        pos = nfree
        while pos > 0 and free[pos - 1] > j:
            free[pos] = free[pos - 1]
            pos -= 1
        free[pos] = j
        nfree += 1
        in_free[j] = True
        while True:
            n_iter += 1
            if n_iter > max_iter:
                return w, n_iter, 1
            z = _subproblem(A, b, free, nfree)
            if np.all(z > 0.0):
                w[:] = 0.0
                for c in range(nfree):
                    w[free[c]] = z[c]
                blocked[:] = False
                break
            # step from w towards z until the first coordinate hits zero
            alpha = np.inf
            for c in range(nfree):
                if z[c] <= 0.0:
                    wc = w[free[c]]
                    a = wc / (wc - z[c])
                    if a < alpha:
                        alpha = a
            n_keep = 0
            total = 0.0
            for c in range(nfree):
                i = free[c]
                x = w[i] + alpha * (z[c] - w[i])
                if x > 1e-15:
                    w[i] = x
                    free[n_keep] = i
                    n_keep += 1
                    total += x
                else:
                    w[i] = 0.0
                    in_free[i] = False
            if n_keep == 0:
                return w, n_iter, 2
            nfree = n_keep
            if not in_free[j]:
                # the entering coordinate left again at zero step: degenerate
                # direction, do not offer it again until progress is made
                blocked[j] = True
            w /= total
            if nfree == 1:
                break
    return w, n_iter, 0


def solve_active_set(
    A: np.ndarray,
    b: np.ndarray,
    max_iter: int = 10_000,
    tol: float = 1e-10,
    warm_start: np.ndarray | None = None,
) -> SimplexSolution:
    """``warm_start`` is a previous solution whose support seeds the free set;
    ignored unless the subproblem on that support is strictly feasible."""
    A = np.ascontiguousarray(A, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    m = A.shape[1]
    if m == 1:
        return SimplexSolution(np.ones(1), _objective(A, b, np.ones(1)), 0)
    # KKT tolerance on the reduced gradient, relative to problem scale
    scale = max(1.0, float(np.abs(A).max()) ** 2, float(np.abs(b).max()) ** 2)
    warm = _NO_WARM if warm_start is None else np.asarray(warm_start, dtype=float)
    w, n_iter, status = _active_set_kernel(A, b, warm, int(max_iter), tol * scale)
    if status == 1:
        raise SolverFailure(f"active-set solver did not converge in {max_iter} iterations")
    if status == 2:
        raise SolverFailure("active-set solver lost feasibility")
    w = _finalize(w)
    return SimplexSolution(w, _objective(A, b, w), int(n_iter))


def solve_projected_gradient(
    A: np.ndarray, b: np.ndarray, max_iter: int = 10_000, tol: float = 1e-10
) -> SimplexSolution:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m = A.shape[1]
    w = np.full(m, 1.0 / m)
    if m == 1:
        return SimplexSolution(w, _objective(A, b, w), 0)
    lipschitz = 2.0 * np.linalg.norm(A, 2) ** 2
    if lipschitz == 0.0:
        return SimplexSolution(w, _objective(A, b, w), 0)
    step = 1.0 / lipschitz
    y, t = w.copy(), 1.0
    f_prev = _objective(A, b, w)
    for k in range(1, max_iter + 1):
        grad = 2.0 * (A.T @ (A @ y - b))
        w_next = project_simplex(y - step * grad)
        f_next = _objective(A, b, w_next)
        if f_next > f_prev:
            # restart momentum
            y, t = w.copy(), 1.0
            continue
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = w_next + ((t - 1.0) / t_next) * (w_next - w)
        converged = f_prev - f_next < tol
        w, t, f_prev = w_next, t_next, f_next
        if converged and k > 1:
            return SimplexSolution(_finalize(w), f_next, k)
    raise SolverFailure(f"projected gradient did not converge in {max_iter} iterations")


def solve_simplex_lstsq(
    A: np.ndarray,
    b: np.ndarray,
    *,
    solver: str = "active_set",
    max_iter: int = 10_000,
    tol: float = 1e-10,
    warm_start: np.ndarray | None = None,
) -> SimplexSolution:
    if solver == "active_set":
        return solve_active_set(A, b, max_iter, tol, warm_start)
    if solver == "projected_gradient":
        return solve_projected_gradient(A, b, max_iter, tol)
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")
