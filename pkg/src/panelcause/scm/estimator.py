"""Scikit-learn compatible synthetic control estimators.

Both estimators treat each *row* of ``X`` as a matched quantity (a covariate
or a season's outcome) and each *column* as a donor unit; ``y`` holds the
target unit's values for the same rows. A fitted model predicts
``X_new @ coef_``, where ``coef_`` lies on the probability simplex, so the
counterfactual for any season is a convex blend of the donors' values.
"""
from __future__ import annotations

import numpy as np
from scipy.optimize import minimize
from scipy.special import softmax
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ..exceptions import SolverFailure
from .simplex import SOLVERS, solve_simplex_lstsq


def _check_solver(solver):
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got {solver!r}")


def _validate_simplex(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {v.shape}")
    if np.any(v < 0) or not np.isclose(v.sum(), 1.0, rtol=0, atol=1e-8):
        raise ValueError(f"{name} must be non-negative and sum to 1")
    return v


class SimplexLeastSquares(RegressorMixin, BaseEstimator):
    """Weighted least squares with coefficients constrained to the simplex.

    Minimises ``sum_k sample_weight[k] * (y[k] - X[k] @ coef)**2`` over
    non-negative ``coef`` summing to one. No intercept.

    Parameters
    ----------
    solver : {"active_set", "projected_gradient"}
    max_iter : int
        Iteration budget; exceeding it raises ``SolverFailure``.
    tol : float
        Convergence tolerance (objective change for projected gradient,
        scaled reduced-gradient threshold for the active-set method).
    """

    def __init__(self, solver="active_set", max_iter=10_000, tol=1e-10):
        self.solver = solver
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y, sample_weight=None, warm_start=None):
        _check_solver(self.solver)
        X, y = check_X_y(X, y, y_numeric=True, ensure_min_samples=1)
        if sample_weight is None:
            sw = np.ones(X.shape[0])
        else:
            sw = np.asarray(sample_weight, dtype=float)
            if sw.shape != (X.shape[0],) or np.any(sw < 0):
                raise ValueError("sample_weight must be non-negative, one entry per row")
        root = np.sqrt(sw)
        sol = solve_simplex_lstsq(
            X * root[:, None], y * root,
            solver=self.solver, max_iter=self.max_iter, tol=self.tol, warm_start=warm_start,
        )
        self.coef_ = sol.weights
        self.objective_ = sol.objective
        self.n_iter_ = sol.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} donor columns, got {X.shape[1]}")
        return X @ self.coef_


class SyntheticControl(RegressorMixin, BaseEstimator):
    """Synthetic control with validated covariate importance weights.

    ``fit(X, y, X_val, y_val)`` finds donor weights ``coef_`` minimising the
    importance-weighted covariate discrepancy between target ``y`` and donors
    ``X``; the importance weights ``importance_weights_`` are themselves chosen
    to minimise the mean squared error of ``X_val @ coef_`` against ``y_val``
    (the target's pre-period outcomes). When ``X_val`` is omitted the
    covariates double as the validation rows.

    Rows of ``X`` are divided by their standard deviation across donors
    before weighting when ``standardize`` is true (rows with no spread are
    left as they are). The importance weights are searched with Nelder-Mead
    over an unconstrained vector mapped through a softmax, started from the
    uniform vector and from normalised inverse row variances of the raw
    covariates; the lower validation error wins, the earlier start on ties.

    Parameters
    ----------
    standardize : bool
    solver, max_iter, tol :
        Passed to :class:`SimplexLeastSquares`.
    outer_maxfev : int
        Function-evaluation budget per Nelder-Mead start.
    outer_step : float
        Edge length of the initial Nelder-Mead simplex in softmax space.
    outer_xatol, outer_fatol : float
        Nelder-Mead stopping tolerances.
    starts : tuple of {"uniform", "inverse_variance"}
    """

    def __init__(
        self,
        standardize=True,
        solver="active_set",
        max_iter=10_000,
        tol=1e-10,
        outer_maxfev=400,
        outer_step=1.0,
        outer_xatol=1e-4,
        outer_fatol=1e-12,
        starts=("uniform", "inverse_variance"),
    ):
        self.standardize = standardize
        self.solver = solver
        self.max_iter = max_iter
        self.tol = tol
        self.outer_maxfev = outer_maxfev
        self.outer_step = outer_step
        self.outer_xatol = outer_xatol
        self.outer_fatol = outer_fatol
        self.starts = starts

    def _inner(self):
        return SimplexLeastSquares(solver=self.solver, max_iter=self.max_iter, tol=self.tol)

    def _scales(self, X):
        if not self.standardize:
            return np.ones(X.shape[0])
        sd = X.std(axis=1)
        return np.where(sd > 0.0, sd, 1.0)

    def _start(self, name, X):
        k = X.shape[0]
        if name == "uniform":
            return np.full(k, 1.0 / k)
        if name == "inverse_variance":
            var = X.var(axis=1)
            floor = var[var > 0].min() if np.any(var > 0) else 1.0
            inv = 1.0 / np.where(var > 0, var, floor)
            return inv / inv.sum()
        raise ValueError(f"unknown start {name!r}")

    def fit(self, X, y, X_val=None, y_val=None):
        _check_solver(self.solver)
        X, y = check_X_y(X, y, y_numeric=True, ensure_min_samples=1)
        if X_val is None:
            X_val, y_val = X, y
        X_val, y_val = check_X_y(X_val, y_val, y_numeric=True, ensure_min_samples=1)
        if X_val.shape[1] != X.shape[1]:
            raise ValueError("X and X_val must have the same donor columns")

        k, m = X.shape
        self.scale_ = self._scales(X)
        Xs = X / self.scale_[:, None]
        ys = y / self.scale_
        self.n_features_in_ = m

        if m == 1 or k == 1:
            # importance weights cannot change the solution
            v = np.full(k, 1.0 / k)
            self._set_solution(Xs, ys, v, X_val, y_val)
            self.n_outer_evals_ = 0
            return self

        def mspe_of(v, warm=None):
            root = np.sqrt(v)
            sol = solve_simplex_lstsq(
                Xs * root[:, None], ys * root, solver=self.solver,
                max_iter=self.max_iter, tol=self.tol, warm_start=warm,
            )
            err = X_val @ sol.weights - y_val
            return float(err @ err) / len(err), sol.weights

        best_v, best_mspe, evals = None, np.inf, 0
        for name in self.starts:
            v0 = self._start(name, X)
            z0 = np.log(v0)
            state = {"warm": None}

            def objective(z):
                mspe, coef = mspe_of(softmax(z), state["warm"])
                state["warm"] = coef
                return mspe

            simplex = np.vstack([z0] + [z0 + self.outer_step * e for e in np.eye(k)])
            res = minimize(
                objective, z0, method="Nelder-Mead",
                options=dict(
                    initial_simplex=simplex, maxfev=self.outer_maxfev,
                    xatol=self.outer_xatol, fatol=self.outer_fatol, adaptive=True,
                ),
            )
            evals += res.nfev
            if not np.all(np.isfinite(res.x)):
                raise SolverFailure(f"importance-weight search diverged from start {name!r}")
            v = softmax(res.x)
            # cold re-solve so coef_ depends on v alone
            mspe, _ = mspe_of(v)
            if mspe < best_mspe:
                best_v, best_mspe = v, mspe
        self.n_outer_evals_ = evals
        self._set_solution(Xs, ys, best_v, X_val, y_val)
        return self

    def _set_solution(self, Xs, ys, v, X_val, y_val):
        inner = self._inner().fit(Xs, ys, sample_weight=v)
        self.importance_weights_ = v
        self.coef_ = inner.coef_
        self.objective_ = inner.objective_
        err = X_val @ self.coef_ - y_val
        self.validation_mspe_ = float(err @ err) / len(err)

    def fit_weights(self, X, y, importance_weights):
        """Donor weights for fixed importance weights (no outer search)."""
        X, y = check_X_y(X, y, y_numeric=True, ensure_min_samples=1)
        v = _validate_simplex(importance_weights, X.shape[0], "importance_weights")
        self.scale_ = self._scales(X)
        inner = self._inner().fit(X / self.scale_[:, None], y / self.scale_, sample_weight=v)
        return inner.coef_, inner.objective_

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} donor columns, got {X.shape[1]}")
        return X @ self.coef_
