"""Synthetic control: simplex-constrained solvers, estimators and player problems."""
from .estimator import SimplexLeastSquares, SyntheticControl
from .problem import (
    DEFAULT_CONFIG,
    ScmConfig,
    ScmFit,
    ScmProblem,
    assemble_problem,
    covariate_recipe,
    estimate_effect,
    fit_donor_weights,
    fit_player,
    optimize_importance_weights,
    refit_2024,
)
from .simplex import SimplexSolution, project_simplex, solve_simplex_lstsq

__all__ = [
    "DEFAULT_CONFIG", "ScmConfig", "ScmFit", "ScmProblem", "SimplexLeastSquares", "SimplexSolution",
    "SyntheticControl", "assemble_problem", "covariate_recipe", "estimate_effect", "fit_donor_weights",
    "fit_player", "optimize_importance_weights", "project_simplex", "refit_2024", "solve_simplex_lstsq",
]
