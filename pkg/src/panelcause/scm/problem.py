"""Player-level synthetic control problems built from the panel."""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from ..core import (
    INTERVENTION_YEAR,
    EffectEstimate,
    EstimateKind,
    Outcome,
    PanelDataset,
    PlayerSeason,
)
from ..exceptions import EmptyDonorPool, MissingCovariate, MissingSeason
from ..ingest import MIN_PA, DonorPool, build_donor_pool, eligible_seasons, passes_gate
from .estimator import SyntheticControl

log = logging.getLogger(__name__)

RECENT_SEASONS = (2022, 2021)
DISPLAY_WEIGHT_FLOOR = 0.001


@dataclass(frozen=True)
class ScmConfig:
    solver: str = "active_set"
    max_iter: int = 10_000
    tol: float = 1e-10
    outer_maxfev: int = 400
    outer_step: float = 1.0
    outer_xatol: float = 1e-4
    outer_fatol: float = 1e-12
    starts: tuple[str, ...] = ("uniform", "inverse_variance")
    standardize: bool = True

    def estimator(self) -> SyntheticControl:
        return SyntheticControl(
            standardize=self.standardize,
            solver=self.solver,
            max_iter=self.max_iter,
            tol=self.tol,
            outer_maxfev=self.outer_maxfev,
            outer_step=self.outer_step,
            outer_xatol=self.outer_xatol,
            outer_fatol=self.outer_fatol,
            starts=tuple(self.starts),
        )


DEFAULT_CONFIG = ScmConfig()


@dataclass(frozen=True, eq=False)
class ScmProblem:
    target_id: str
    donor_pool: DonorPool
    outcome: Outcome
    pre_seasons: tuple[int, ...]
    intervention_year: int
    covariate_labels: tuple[str, ...]
    target_covariates: np.ndarray        # (K,)
    donor_covariates: np.ndarray         # (K, m)
    pre_outcome_matrix: np.ndarray       # (len(pre_seasons), 1 + m): target first
    seasons: tuple[int, ...]             # every season with donor outcomes available
    donor_outcomes: np.ndarray           # (len(seasons), m)
    target_observed: Mapping[int, float]

    @property
    def donor_ids(self) -> tuple[str, ...]:
        return self.donor_pool.donor_ids

    @property
    def validation_seasons(self) -> tuple[int, ...]:
        return self.pre_seasons

    @property
    def covariate_rows(self) -> list[tuple[str, float, np.ndarray]]:
        return [
            (label, float(t), self.donor_covariates[i])
            for i, (label, t) in enumerate(zip(self.covariate_labels, self.target_covariates))
        ]


def _record(panel: PanelDataset, pid: str, season: int, label: str) -> PlayerSeason:
    try:
        return panel[(pid, season)]
    except KeyError:
        raise MissingCovariate(pid, label) from None


def covariate_recipe(
    outcome: Outcome, pre_seasons: Sequence[int], intervention_year: int
) -> list[tuple[str, str, tuple[int, ...]]]:
    """(label, field, seasons averaged) for each covariate row, in row order.

    Outcome rows per pre season, then age in the season before the
    intervention, then each of the six stats at 2022 and 2021 (only those
    before the intervention) and averaged over the pre-2020 pre seasons.
    """
    rows = [(f"{outcome.column}_{s}", outcome.column, (s,)) for s in pre_seasons]
    age_season = intervention_year - 1
    rows.append((f"age_{age_season}", "age", (age_season,)))
    recent = [s for s in RECENT_SEASONS if s < intervention_year]
    early = tuple(s for s in pre_seasons if s < 2020)
    for stat in PlayerSeason.STATS:
        for s in recent:
            rows.append((f"{stat}_{s}", stat, (s,)))
        if early:
            rows.append((f"{stat}_pre2020_mean", stat, early))
    return rows


def _covariate_value(panel, pid, label, fld, seasons):
    return float(np.mean([_record(panel, pid, s, label).value(fld) for s in seasons]))


def assemble_problem(
    target: str,
    pool: DonorPool,
    outcome: Outcome,
    panel: PanelDataset,
    intervention_year: int = INTERVENTION_YEAR,
    *,
    post_years: Iterable[int] | None = None,
    min_pa: int = MIN_PA,
) -> ScmProblem:
    if not pool.donor_ids:
        raise EmptyDonorPool(target)
    history = panel.history(target)
    eligible = eligible_seasons(history, min_pa)
    required_recent = [s for s in RECENT_SEASONS if s < intervention_year]
    for s in required_recent:
        if s not in eligible:
            raise MissingCovariate(target, f"{outcome.column}_{s}")
    pre = tuple(s for s in eligible if s < intervention_year)
    if post_years is None:
        post_years = [intervention_year]
    post = tuple(sorted(set(post_years)))

    recipe = covariate_recipe(outcome, pre, intervention_year)
    labels = tuple(r[0] for r in recipe)
    donors = pool.donor_ids
    target_cov = np.array([_covariate_value(panel, target, *r) for r in recipe])
    donor_cov = np.array(
        [[_covariate_value(panel, d, *r) for d in donors] for r in recipe]
    )

    seasons = tuple(sorted(set(pre) | set(post)))
    donor_out = np.empty((len(seasons), len(donors)))
    for i, s in enumerate(seasons):
        for j, d in enumerate(donors):
            rec = panel.get((d, s))
            if rec is None:
                raise MissingSeason(d, s)
            donor_out[i, j] = rec.outcome(outcome)
    observed = {s: history[s].outcome(outcome) for s in seasons if s in history}
    pre_matrix = np.column_stack(
        [np.array([observed[s] for s in pre]), donor_out[[seasons.index(s) for s in pre]]]
    ) if pre else np.empty((0, 1 + len(donors)))
    return ScmProblem(
        target_id=target,
        donor_pool=pool,
        outcome=outcome,
        pre_seasons=pre,
        intervention_year=intervention_year,
        covariate_labels=labels,
        target_covariates=target_cov,
        donor_covariates=donor_cov,
        pre_outcome_matrix=pre_matrix,
        seasons=seasons,
        donor_outcomes=donor_out,
        target_observed=observed,
    )


@dataclass(frozen=True, eq=False)
class ScmFit:
    target_id: str
    outcome: Outcome
    intervention_year: int
    donor_ids: tuple[str, ...]
    donor_weights: np.ndarray
    covariate_labels: tuple[str, ...]
    importance_weights: np.ndarray
    pre_seasons: tuple[int, ...]
    synthetic_trajectory: Mapping[int, float]
    observed: Mapping[int, float]
    pre_rmspe: float
    inner_objective: float
    post_effects: Mapping[int, EffectEstimate] = field(default_factory=dict)

    def gap(self, season: int) -> float:
        return self.observed[season] - self.synthetic_trajectory[season]

    def top_donors(self, floor: float = DISPLAY_WEIGHT_FLOOR) -> list[tuple[str, float]]:
        """Donors at or above ``floor``, heaviest first (display only)."""
        pairs = [(d, float(w)) for d, w in zip(self.donor_ids, self.donor_weights) if w >= floor]
        return sorted(pairs, key=lambda p: (-p[1], p[0]))

    def to_dict(self, panel: PanelDataset | None = None) -> dict:
        def name(pid):
            return panel.name(pid) if panel is not None else pid
        return {
            "target": self.target_id,
            "target_name": name(self.target_id),
            "outcome": self.outcome.value,
            "intervention_year": self.intervention_year,
            "donor_weights": [
                {"player_id": d, "name": name(d), "weight": float(w)}
                for d, w in zip(self.donor_ids, self.donor_weights)
            ],
            "importance_weights": [
                {"label": lab, "weight": float(v)}
                for lab, v in zip(self.covariate_labels, self.importance_weights)
            ],
            "trajectory": [
                {"season": s, "observed": self.observed.get(s), "synthetic": self.synthetic_trajectory[s]}
                for s in sorted(self.synthetic_trajectory)
            ],
            "pre_rmspe": self.pre_rmspe,
            "inner_objective": self.inner_objective,
            "effects": [
                {"season": s, "estimate": e.estimate, "kind": e.kind.value}
                for s, e in sorted(self.post_effects.items())
            ],
        }


def fit_donor_weights(
    problem: ScmProblem, v: np.ndarray, config: ScmConfig = DEFAULT_CONFIG
) -> tuple[np.ndarray, float]:
    """Donor weights for fixed importance weights ``v`` and the achieved
    weighted (standardised) covariate discrepancy."""
    return config.estimator().fit_weights(problem.donor_covariates, problem.target_covariates, v)


def optimize_importance_weights(
    problem: ScmProblem, config: ScmConfig = DEFAULT_CONFIG
) -> ScmFit:
    est = config.estimator()
    pre_idx = [problem.seasons.index(s) for s in problem.pre_seasons]
    if pre_idx:
        X_val = problem.donor_outcomes[pre_idx]
        y_val = np.array([problem.target_observed[s] for s in problem.pre_seasons])
    else:
        X_val = y_val = None
    est.fit(problem.donor_covariates, problem.target_covariates, X_val, y_val)
    synthetic = est.predict(problem.donor_outcomes)
    trajectory = {s: float(x) for s, x in zip(problem.seasons, synthetic)}
    errors = [problem.target_observed[s] - trajectory[s] for s in problem.pre_seasons]
    pre_rmspe = float(np.sqrt(np.mean(np.square(errors)))) if errors else 0.0
    return ScmFit(
        target_id=problem.target_id,
        outcome=problem.outcome,
        intervention_year=problem.intervention_year,
        donor_ids=problem.donor_ids,
        donor_weights=est.coef_,
        covariate_labels=problem.covariate_labels,
        importance_weights=est.importance_weights_,
        pre_seasons=problem.pre_seasons,
        synthetic_trajectory=trajectory,
        observed=dict(problem.target_observed),
        pre_rmspe=pre_rmspe,
        inner_objective=float(est.objective_),
    )


def estimate_effect(
    fit: ScmFit,
    observed: Mapping[int, float],
    years: Iterable[int],
    kind: EstimateKind = EstimateKind.ATT,
) -> list[EffectEstimate]:
    """Observed minus synthetic for each requested year."""
    out = []
    for y in sorted(set(years)):
        if y not in observed:
            raise MissingSeason(fit.target_id, y)
        if y not in fit.synthetic_trajectory:
            raise MissingSeason("synthetic " + fit.target_id, y)
        out.append(EffectEstimate(
            fit.outcome, fit.target_id, y, observed[y] - fit.synthetic_trajectory[y], kind,
        ))
    return out


def fit_player(
    target: str,
    pool: DonorPool,
    outcome: Outcome,
    panel: PanelDataset,
    *,
    intervention_year: int = INTERVENTION_YEAR,
    post_years: Iterable[int] | None = None,
    kind: EstimateKind = EstimateKind.ATT,
    config: ScmConfig = DEFAULT_CONFIG,
    min_pa: int = MIN_PA,
) -> ScmFit:
    """Assemble, fit and attach effects for one target and outcome."""
    post_years = tuple(sorted(set(post_years or (intervention_year,))))
    problem = assemble_problem(
        target, pool, outcome, panel, intervention_year, post_years=post_years, min_pa=min_pa,
    )
    fit = optimize_importance_weights(problem, config)
    effects = estimate_effect(fit, fit.observed, post_years, kind)
    object.__setattr__(fit, "post_effects", {e.year: e for e in effects})
    return fit


EXTENSION_GATE = (2021, 2022, 2023, 2024)
EXTENSION_GATE_2024_ONLY = (2021, 2022, 2024)


def refit_2024(
    targets: Iterable[str],
    controls: Iterable[str],
    panel: PanelDataset,
    outcome: Outcome,
    *,
    only_2024: bool = False,
    config: ScmConfig = DEFAULT_CONFIG,
    min_pa: int = MIN_PA,
) -> list[ScmFit]:
    """Refit targets through 2024 against controls that also played 2024.

    The default gate requires ``min_pa`` in each of 2021-2024 and yields
    effects for 2023 and 2024. With ``only_2024`` the 2023 requirement is
    dropped and only the 2024 effect is estimated. Players failing the gate
    are skipped silently.
    """
    gate = EXTENSION_GATE_2024_ONLY if only_2024 else EXTENSION_GATE
    post_years = (2024,) if only_2024 else (2023, 2024)
    keep_targets = sorted(t for t in set(targets) if passes_gate(panel, t, gate, min_pa))
    keep_controls = sorted(c for c in set(controls) if passes_gate(panel, c, gate, min_pa))
    fits = []
    for t in keep_targets:
        pool = build_donor_pool(t, keep_controls, panel, through=2024, min_pa=min_pa)
        fits.append(fit_player(
            t, pool, outcome, panel, post_years=post_years, config=config, min_pa=min_pa,
        ))
    return fits


__all__ = [
    "DEFAULT_CONFIG", "EXTENSION_GATE", "EXTENSION_GATE_2024_ONLY", "ScmConfig", "ScmFit",
    "ScmProblem", "assemble_problem", "covariate_recipe", "estimate_effect", "fit_donor_weights",
    "fit_player", "optimize_importance_weights", "refit_2024",
]
