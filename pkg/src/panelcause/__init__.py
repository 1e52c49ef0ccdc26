"""Causal panel analyses of the 2023 infield shift restriction.

League-level difference-in-differences on handedness splits, player-level
synthetic controls with placebo inference, and a CLI that writes plain
CSV/JSON reports.
"""
from .config import RunConfig
from .core import (
    Cohort,
    CohortBounds,
    EffectEstimate,
    EstimateKind,
    LeagueSplitSeries,
    Outcome,
    PanelDataset,
    PlayerSeason,
    Population,
    ShiftCohort,
    assign_cohort,
    validate_panel,
)
from .did import did_2x2, did_series, rescale_att
from .inference import (
    PlaceboDistribution,
    dose_response_fit,
    mspe_ratio,
    placebo_p_value,
    run_in_space_placebos,
    run_in_time_placebo,
    run_in_unit_placebos,
)
from .ingest import (
    build_cohorts,
    build_donor_pool,
    load_league_splits,
    load_player_seasons,
    load_shift_rates,
)
from .scm import ScmConfig, ScmFit, SimplexLeastSquares, SyntheticControl, fit_player, refit_2024

__version__ = "0.1.0"

__all__ = [
    "Cohort", "CohortBounds", "EffectEstimate", "EstimateKind", "LeagueSplitSeries", "Outcome",
    "PanelDataset", "PlaceboDistribution", "PlayerSeason", "Population", "RunConfig", "ScmConfig",
    "ScmFit", "ShiftCohort", "SimplexLeastSquares", "SyntheticControl", "assign_cohort",
    "build_cohorts", "build_donor_pool", "did_2x2", "did_series", "dose_response_fit",
    "fit_player", "load_league_splits", "load_player_seasons", "load_shift_rates", "mspe_ratio",
    "placebo_p_value", "refit_2024", "rescale_att", "run_in_space_placebos", "run_in_time_placebo",
    "run_in_unit_placebos", "validate_panel",
]
