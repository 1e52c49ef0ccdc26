"""Placebo-based inference for the synthetic control estimates.

Placebo ranks describe how unusual an estimate is among untreated players;
with this many targets and coarse ranks they indicate reliability rather
than serve as formal hypothesis tests.
"""
from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import INTERVENTION_YEAR, EstimateKind, Outcome, PanelDataset
from .exceptions import DegenerateDesign, DegeneratePreFit, PanelCauseError
from .ingest import MIN_PA, build_donor_pool
from .scm.problem import DEFAULT_CONFIG, ScmConfig, ScmFit, fit_player

log = logging.getLogger(__name__)

PLACEBO_CAVEAT = (
    "Placebo p-values are coarse ranks against untreated players; read them as "
    "a reliability indicator, not as strict hypothesis tests."
)
DUMP_COLUMNS = ("player_id", "outcome", "estimate", "pre_rmspe", "mspe_ratio", "is_target", "p_value")


@dataclass(frozen=True)
class PlaceboEntry:
    """One refit. ``effects`` maps each post year to observed minus synthetic;
    failed fits carry the reason in ``failure`` and no numbers."""

    player_id: str
    effects: Mapping[int, float]
    pre_rmspe: float | None
    mspe_ratio: float | None
    failure: str | None = None
    fit: ScmFit | None = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.failure is None

    @property
    def estimate(self) -> float | None:
        """Effect in the first post year."""
        if not self.effects:
            return None
        return self.effects[min(self.effects)]


@dataclass(frozen=True)
class PlaceboDistribution:
    outcome: Outcome
    intervention_year: int
    kind: EstimateKind
    post_years: tuple[int, ...]
    entries: tuple[PlaceboEntry, ...]

    @property
    def successful(self) -> list[PlaceboEntry]:
        return [e for e in self.entries if e.ok]

    def estimates(self, year: int | None = None) -> np.ndarray:
        year = self.post_years[0] if year is None else year
        return np.array([e.effects[year] for e in self.successful], dtype=float)

    @property
    def n_failed(self) -> int:
        return sum(1 for e in self.entries if not e.ok)

    def share_positive(self, year: int | None = None) -> float:
        est = self.estimates(year)
        return float(np.mean(est > 0)) if est.size else float("nan")


def mspe_ratio(fit: ScmFit, post_years: Iterable[int]) -> float:
    """Post-period over pre-period mean squared prediction error."""
    pre = [fit.gap(s) ** 2 for s in fit.pre_seasons]
    pre_mspe = float(np.mean(pre)) if pre else 0.0
    if pre_mspe < 1e-12:
        raise DegeneratePreFit(f"pre-period MSPE {pre_mspe:.3g} for {fit.target_id} is too small")
    post = [fit.gap(s) ** 2 for s in sorted(set(post_years))]
    return float(np.mean(post)) / pre_mspe


def placebo_p_value(
    target_estimate: float,
    distribution: PlaceboDistribution | Sequence[float],
    year: int | None = None,
) -> float:
    """``(1 + #{|placebo| >= |target|}) / (1 + n)`` over the n placebo estimates."""
    if isinstance(distribution, PlaceboDistribution):
        est = distribution.estimates(year)
    else:
        est = np.asarray(distribution, dtype=float)
    if est.size == 0:
        raise ValueError("placebo distribution is empty")
    hits = int(np.count_nonzero(np.abs(est) >= abs(target_estimate)))
    return (1 + hits) / (1 + est.size)


def _entry(fit: ScmFit, post_years) -> PlaceboEntry:
    try:
        ratio = mspe_ratio(fit, post_years)
    except DegeneratePreFit:
        ratio = None
    effects = {y: e.estimate for y, e in sorted(fit.post_effects.items())}
    return PlaceboEntry(fit.target_id, effects, fit.pre_rmspe, ratio, None, fit)


def _fit_one(args) -> PlaceboEntry:
    (pid, donors, panel, outcome, year, post_years, kind, config, through, min_pa) = args
    try:
        pool = build_donor_pool(pid, donors, panel, through=through, min_pa=min_pa)
        fit = fit_player(
            pid, pool, outcome, panel, intervention_year=year, post_years=post_years,
            kind=kind, config=config, min_pa=min_pa,
        )
    except PanelCauseError as exc:
        log.warning("%s fit for %s failed: %s", kind.value, pid, exc)
        return PlaceboEntry(pid, {}, None, None, f"{type(exc).__name__}: {exc}")
    return _entry(fit, post_years)


def _map(fn: Callable, jobs: list, n_jobs: int) -> list:
    if n_jobs <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, jobs))


def fit_batch(
    players: Iterable[str],
    donors_for: Callable[[str], list[str]],
    panel: PanelDataset,
    outcome: Outcome,
    *,
    kind: EstimateKind,
    intervention_year: int = INTERVENTION_YEAR,
    post_years: Sequence[int] = (INTERVENTION_YEAR,),
    config: ScmConfig = DEFAULT_CONFIG,
    through: int = INTERVENTION_YEAR,
    min_pa: int = MIN_PA,
    n_jobs: int = 1,
) -> PlaceboDistribution:
    """Fit every player against ``donors_for(player)``.

    Failures are recorded on the entry rather than raised. Entries come back
    sorted by player id whatever ``n_jobs`` is, so output order is stable.
    """
    post_years = tuple(sorted(set(post_years)))
    jobs = [
        (pid, donors_for(pid), panel, outcome, intervention_year, post_years, kind, config, through, min_pa)
        for pid in sorted(set(players))
    ]
    entries = sorted(_map(_fit_one, jobs, n_jobs), key=lambda e: e.player_id)
    dist = PlaceboDistribution(outcome, intervention_year, kind, post_years, tuple(entries))
    if dist.n_failed:
        log.info("%s %s: %d of %d fits failed", kind.value, outcome.value, dist.n_failed, len(entries))
    return dist


def run_in_space_placebos(
    controls: Iterable[str],
    panel: PanelDataset,
    outcome: Outcome,
    *,
    intervention_year: int = INTERVENTION_YEAR,
    post_years: Sequence[int] | None = None,
    through: int = INTERVENTION_YEAR,
    config: ScmConfig = DEFAULT_CONFIG,
    min_pa: int = MIN_PA,
    n_jobs: int = 1,
) -> PlaceboDistribution:
    """Each control in turn as the target, itself left out of the pool.

    With ``intervention_year=2022`` this is the in-time variant for controls.
    """
    controls = sorted(set(controls))
    kind = EstimateKind.PLACEBO if intervention_year == INTERVENTION_YEAR else EstimateKind.IN_TIME_PLACEBO
    return fit_batch(
        controls, lambda pid: [c for c in controls if c != pid], panel, outcome,
        kind=kind, intervention_year=intervention_year,
        post_years=post_years or (intervention_year,),
        config=config, through=through, min_pa=min_pa, n_jobs=n_jobs,
    )


def run_in_unit_placebos(
    in_unit_players: Iterable[str],
    controls: Iterable[str],
    panel: PanelDataset,
    outcome: Outcome,
    *,
    config: ScmConfig = DEFAULT_CONFIG,
    min_pa: int = MIN_PA,
    n_jobs: int = 1,
) -> PlaceboDistribution:
    """Weakly shifted players as targets against the usual low-shift pool."""
    controls = sorted(set(controls))
    return fit_batch(
        in_unit_players, lambda pid: controls, panel, outcome,
        kind=EstimateKind.IN_UNIT_PLACEBO, config=config, min_pa=min_pa, n_jobs=n_jobs,
    )


def run_in_time_placebo(
    targets: Iterable[str],
    controls: Iterable[str],
    panel: PanelDataset,
    outcome: Outcome,
    *,
    config: ScmConfig = DEFAULT_CONFIG,
    min_pa: int = MIN_PA,
    n_jobs: int = 1,
) -> PlaceboDistribution:
    """Main-analysis targets and pools with 2022 posing as the intervention."""
    controls = sorted(set(controls))
    return fit_batch(
        targets, lambda pid: controls, panel, outcome,
        kind=EstimateKind.IN_TIME_PLACEBO, intervention_year=2022, post_years=(2022,),
        config=config, min_pa=min_pa, n_jobs=n_jobs,
    )


def dose_response_fit(estimates: Iterable[tuple[float, float]]) -> tuple[float, float]:
    """Ordinary least squares of effect on 2022 shift rate: (slope, intercept)."""
    pts = np.asarray(list(estimates), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 2 or np.ptp(pts[:, 0]) == 0.0:
        raise DegenerateDesign("need at least two distinct shift rates")
    x, y = pts[:, 0], pts[:, 1]
    xc = x - x.mean()
    slope = float(xc @ (y - y.mean()) / (xc @ xc))
    return slope, float(y.mean() - slope * x.mean())


__all__ = [
    "DUMP_COLUMNS", "PLACEBO_CAVEAT", "PlaceboDistribution", "PlaceboEntry", "dose_response_fit", "fit_batch",
    "mspe_ratio", "placebo_p_value", "run_in_space_placebos", "run_in_time_placebo",
    "run_in_unit_placebos",
]
