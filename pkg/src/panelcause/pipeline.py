"""Run the configured analyses end to end and collect the results."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .core import (
    INTERVENTION_YEAR,
    Cohort,
    EffectEstimate,
    EstimateKind,
    LeagueSplitSeries,
    Outcome,
    PanelDataset,
    Population,
    ShiftCohort,
)
from .did import DidResult, did_series, rescale_att
from .exceptions import DegenerateDesign, MissingSeason, PanelCauseError
from .inference import (
    PlaceboDistribution,
    dose_response_fit,
    fit_batch,
    placebo_p_value,
    run_in_space_placebos,
    run_in_time_placebo,
    run_in_unit_placebos,
)
from .ingest import (
    MAIN_GATE,
    build_cohorts,
    cohort_members,
    load_league_splits,
    load_player_seasons,
    load_shift_rates,
    split_lookup,
)
from .scm.problem import EXTENSION_GATE, EXTENSION_GATE_2024_ONLY

log = logging.getLogger(__name__)

LEAGUE_FILE = "league_splits.csv"
PLAYER_FILE = "player_seasons.csv"
SHIFT_FILE = "shift_rates.csv"


class MissingInputFile(PanelCauseError):
    def __init__(self, path: Path, needed_by: str):
        self.path = Path(path)
        self.needed_by = needed_by
        super().__init__(f"missing input file {self.path.name} ({self.path}), needed by {needed_by}")


class MissingInputFiles(PanelCauseError):
    def __init__(self, problems: list[MissingInputFile]):
        self.problems = problems
        super().__init__("; ".join(str(p) for p in problems))


def required_files(config: RunConfig) -> dict[str, str]:
    """File name -> first analysis that needs it."""
    need = {}
    if config.enabled("did"):
        need[LEAGUE_FILE] = "did"
    if config.enabled("scm"):
        need[PLAYER_FILE] = "scm"
        need[SHIFT_FILE] = "scm"
    return need


def check_inputs(config: RunConfig) -> list[MissingInputFile]:
    return [
        MissingInputFile(config.data_dir / name, by)
        for name, by in required_files(config).items()
        if not (config.data_dir / name).is_file()
    ]


@dataclass
class Results:
    config: RunConfig
    league: list[LeagueSplitSeries] = field(default_factory=list)
    panel: PanelDataset | None = None
    shift_rates: dict[str, float] = field(default_factory=dict)
    cohorts: list[ShiftCohort] = field(default_factory=list)
    did: dict[Outcome, list[DidResult]] = field(default_factory=dict)
    did_rescaled: dict[Outcome, EffectEstimate] = field(default_factory=dict)
    targets: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    placebos: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    p_values: dict[Outcome, dict[str, float]] = field(default_factory=dict)
    in_unit: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    in_time: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    in_time_controls: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    extension: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    extension_placebos: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    extension_p_values: dict[Outcome, dict[tuple[str, int], float]] = field(default_factory=dict)
    extension_2024_only: dict[Outcome, PlaceboDistribution] = field(default_factory=dict)
    dose_response: dict[Outcome, tuple[float, float]] = field(default_factory=dict)
    ran: set[str] = field(default_factory=set)

    def members(self, cohort: Cohort) -> list[str]:
        return cohort_members(self.cohorts, cohort)

    def shift_rate(self, pid: str) -> float | None:
        return self.shift_rates.get(pid)


def load_inputs(config: RunConfig, results: Results) -> None:
    missing = check_inputs(config)
    if missing:
        raise missing[0] if len(missing) == 1 else MissingInputFiles(missing)
    if config.enabled("did"):
        results.league = load_league_splits(config.data_dir / LEAGUE_FILE)
    if config.enabled("scm"):
        results.panel = load_player_seasons(config.data_dir / PLAYER_FILE)
        results.shift_rates = load_shift_rates(config.data_dir / SHIFT_FILE)
        results.cohorts = build_cohorts(
            results.shift_rates, results.panel, gate=MAIN_GATE,
            min_pa=config.min_pa, bounds=config.bounds,
        )


def run_did(config: RunConfig, results: Results) -> None:
    lookup = split_lookup(results.league)
    for outcome in config.did_outcomes:
        try:
            lhb = lookup[(Population.LHB, outcome)]
            rhb = lookup[(Population.RHB, outcome)]
        except KeyError:
            raise MissingSeason(f"league split {outcome.value}", INTERVENTION_YEAR) from None
        rows = did_series(lhb, rhb)
        results.did[outcome] = rows
        att = next((r for r in rows if r.year == INTERVENTION_YEAR), None)
        if att is not None and lhb.pa_share and INTERVENTION_YEAR in lhb.pa_share:
            results.did_rescaled[outcome] = rescale_att(att.as_effect(), lhb.pa_share[INTERVENTION_YEAR])
    results.ran.add("did")


def run_scm(config: RunConfig, results: Results) -> None:
    panel = results.panel
    targets = results.members(Cohort.HIGH)
    controls = results.members(Cohort.LOW)
    kw = dict(config=config.scm, min_pa=config.min_pa, n_jobs=config.n_jobs)

    for outcome in config.outcomes:
        results.targets[outcome] = fit_batch(
            targets, lambda pid: controls, panel, outcome, kind=EstimateKind.ATT, **kw,
        )
    results.ran.add("scm")

    if config.enabled("placebos"):
        for outcome in config.outcomes:
            dist = run_in_space_placebos(controls, panel, outcome, **kw)
            results.placebos[outcome] = dist
            results.p_values[outcome] = {
                e.player_id: placebo_p_value(e.estimate, dist)
                for e in results.targets[outcome].successful
            }
        results.ran.add("placebos")

    if config.enabled("in_unit"):
        in_unit = results.members(Cohort.IN_UNIT_PLACEBO)
        for outcome in config.outcomes:
            results.in_unit[outcome] = run_in_unit_placebos(in_unit, controls, panel, outcome, **kw)
        results.ran.add("in_unit")

    if config.enabled("in_time"):
        for outcome in config.outcomes:
            results.in_time[outcome] = run_in_time_placebo(targets, controls, panel, outcome, **kw)
            results.in_time_controls[outcome] = run_in_space_placebos(
                controls, panel, outcome, intervention_year=2022, **kw,
            )
        results.ran.add("in_time")

    if config.enabled("extension_2024"):
        run_extension(config, results)

    if config.enabled("dose_response"):
        for outcome in config.outcomes:
            pts = [
                (results.shift_rates[e.player_id], e.estimate)
                for e in results.targets[outcome].successful
            ]
            try:
                results.dose_response[outcome] = dose_response_fit(pts)
            except DegenerateDesign as exc:
                log.warning("dose response for %s skipped: %s", outcome.value, exc)
        results.ran.add("dose_response")


def run_extension(config: RunConfig, results: Results) -> None:
    panel = results.panel
    kw = dict(config=config.scm, min_pa=config.min_pa, n_jobs=config.n_jobs, through=2024)
    # cohorts are rebuilt under each gate: a player short of the 2023 PA
    # gate can still enter the 2024-only sensitivity run
    def gated(gate, cohort):
        members = build_cohorts(
            results.shift_rates, panel, gate=gate, min_pa=config.min_pa, bounds=config.bounds,
        )
        return cohort_members(members, cohort)

    ext_targets = gated(EXTENSION_GATE, Cohort.HIGH)
    ext_controls = gated(EXTENSION_GATE, Cohort.LOW)
    only_targets = gated(EXTENSION_GATE_2024_ONLY, Cohort.HIGH)
    only_controls = gated(EXTENSION_GATE_2024_ONLY, Cohort.LOW)
    for outcome in config.outcomes:
        results.extension[outcome] = fit_batch(
            ext_targets, lambda pid: ext_controls, panel, outcome,
            kind=EstimateKind.ATT, post_years=(2023, 2024), **kw,
        )
        results.extension_2024_only[outcome] = fit_batch(
            only_targets, lambda pid: only_controls, panel, outcome,
            kind=EstimateKind.ATT, post_years=(2024,), **kw,
        )
        if config.enabled("placebos"):
            dist = run_in_space_placebos(
                ext_controls, panel, outcome, post_years=(2023, 2024), **kw,
            )
            results.extension_placebos[outcome] = dist
            results.extension_p_values[outcome] = {
                (e.player_id, year): placebo_p_value(est, dist, year)
                for e in results.extension[outcome].successful
                for year, est in e.effects.items()
            }
    results.ran.add("extension_2024")


def run_analyses(config: RunConfig) -> Results:
    results = Results(config)
    load_inputs(config, results)
    if config.enabled("did"):
        run_did(config, results)
    if config.enabled("scm"):
        run_scm(config, results)
    return results


__all__ = ["MissingInputFile", "MissingInputFiles", "Results", "check_inputs", "required_files", "run_analyses"]
