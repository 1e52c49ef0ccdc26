"""CSV ingestion, eligibility filters, cohorts and donor pools.

Three input files are understood, each with a fixed header:

``league_splits.csv``
    ``season,handedness,split,pa,pa_share,babip,obp,avg,slg,ops,woba,bb_pct,k_pct``
``player_seasons.csv``
    ``player_id,name,season,age,pa,hits,singles,home_runs,bb_pct,k_pct,obp,ops,woba``
``shift_rates.csv``
    ``player_id,season,shift_pct``

Missing cells are errors. Nothing is imputed.
"""
from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from pathlib import Path

from .core import (
    ANALYSIS_SEASONS,
    DEFAULT_BOUNDS,
    Cohort,
    CohortBounds,
    LeagueSplitSeries,
    Outcome,
    PanelDataset,
    PlayerSeason,
    Population,
    ShiftCohort,
    is_analysis_season,
    season_set,
    validate_panel,
)
from .exceptions import EmptyDonorPool, InvariantViolation, MissingShiftRate, SchemaError

log = logging.getLogger(__name__)

MIN_PA = 250
MAIN_GATE = (2021, 2022, 2023)

LEAGUE_HEADER = (
    "season", "handedness", "split", "pa", "pa_share",
    "babip", "obp", "avg", "slg", "ops", "woba", "bb_pct", "k_pct",
)
PLAYER_HEADER = (
    "player_id", "name", "season", "age", "pa", "hits", "singles",
    "home_runs", "bb_pct", "k_pct", "obp", "ops", "woba",
)
SHIFT_HEADER = ("player_id", "season", "shift_pct")

_HANDEDNESS = {"L": Population.LHB, "R": Population.RHB}
_LEAGUE_OUTCOMES = [Outcome.parse(c) for c in LEAGUE_HEADER[5:]]


def _read_rows(path: Path, header: tuple[str, ...]) -> Iterable[tuple[int, dict[str, str]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            found = next(reader)
        except StopIteration:
            raise SchemaError(1, "<header>", "empty file") from None
        if tuple(c.strip() for c in found) != header:
            raise SchemaError(1, "<header>", f"expected {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise SchemaError(lineno, "<row>", f"expected {len(header)} cells, got {len(row)}")
            cells = {}
            for col, cell in zip(header, row):
                cell = cell.strip()
                if cell == "":
                    raise SchemaError(lineno, col, "missing value")
                cells[col] = cell
            yield lineno, cells


def _int(cells: dict[str, str], col: str, lineno: int) -> int:
    try:
        return int(cells[col])
    except ValueError:
        raise SchemaError(lineno, col, f"not an integer: {cells[col]!r}") from None


def _float(cells: dict[str, str], col: str, lineno: int) -> float:
    try:
        return float(cells[col])
    except ValueError:
        raise SchemaError(lineno, col, f"not a number: {cells[col]!r}") from None


def load_league_splits(path: str | Path) -> list[LeagueSplitSeries]:
    """One series per (population, outcome), ordered LHB then RHB, outcomes in
    file column order. Seasons may be missing; 2020 is rejected."""
    values: dict[tuple[Population, Outcome], dict[int, float]] = {}
    shares: dict[Population, dict[int, float]] = {}
    for lineno, cells in _read_rows(Path(path), LEAGUE_HEADER):
        season = _int(cells, "season", lineno)
        if not is_analysis_season(season):
            raise InvariantViolation("season", season, f"line {lineno}: not an analysis season")
        hand = cells["handedness"]
        if hand not in _HANDEDNESS:
            raise SchemaError(lineno, "handedness", f"expected L or R, got {hand!r}")
        if cells["split"] != "bases_empty":
            raise SchemaError(lineno, "split", f"expected bases_empty, got {cells['split']!r}")
        pop = _HANDEDNESS[hand]
        if season in shares.get(pop, {}):
            raise SchemaError(lineno, "season", f"duplicate {hand} row for {season}")
        shares.setdefault(pop, {})[season] = _float(cells, "pa_share", lineno)
        for outcome in _LEAGUE_OUTCOMES:
            values.setdefault((pop, outcome), {})[season] = _float(cells, outcome.column, lineno)
    out = []
    for pop in (Population.LHB, Population.RHB):
        for outcome in _LEAGUE_OUTCOMES:
            if (pop, outcome) in values:
                out.append(LeagueSplitSeries(pop, outcome, values[(pop, outcome)], shares[pop]))
    return out


def split_lookup(series: Iterable[LeagueSplitSeries]) -> dict[tuple[Population, Outcome], LeagueSplitSeries]:
    return {(s.population, s.outcome): s for s in series}


def parse_player_rows(rows: Iterable[tuple[int, dict[str, str]]]) -> list[PlayerSeason]:
    out = []
    for lineno, c in rows:
        out.append(PlayerSeason(
            player_id=c["player_id"],
            name=c["name"],
            season=_int(c, "season", lineno),
            age=_int(c, "age", lineno),
            pa=_int(c, "pa", lineno),
            hits=_int(c, "hits", lineno),
            singles=_int(c, "singles", lineno),
            home_runs=_int(c, "home_runs", lineno),
            bb_pct=_float(c, "bb_pct", lineno),
            k_pct=_float(c, "k_pct", lineno),
            obp=_float(c, "obp", lineno),
            ops=_float(c, "ops", lineno),
            woba=_float(c, "woba", lineno),
        ))
    return out


def load_player_seasons(path: str | Path) -> PanelDataset:
    return validate_panel(parse_player_rows(_read_rows(Path(path), PLAYER_HEADER)))


def write_player_seasons(panel: PanelDataset, path: str | Path) -> None:
    # repr() of a float round-trips exactly
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PLAYER_HEADER)
        for rec in panel.records():
            writer.writerow([
                rec.player_id, rec.name, rec.season, rec.age, rec.pa, rec.hits,
                rec.singles, rec.home_runs, repr(rec.bb_pct), repr(rec.k_pct),
                repr(rec.obp), repr(rec.ops), repr(rec.woba),
            ])


def load_shift_rates(path: str | Path, season: int = 2022) -> dict[str, float]:
    """Bases-empty shift rate per player for one season."""
    rates = {}
    for lineno, cells in _read_rows(Path(path), SHIFT_HEADER):
        if _int(cells, "season", lineno) != season:
            continue
        rate = _float(cells, "shift_pct", lineno)
        if not 0.0 <= rate <= 1.0:
            raise InvariantViolation("shift_pct", rate, f"line {lineno}: outside [0, 1]")
        rates[cells["player_id"]] = rate
    return dict(sorted(rates.items()))


def eligible_seasons(
    history: Mapping[int, PlayerSeason], min_pa: int = MIN_PA
) -> tuple[int, ...]:
    """Analysis seasons in which the player reached ``min_pa`` plate appearances."""
    return tuple(
        s for s in sorted(history)
        if is_analysis_season(s) and history[s].pa >= min_pa
    )


def passes_gate(
    panel: PanelDataset, player_id: str, gate: Iterable[int], min_pa: int = MIN_PA
) -> bool:
    hist = panel.history(player_id)
    return all(s in hist and hist[s].pa >= min_pa for s in gate)


def build_cohorts(
    shift_rates: Mapping[str, float],
    panel: PanelDataset,
    *,
    gate: Iterable[int] = MAIN_GATE,
    min_pa: int = MIN_PA,
    bounds: CohortBounds = DEFAULT_BOUNDS,
) -> list[ShiftCohort]:
    """Rate every player passing the PA gate; sorted by player_id.

    Players that fail the gate are dropped before rating, so a missing shift
    rate only matters for players that pass it.
    """
    gate = season_set(gate)
    out = []
    for pid in panel.player_ids:
        if not passes_gate(panel, pid, gate, min_pa):
            continue
        if pid not in shift_rates:
            raise MissingShiftRate(pid)
        rate = shift_rates[pid]
        out.append(ShiftCohort(pid, rate, bounds.assign(rate)))
    counts = {c: sum(1 for x in out if x.cohort is c) for c in Cohort}
    log.info("cohorts: %s", ", ".join(f"{c.value}={n}" for c, n in counts.items()))
    return out


def cohort_members(cohorts: Iterable[ShiftCohort], cohort: Cohort) -> list[str]:
    return [c.player_id for c in cohorts if c.cohort is cohort]


@dataclass(frozen=True)
class DonorPool:
    target_id: str
    required_seasons: tuple[int, ...]
    donor_ids: tuple[str, ...]

    def __post_init__(self):
        if self.target_id in self.donor_ids:
            raise InvariantViolation("donor_ids", self.target_id, "target cannot donate to itself")

    def __len__(self):
        return len(self.donor_ids)


def build_donor_pool(
    target: str,
    controls: Iterable[str],
    panel: PanelDataset,
    *,
    required_seasons: Iterable[int] | None = None,
    through: int = 2023,
    min_pa: int = MIN_PA,
) -> DonorPool:
    """Controls with ``min_pa`` in every season the target is analysed in.

    ``required_seasons`` defaults to the target's eligible seasons up to and
    including ``through``. Excluding a non-covering donor is the same as
    pinning its weight at zero.
    """
    if required_seasons is None:
        required_seasons = [
            s for s in eligible_seasons(panel.history(target), min_pa) if s <= through
        ]
    required = season_set(required_seasons)
    donors = tuple(
        pid for pid in sorted(set(controls))
        if pid != target and passes_gate(panel, pid, required, min_pa)
    )
    if not donors:
        raise EmptyDonorPool(target)
    return DonorPool(target, required, donors)


__all__ = [
    "DonorPool", "LEAGUE_HEADER", "MAIN_GATE", "MIN_PA", "PLAYER_HEADER", "SHIFT_HEADER",
    "build_cohorts", "build_donor_pool", "cohort_members", "eligible_seasons",
    "load_league_splits", "load_player_seasons", "load_shift_rates", "passes_gate",
    "split_lookup", "write_player_seasons", "ANALYSIS_SEASONS",
]
