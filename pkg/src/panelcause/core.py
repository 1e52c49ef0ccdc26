"""Domain model shared by the estimators.

Seasons are plain ``int`` years. The 2020 season is never an analysis season.
Potential outcomes are not data: an :class:`EffectEstimate` of kind ``ATT`` is
an estimate of (outcome under the rule) minus (outcome without it) for the
given unit and year; ``PRE_TREND`` and the placebo kinds estimate quantities
whose true value is zero when the identifying assumptions hold.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, fields
from types import MappingProxyType

from .exceptions import DuplicateRecord, InvariantViolation, PanelValidationError

FIRST_SEASON = 2015
LAST_SEASON = 2024
EXCLUDED_SEASONS = frozenset({2020})
ANALYSIS_SEASONS = tuple(
    y for y in range(FIRST_SEASON, LAST_SEASON + 1) if y not in EXCLUDED_SEASONS
)
INTERVENTION_YEAR = 2023


def is_analysis_season(year: int) -> bool:
    return year in ANALYSIS_SEASONS


def season_set(years: Iterable[int]) -> tuple[int, ...]:
    """Sorted, duplicate-free tuple of analysis seasons.

    Raises InvariantViolation for 2020 or any year outside 2015-2024.
    """
    out = sorted(set(years))
    for y in out:
        if not is_analysis_season(y):
            raise InvariantViolation("season", y, "not an analysis season")
    return tuple(out)


def previous_season(year: int) -> int:
    """Previous full analysis season; 2021 maps to 2019."""
    i = ANALYSIS_SEASONS.index(year)
    if i == 0:
        raise InvariantViolation("season", year, "no earlier analysis season")
    return ANALYSIS_SEASONS[i - 1]


class Population(str, enum.Enum):
    LHB = "LHB"
    RHB = "RHB"


class Outcome(str, enum.Enum):
    BABIP = "BABIP"
    OBP = "OBP"
    AVG = "AVG"
    SLG = "SLG"
    OPS = "OPS"
    WOBA = "WOBA"
    BB_PCT = "BB_PCT"
    K_PCT = "K_PCT"

    @property
    def column(self) -> str:
        return self.value.lower()

    @property
    def upper_bound(self) -> float:
        return 3.0 if self is Outcome.OPS else 1.0

    @classmethod
    def parse(cls, text: str) -> Outcome:
        return cls(text.strip().upper())


PLAYER_OUTCOMES = (Outcome.OBP, Outcome.OPS, Outcome.WOBA)


class Cohort(str, enum.Enum):
    LOW = "LOW"
    MEDIUM = "MEDIUM"
    IN_UNIT_PLACEBO = "IN_UNIT_PLACEBO"
    HIGH = "HIGH"


class EstimateKind(str, enum.Enum):
    ATT = "ATT"
    PRE_TREND = "PRE_TREND"
    PLACEBO = "PLACEBO"
    IN_TIME_PLACEBO = "IN_TIME_PLACEBO"
    IN_UNIT_PLACEBO = "IN_UNIT_PLACEBO"


@dataclass(frozen=True)
class CohortBounds:
    """Shift-rate cut points: ``<= low`` is LOW, ``(low, in_unit_hi]`` is the
    in-unit placebo group, ``>= high`` is HIGH, everything else MEDIUM."""

    low: float = 0.15
    in_unit_hi: float = 0.30
    high: float = 0.75

    def __post_init__(self):
        if not 0.0 < self.low < self.in_unit_hi < self.high < 1.0:
            raise InvariantViolation(
                "cohort_bounds", (self.low, self.in_unit_hi, self.high),
                "must be strictly increasing inside (0, 1)",
            )

    def assign(self, shift_rate: float) -> Cohort:
        if not 0.0 <= shift_rate <= 1.0:
            raise InvariantViolation("shift_rate", shift_rate, "outside [0, 1]")
        if shift_rate >= self.high:
            return Cohort.HIGH
        if shift_rate <= self.low:
            return Cohort.LOW
        if shift_rate <= self.in_unit_hi:
            return Cohort.IN_UNIT_PLACEBO
        return Cohort.MEDIUM


DEFAULT_BOUNDS = CohortBounds()


def assign_cohort(shift_rate: float, bounds: CohortBounds = DEFAULT_BOUNDS) -> Cohort:
    return bounds.assign(shift_rate)


@dataclass(frozen=True)
class PlayerSeason:
    player_id: str
    season: int
    age: int
    pa: int
    hits: int
    singles: int
    home_runs: int
    bb_pct: float
    k_pct: float
    obp: float
    ops: float
    woba: float
    name: str = ""

    # statistics usable as SCM covariates, in covariate order
    STATS = ("pa", "hits", "singles", "home_runs", "bb_pct", "k_pct")

    def problems(self) -> list[InvariantViolation]:
        """Every invariant this record breaks (empty when valid)."""
        out = []
        if not is_analysis_season(self.season):
            out.append(InvariantViolation("season", self.season, "not an analysis season"))
        if self.pa < 0:
            out.append(InvariantViolation("pa", self.pa, "negative"))
        for name in ("hits", "singles", "home_runs"):
            if getattr(self, name) < 0:
                out.append(InvariantViolation(name, getattr(self, name), "negative"))
        if self.singles > self.hits:
            out.append(InvariantViolation("singles", self.singles, f"exceeds hits={self.hits}"))
        if self.home_runs > self.hits:
            out.append(InvariantViolation("home_runs", self.home_runs, f"exceeds hits={self.hits}"))
        if self.hits > self.pa:
            out.append(InvariantViolation("hits", self.hits, f"exceeds pa={self.pa}"))
        for name, hi in (("bb_pct", 1.0), ("k_pct", 1.0), ("obp", 1.0), ("ops", 3.0), ("woba", 1.5)):
            value = getattr(self, name)
            if not (math.isfinite(value) and 0.0 <= value <= hi):
                out.append(InvariantViolation(name, value, f"outside [0, {hi}]"))
        return out

    def value(self, name: str) -> float:
        return float(getattr(self, name))

    def outcome(self, outcome: Outcome) -> float:
        if outcome not in PLAYER_OUTCOMES:
            raise ValueError(f"{outcome.value} is not a player-level outcome")
        return float(getattr(self, outcome.column))


class PanelDataset(Mapping):
    """Validated player-season records keyed by ``(player_id, season)``.

    Read-only after construction; use :func:`validate_panel` to build one.
    """

    def __init__(self, records: Mapping[tuple[str, int], PlayerSeason]):
        self._records = MappingProxyType(dict(sorted(records.items())))
        by_player: dict[str, dict[int, PlayerSeason]] = {}
        for (pid, season), rec in self._records.items():
            by_player.setdefault(pid, {})[season] = rec
        self._by_player = MappingProxyType(
            {pid: MappingProxyType(h) for pid, h in by_player.items()}
        )

    def __getitem__(self, key: tuple[str, int]) -> PlayerSeason:
        return self._records[key]

    def __iter__(self) -> Iterator[tuple[str, int]]:
        return iter(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __eq__(self, other):
        if not isinstance(other, PanelDataset):
            return NotImplemented
        return dict(self._records) == dict(other._records)

    def __hash__(self):
        return hash(tuple(self._records.items()))

    def __reduce__(self):
        return (PanelDataset, (dict(self._records),))

    def __repr__(self):
        return f"PanelDataset({len(self)} records, {len(self._by_player)} players)"

    @property
    def player_ids(self) -> tuple[str, ...]:
        return tuple(self._by_player)

    def history(self, player_id: str) -> Mapping[int, PlayerSeason]:
        """Season -> record for one player (empty mapping if unknown)."""
        return self._by_player.get(player_id, MappingProxyType({}))

    def name(self, player_id: str) -> str:
        for rec in self.history(player_id).values():
            if rec.name:
                return rec.name
        return player_id

    def records(self) -> list[PlayerSeason]:
        return list(self._records.values())


def validate_panel(records: Iterable[PlayerSeason]) -> PanelDataset:
    """Build a :class:`PanelDataset`, rejecting duplicate keys and records
    that break a :class:`PlayerSeason` invariant.

    A single problem is raised as-is; several are bundled into a
    :class:`PanelValidationError` listing every one.
    """
    seen: dict[tuple[str, int], PlayerSeason] = {}
    problems = []
    for rec in records:
        key = (rec.player_id, rec.season)
        if key in seen:
            problems.append(DuplicateRecord(*key))
            continue
        bad = rec.problems()
        if bad:
            problems.extend(bad)
            continue
        seen[key] = rec
    if len(problems) == 1:
        raise problems[0]
    if problems:
        raise PanelValidationError(problems)
    return PanelDataset(seen)


@dataclass(frozen=True)
class LeagueSplitSeries:
    population: Population
    outcome: Outcome
    values: Mapping[int, float]
    pa_share: Mapping[int, float] | None = None

    def __post_init__(self):
        vals = {int(k): float(v) for k, v in sorted(self.values.items())}
        for season, v in vals.items():
            if not is_analysis_season(season):
                raise InvariantViolation("season", season, "not an analysis season")
            if not 0.0 <= v <= self.outcome.upper_bound:
                raise InvariantViolation(self.outcome.column, v, "rate out of range")
        object.__setattr__(self, "values", MappingProxyType(vals))
        if self.pa_share is not None:
            share = {int(k): float(v) for k, v in sorted(self.pa_share.items())}
            for season, v in share.items():
                if not is_analysis_season(season):
                    raise InvariantViolation("season", season, "not an analysis season")
                if not 0.0 <= v <= 1.0:
                    raise InvariantViolation("pa_share", v, "outside [0, 1]")
            object.__setattr__(self, "pa_share", MappingProxyType(share))

    @property
    def seasons(self) -> tuple[int, ...]:
        return tuple(self.values)


@dataclass(frozen=True)
class ShiftCohort:
    player_id: str
    shift_rate_2022: float
    cohort: Cohort


@dataclass(frozen=True)
class EffectEstimate:
    outcome: Outcome
    unit: str
    year: int
    estimate: float
    kind: EstimateKind

    def __post_init__(self):
        if self.kind is EstimateKind.PRE_TREND and self.year >= INTERVENTION_YEAR:
            raise InvariantViolation("year", self.year, "pre-trend estimates precede 2023")
        if self.kind is EstimateKind.ATT and self.year < INTERVENTION_YEAR:
            raise InvariantViolation("year", self.year, "ATT estimates start in 2023")


def record_fields() -> tuple[str, ...]:
    return tuple(f.name for f in fields(PlayerSeason))


__all__ = [
    "ANALYSIS_SEASONS", "INTERVENTION_YEAR", "PLAYER_OUTCOMES",
    "Cohort", "CohortBounds", "EffectEstimate", "EstimateKind", "LeagueSplitSeries",
    "Outcome", "PanelDataset", "PlayerSeason", "Population", "ShiftCohort",
    "assign_cohort", "is_analysis_season", "previous_season", "season_set", "validate_panel",
]
