"""Run configuration read from an INI file.

Example::

    [run]
    data_dir = data/
    outcomes = OBP, OPS, WOBA
    did_outcomes = BABIP, OBP
    analyses = did, scm, placebos

    [cohorts]
    low = 0.15
    in_unit_hi = 0.30
    high = 0.75

    [solver]
    inner = active_set
    outer_maxfev = 400

Every key is optional. ``data_dir`` defaults to the bundled example data;
relative paths are resolved against the config file's directory.
"""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

from .core import INTERVENTION_YEAR, CohortBounds, Outcome
from .exceptions import InvariantViolation
from .ingest import MIN_PA
from .scm.problem import ScmConfig
from .scm.simplex import SOLVERS

ANALYSES = ("did", "scm", "placebos", "in_unit", "in_time", "extension_2024", "dose_response")
# analyses that cannot run without another one
REQUIRES = {
    "placebos": "scm",
    "in_unit": "scm",
    "in_time": "scm",
    "extension_2024": "scm",
    "dose_response": "scm",
}
STARTS = ("uniform", "inverse_variance")


def bundled_data_dir() -> Path:
    return Path(str(resources.files("panelcause") / "data" / "fixture"))


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.replace("\n", ",").split(",") if part.strip())


def parse_analyses(text: str | tuple[str, ...]) -> tuple[str, ...]:
    names = _csv_list(text) if isinstance(text, str) else tuple(text)
    if names == ("all",):
        return ANALYSES
    unknown = [n for n in names if n not in ANALYSES]
    if unknown:
        raise InvariantViolation("analyses", ",".join(unknown), f"expected a subset of {ANALYSES}")
    return tuple(a for a in ANALYSES if a in names)


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path = field(default_factory=bundled_data_dir)
    outcomes: tuple[Outcome, ...] = (Outcome.OBP, Outcome.OPS, Outcome.WOBA)
    did_outcomes: tuple[Outcome, ...] = (Outcome.BABIP, Outcome.OBP)
    intervention_year: int = INTERVENTION_YEAR
    min_pa: int = MIN_PA
    bounds: CohortBounds = CohortBounds()
    analyses: tuple[str, ...] = ANALYSES
    focus_player: str = "corey_seager"
    scm: ScmConfig = ScmConfig()
    n_jobs: int = 1

    def __post_init__(self):
        if self.intervention_year != INTERVENTION_YEAR:
            raise InvariantViolation(
                "intervention_year", self.intervention_year, f"only {INTERVENTION_YEAR} is supported"
            )
        if self.min_pa < 0:
            raise InvariantViolation("min_pa", self.min_pa, "negative")
        if self.n_jobs < 1:
            raise InvariantViolation("n_jobs", self.n_jobs, "must be at least 1")
        if self.scm.solver not in SOLVERS:
            raise InvariantViolation("inner", self.scm.solver, f"expected one of {SOLVERS}")
        bad = [s for s in self.scm.starts if s not in STARTS]
        if bad or not self.scm.starts:
            raise InvariantViolation("starts", ",".join(self.scm.starts), f"expected a subset of {STARTS}")
        parse_analyses(self.analyses)

    def enabled(self, analysis: str) -> bool:
        if analysis not in self.analyses:
            return False
        needed = REQUIRES.get(analysis)
        return needed is None or needed in self.analyses

    def with_analyses(self, analyses: str | tuple[str, ...]) -> RunConfig:
        return replace(self, analyses=parse_analyses(analyses))

    def to_dict(self) -> dict:
        scm = asdict(self.scm)
        scm["starts"] = list(scm["starts"])
        return {
            "data_dir": str(self.data_dir),
            "outcomes": [o.value for o in self.outcomes],
            "did_outcomes": [o.value for o in self.did_outcomes],
            "intervention_year": self.intervention_year,
            "min_pa": self.min_pa,
            "cohort_bounds": asdict(self.bounds),
            "analyses": list(self.analyses),
            "focus_player": self.focus_player,
            "scm": scm,
        }

    def digest(self) -> str:
        """SHA-256 of the settings that affect results (the data location and
        worker count are excluded; data files are hashed separately)."""
        d = self.to_dict()
        del d["data_dir"]
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        path = Path(path)
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        return cls.from_parser(parser, base=path.parent)

    @classmethod
    def from_parser(cls, parser: configparser.ConfigParser, base: Path = Path(".")) -> RunConfig:
        known = {"run", "cohorts", "solver"}
        extra = [s for s in parser.sections() if s not in known]
        if extra:
            raise InvariantViolation("config", ",".join(extra), f"unknown sections; expected {sorted(known)}")
        run = parser["run"] if parser.has_section("run") else {}
        coh = parser["cohorts"] if parser.has_section("cohorts") else {}
        sol = parser["solver"] if parser.has_section("solver") else {}
        _reject_unknown("run", run, {
            "data_dir", "outcomes", "did_outcomes", "intervention_year", "min_pa", "analyses",
            "focus_player", "n_jobs",
        })
        _reject_unknown("cohorts", coh, {"low", "in_unit_hi", "high"})
        _reject_unknown("solver", sol, {
            "inner", "max_iter", "tol", "outer_maxfev", "outer_step", "outer_xatol",
            "outer_fatol", "starts", "standardize",
        })

        kw = {}
        if "data_dir" in run:
            d = Path(run["data_dir"]).expanduser()
            kw["data_dir"] = d if d.is_absolute() else (base / d)
        for key in ("outcomes", "did_outcomes"):
            if key in run:
                kw[key] = tuple(_outcome(x, key) for x in _csv_list(run[key]))
        for key in ("intervention_year", "min_pa", "n_jobs"):
            if key in run:
                kw[key] = _number(run[key], int, key)
        if "analyses" in run:
            kw["analyses"] = parse_analyses(run["analyses"])
        if "focus_player" in run:
            kw["focus_player"] = run["focus_player"].strip()

        defaults = CohortBounds()
        kw["bounds"] = CohortBounds(
            low=_number(coh.get("low", defaults.low), float, "low"),
            in_unit_hi=_number(coh.get("in_unit_hi", defaults.in_unit_hi), float, "in_unit_hi"),
            high=_number(coh.get("high", defaults.high), float, "high"),
        )

        scm = ScmConfig()
        skw = {}
        if "inner" in sol:
            skw["solver"] = sol["inner"].strip()
        for key, typ in (("max_iter", int), ("outer_maxfev", int), ("tol", float),
                         ("outer_step", float), ("outer_xatol", float), ("outer_fatol", float)):
            if key in sol:
                skw[key] = _number(sol[key], typ, key)
        if "starts" in sol:
            skw["starts"] = _csv_list(sol["starts"])
        if "standardize" in sol:
            skw["standardize"] = sol.getboolean("standardize")
        kw["scm"] = replace(scm, **skw)
        return cls(**kw)


def _reject_unknown(section, values, allowed):
    unknown = sorted(set(values) - allowed)
    if unknown:
        raise InvariantViolation(f"[{section}]", ",".join(unknown), "unknown keys")


def _outcome(text, key):
    try:
        return Outcome.parse(text)
    except ValueError:
        raise InvariantViolation(key, text, "unknown outcome") from None


def _number(text, typ, key):
    try:
        return typ(text)
    except (TypeError, ValueError):
        raise InvariantViolation(key, text, f"expected {typ.__name__}") from None


__all__ = ["ANALYSES", "RunConfig", "bundled_data_dir", "parse_analyses"]
