from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from panelcause.config import RunConfig, bundled_data_dir
from panelcause.core import Cohort, PlayerSeason, validate_panel
from panelcause.ingest import (
    build_cohorts,
    cohort_members,
    load_league_splits,
    load_player_seasons,
    load_shift_rates,
)

DATA = bundled_data_dir()


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def panel():
    return load_player_seasons(DATA / "player_seasons.csv")


@pytest.fixture(scope="session")
def league():
    return load_league_splits(DATA / "league_splits.csv")


@pytest.fixture(scope="session")
def shift_rates():
    return load_shift_rates(DATA / "shift_rates.csv")


@pytest.fixture(scope="session")
def cohorts(shift_rates, panel):
    return build_cohorts(shift_rates, panel)


@pytest.fixture(scope="session")
def targets(cohorts):
    return cohort_members(cohorts, Cohort.HIGH)


@pytest.fixture(scope="session")
def controls(cohorts):
    return cohort_members(cohorts, Cohort.LOW)


@pytest.fixture(scope="session")
def full_runs(tmp_path_factory):
    """Two independent full ``panelcause run`` invocations on the bundled data."""
    from panelcause.cli import main

    dirs = []
    for i in range(2):
        out = tmp_path_factory.mktemp(f"run{i}")
        assert main(["run", "--out-dir", str(out)]) == 0
        dirs.append(out / "report")
    return dirs


def season(pid, year, *, pa=500, obp=0.330, ops=0.750, woba=0.320, age=27, hits=None, **kw):
    hits = int(pa * 0.25) if hits is None else hits
    base = dict(
        player_id=pid, season=year, age=age, pa=pa, hits=hits, singles=hits // 2,
        home_runs=hits // 8, bb_pct=0.08, k_pct=0.2, obp=obp, ops=ops, woba=woba, name=pid.title(),
    )
    base.update(kw)
    return PlayerSeason(**base)


def random_panel(rng: np.random.Generator, players: dict[str, list[int]]):
    recs = []
    for pid, years in players.items():
        for y in years:
            obp = float(rng.uniform(0.28, 0.38))
            recs.append(season(pid, y, obp=obp, ops=2.3 * obp, woba=0.95 * obp,
                               pa=int(rng.integers(300, 650)), age=int(rng.integers(22, 36))))
    return validate_panel(recs)


@pytest.fixture
def default_config():
    return RunConfig()
