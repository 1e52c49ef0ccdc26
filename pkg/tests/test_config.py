import pytest

from panelcause.config import ANALYSES, RunConfig, parse_analyses
from panelcause.core import Outcome
from panelcause.exceptions import InvariantViolation


def test_defaults():
    cfg = RunConfig()
    assert cfg.min_pa == 250
    assert (cfg.bounds.low, cfg.bounds.in_unit_hi, cfg.bounds.high) == (0.15, 0.30, 0.75)
    assert cfg.intervention_year == 2023
    assert cfg.analyses == ANALYSES
    assert (cfg.data_dir / "player_seasons.csv").is_file()


def test_from_file(tmp_path):
    (tmp_path / "data").mkdir()
    p = tmp_path / "run.cfg"
    p.write_text(
        "[run]\ndata_dir = data\noutcomes = obp, woba\nanalyses = did, scm\nmin_pa = 300\n"
        "[cohorts]\nlow = 0.1\n"
        "[solver]\ninner = projected_gradient\nouter_maxfev = 100\nstarts = uniform\n"
    )
    cfg = RunConfig.from_file(p)
    assert cfg.data_dir == tmp_path / "data"
    assert cfg.outcomes == (Outcome.OBP, Outcome.WOBA)
    assert cfg.analyses == ("did", "scm")
    assert cfg.min_pa == 300 and cfg.bounds.low == 0.1
    assert cfg.scm.solver == "projected_gradient" and cfg.scm.starts == ("uniform",)


@pytest.mark.parametrize("text", [
    "[run]\nanalyses = did, bogus\n",
    "[run]\nmin_pa = lots\n",
    "[run]\nintervention_year = 2022\n",
    "[run]\nunknown_key = 1\n",
    "[cohorts]\nlow = 0.4\n",
    "[solver]\ninner = simplex\n",
    "[solver]\nstarts = random\n",
    "[extra]\na = 1\n",
    "[run]\noutcomes = era\n",
])
def test_bad_config(tmp_path, text):
    p = tmp_path / "bad.cfg"
    p.write_text(text)
    with pytest.raises(InvariantViolation):
        RunConfig.from_file(p)


def test_analysis_dependencies():
    cfg = RunConfig().with_analyses("placebos, did")
    assert cfg.enabled("did") and not cfg.enabled("placebos")
    assert parse_analyses("all") == ANALYSES


def test_digest_tracks_settings_not_location(tmp_path):
    a = RunConfig()
    b = RunConfig(data_dir=tmp_path)
    assert a.digest() == b.digest()
    assert a.digest() != a.with_analyses("did").digest()
