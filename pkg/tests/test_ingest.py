import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panelcause.core import Cohort, Outcome, Population, validate_panel
from panelcause.exceptions import (
    EmptyDonorPool,
    InvariantViolation,
    MissingShiftRate,
    SchemaError,
)
from panelcause.ingest import (
    LEAGUE_HEADER,
    PLAYER_HEADER,
    build_cohorts,
    build_donor_pool,
    cohort_members,
    eligible_seasons,
    load_league_splits,
    load_player_seasons,
    load_shift_rates,
    passes_gate,
    split_lookup,
    write_player_seasons,
)
from panelcause.scm.problem import EXTENSION_GATE, EXTENSION_GATE_2024_ONLY

from .conftest import season


def _write(tmp_path, name, header, rows):
    p = tmp_path / name
    p.write_text(",".join(header) + "\n" + "".join(",".join(map(str, r)) + "\n" for r in rows))
    return p


def _league_row(year, hand, babip=0.29):
    return [year, hand, "bases_empty", 40000, 0.23, babip, 0.31, 0.25, 0.41, 0.72, 0.31, 0.08, 0.2]


def test_league_cells_kept_at_full_precision(league):
    lookup = split_lookup(league)
    lhb = lookup[(Population.LHB, Outcome.BABIP)]
    assert lhb.values[2022] == 0.275
    assert lookup[(Population.LHB, Outcome.OBP)].values[2022] == 0.29945
    assert lhb.pa_share[2023] == 0.233
    assert [s.population for s in league[:2]] == [Population.LHB, Population.LHB]


def test_league_rejects_2020(tmp_path):
    p = _write(tmp_path, "l.csv", LEAGUE_HEADER, [_league_row(2019, "L"), _league_row(2020, "L")])
    with pytest.raises(InvariantViolation):
        load_league_splits(p)


@pytest.mark.parametrize("row, column", [
    ([2019, "S", "bases_empty", 1, 0.2, 0.3, 0.3, 0.3, 0.4, 0.7, 0.3, 0.1, 0.2], "handedness"),
    ([2019, "L", "runners_on", 1, 0.2, 0.3, 0.3, 0.3, 0.4, 0.7, 0.3, 0.1, 0.2], "split"),
    ([2019, "L", "bases_empty", 1, 0.2, "", 0.3, 0.3, 0.4, 0.7, 0.3, 0.1, 0.2], "babip"),
    ([2019, "L", "bases_empty", 1, 0.2, "x", 0.3, 0.3, 0.4, 0.7, 0.3, 0.1, 0.2], "babip"),
])
def test_league_schema_errors_name_line_and_column(tmp_path, row, column):
    p = _write(tmp_path, "l.csv", LEAGUE_HEADER, [_league_row(2019, "R"), row])
    with pytest.raises(SchemaError) as exc:
        load_league_splits(p)
    assert exc.value.line == 3 and exc.value.column == column


def test_header_mismatch(tmp_path):
    p = _write(tmp_path, "p.csv", PLAYER_HEADER[:-1], [])
    with pytest.raises(SchemaError):
        load_player_seasons(p)


def test_seager_eligible_seasons(panel):
    hist = panel.history("corey_seager")
    assert hist[2018].pa < 250 and hist[2015].pa < 250
    assert eligible_seasons(hist) == (2016, 2017, 2019, 2021, 2022, 2023, 2024)


def test_missing_shift_rate_for_gated_player(panel, shift_rates):
    rates = dict(shift_rates)
    del rates["corey_seager"]
    with pytest.raises(MissingShiftRate):
        build_cohorts(rates, panel)


def test_ungated_players_need_no_rate(panel, shift_rates, cohorts):
    ungated = [p for p in panel.player_ids if p.startswith("ungated")]
    assert ungated and not any(p in shift_rates for p in ungated)
    rated = {c.player_id for c in cohorts}
    assert rated.isdisjoint(ungated)


def test_fixture_cohort_counts(cohorts):
    counts = {c: len(cohort_members(cohorts, c)) for c in Cohort}
    assert counts[Cohort.HIGH] == 30
    assert counts[Cohort.LOW] == 58
    assert counts[Cohort.IN_UNIT_PLACEBO] == 25


def test_boundary_rates_in_fixture(cohorts):
    by_rate = {c.shift_rate_2022: c.cohort for c in cohorts}
    assert by_rate[0.15] is Cohort.LOW
    assert by_rate[0.30] is Cohort.IN_UNIT_PLACEBO


def test_extension_gates(panel, shift_rates):
    ext = build_cohorts(shift_rates, panel, gate=EXTENSION_GATE)
    only = build_cohorts(shift_rates, panel, gate=EXTENSION_GATE_2024_ONLY)
    assert len(cohort_members(ext, Cohort.HIGH)) == 27
    assert len(cohort_members(ext, Cohort.LOW)) == 42
    added = set(cohort_members(only, Cohort.HIGH)) - set(cohort_members(ext, Cohort.HIGH))
    assert len(added) == 1


def test_shift_rates_for_other_season(data_dir):
    r21 = load_shift_rates(data_dir / "shift_rates.csv", season=2021)
    r22 = load_shift_rates(data_dir / "shift_rates.csv")
    assert r21 and r21 != r22


def test_donor_pool_requires_target_seasons(panel, controls):
    pool = build_donor_pool("corey_seager", controls, panel)
    assert pool.required_seasons == (2016, 2017, 2019, 2021, 2022, 2023)
    assert "corey_seager" not in pool.donor_ids
    for d in pool.donor_ids:
        assert passes_gate(panel, d, pool.required_seasons)
    assert {"starling_marte", "carlos_correa"} <= set(pool.donor_ids)


def test_donor_pool_excludes_target_and_can_be_empty():
    panel = validate_panel([season("t", y) for y in (2021, 2022, 2023)]
                           + [season("c", y, pa=100) for y in (2021, 2022, 2023)])
    with pytest.raises(EmptyDonorPool):
        build_donor_pool("t", ["c", "t"], panel)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "d", "e"]), unique=True),
       st.lists(st.sampled_from([2015, 2016, 2017, 2018, 2019]), unique=True))
def test_donor_pool_shrinks_as_requirements_grow(extra_controls, extra_seasons):
    recs = [season("t", y) for y in (2015, 2016, 2017, 2018, 2019, 2021, 2022, 2023)]
    for i, pid in enumerate("abcde"):
        for y in (2015, 2016, 2017, 2018, 2019, 2021, 2022, 2023):
            recs.append(season(pid, y, pa=300 if (i + y) % 3 else 120))
    panel = validate_panel(recs)
    base = (2021, 2022, 2023)

    def pool(req):
        try:
            return set(build_donor_pool("t", extra_controls, panel, required_seasons=req).donor_ids)
        except EmptyDonorPool:
            return set()

    small, big = pool(base), pool(base + tuple(extra_seasons))
    assert big <= small


def test_eligibility_filter_is_idempotent(panel):
    for pid in panel.player_ids[:40]:
        hist = panel.history(pid)
        once = eligible_seasons(hist)
        again = eligible_seasons({s: hist[s] for s in once})
        assert once == again


def test_player_round_trip(tmp_path, panel):
    out = tmp_path / "players.csv"
    write_player_seasons(panel, out)
    assert load_player_seasons(out) == panel


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 0.5))
def test_float_round_trip_is_exact(tmp_path_factory, obp, bb):
    panel = validate_panel([season("x", 2019, obp=obp, bb_pct=bb)])
    out = tmp_path_factory.mktemp("rt") / "p.csv"
    write_player_seasons(panel, out)
    back = load_player_seasons(out)
    assert back[("x", 2019)].obp == obp and back[("x", 2019)].bb_pct == bb
