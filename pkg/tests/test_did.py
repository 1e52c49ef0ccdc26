import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panelcause.core import ANALYSIS_SEASONS, EstimateKind, LeagueSplitSeries, Outcome, Population
from panelcause.did import DID_ASSUMPTIONS, did_2x2, did_series, rescale_att
from panelcause.exceptions import InvariantViolation, MissingSeason
from panelcause.ingest import split_lookup


def series(pop, values, outcome=Outcome.BABIP):
    return LeagueSplitSeries(pop, outcome, values)


LHB = series(Population.LHB, {2022: 0.275, 2023: 0.287})
RHB = series(Population.RHB, {2022: 0.291, 2023: 0.294})


def test_babip_two_by_two():
    r = did_2x2(LHB, RHB, 2022, 2023)
    assert r.did_estimate == pytest.approx(0.009, abs=1e-12)
    assert r.counterfactual_post_lhb == pytest.approx(0.278, abs=1e-12)
    assert r.kind is EstimateKind.ATT


def test_obp_from_rounded_cells_differs_by_rounding():
    lhb = series(Population.LHB, {2022: 0.299, 2023: 0.315}, Outcome.OBP)
    rhb = series(Population.RHB, {2022: 0.303, 2023: 0.309}, Outcome.OBP)
    est = did_2x2(lhb, rhb, 2022, 2023).did_estimate
    assert est == pytest.approx(0.010, abs=1e-12)
    assert abs(est - 0.009) <= 0.001 + 1e-12


def test_obp_fixture_cells(league):
    lookup = split_lookup(league)
    r = did_2x2(lookup[(Population.LHB, Outcome.OBP)], lookup[(Population.RHB, Outcome.OBP)], 2022, 2023)
    assert r.did_estimate == pytest.approx(0.009, abs=0.001)


def test_zero_change_gives_zero():
    flat_l = series(Population.LHB, {2022: 0.3, 2023: 0.3})
    flat_r = series(Population.RHB, {2022: 0.29, 2023: 0.29})
    assert did_2x2(flat_l, flat_r, 2022, 2023).did_estimate == 0.0


def test_pre_year_pairs_are_pre_trends():
    l = series(Population.LHB, {2019: 0.3, 2021: 0.29})
    r = series(Population.RHB, {2019: 0.3, 2021: 0.3})
    res = did_2x2(l, r, 2019, 2021)
    assert res.kind is EstimateKind.PRE_TREND
    assert res.as_effect().kind is EstimateKind.PRE_TREND


def test_errors():
    with pytest.raises(MissingSeason):
        did_2x2(LHB, RHB, 2021, 2023)
    with pytest.raises(InvariantViolation):
        did_2x2(LHB, RHB, 2023, 2022)
    with pytest.raises(InvariantViolation):
        did_2x2(LHB, RHB, 2020, 2023)
    with pytest.raises(ValueError):
        did_2x2(LHB, series(Population.RHB, {2022: 0.3, 2023: 0.3}, Outcome.OBP), 2022, 2023)


def test_series_compares_2021_with_2019(league):
    lookup = split_lookup(league)
    rows = did_series(lookup[(Population.LHB, Outcome.BABIP)], lookup[(Population.RHB, Outcome.BABIP)])
    pairs = [(r.pre_year, r.year) for r in rows]
    assert (2019, 2021) in pairs
    assert all(2020 not in p for p in pairs)
    assert len(rows) == len(ANALYSIS_SEASONS) - 1
    kinds = {r.year: r.kind for r in rows}
    assert kinds[2022] is EstimateKind.PRE_TREND and kinds[2024] is EstimateKind.ATT


def test_series_skips_gaps():
    l = series(Population.LHB, {2015: 0.3, 2016: 0.31, 2018: 0.3, 2019: 0.3})
    r = series(Population.RHB, {2015: 0.3, 2016: 0.3, 2018: 0.3, 2019: 0.29})
    assert [(x.pre_year, x.year) for x in did_series(l, r)] == [(2015, 2016), (2018, 2019)]
    with pytest.raises(InvariantViolation):
        did_series(l, r, seasons=[2016])


def test_rescale():
    att = did_2x2(LHB, RHB, 2022, 2023).as_effect()
    assert rescale_att(att, 0.233).estimate == pytest.approx(0.002097, abs=1e-6)
    with pytest.raises(InvariantViolation):
        rescale_att(att, 1.5)


def test_assumptions_are_labelled():
    assert len(DID_ASSUMPTIONS) == 3
    assert [a[:3] for a in DID_ASSUMPTIONS] == ["(1)", "(2)", "(3)"]


rate = st.floats(0.1, 0.5, allow_nan=False)


@settings(max_examples=200)
@given(rate, rate, rate, rate)
def test_swapping_populations_negates(a, b, c, d):
    l = series(Population.LHB, {2022: a, 2023: b})
    r = series(Population.RHB, {2022: c, 2023: d})
    fwd = did_2x2(l, r, 2022, 2023).did_estimate
    swapped = did_2x2(
        series(Population.LHB, {2022: c, 2023: d}), series(Population.RHB, {2022: a, 2023: b}), 2022, 2023
    ).did_estimate
    assert math.isclose(fwd, -swapped, abs_tol=1e-15)


@settings(max_examples=200)
@given(rate, rate, rate, rate, st.floats(-0.09, 0.09), st.floats(-0.09, 0.09))
def test_population_level_shifts_cancel(a, b, c, d, sl, sr):
    base = did_2x2(series(Population.LHB, {2022: a, 2023: b}),
                   series(Population.RHB, {2022: c, 2023: d}), 2022, 2023).did_estimate
    shifted = did_2x2(series(Population.LHB, {2022: a + sl, 2023: b + sl}),
                      series(Population.RHB, {2022: c + sr, 2023: d + sr}), 2022, 2023).did_estimate
    assert math.isclose(base, shifted, abs_tol=1e-12)
