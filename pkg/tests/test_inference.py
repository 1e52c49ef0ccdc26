import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panelcause.core import EstimateKind, Outcome
from panelcause.exceptions import DegenerateDesign, DegeneratePreFit
from panelcause.inference import (
    PlaceboDistribution,
    PlaceboEntry,
    dose_response_fit,
    mspe_ratio,
    placebo_p_value,
    run_in_space_placebos,
    run_in_time_placebo,
    run_in_unit_placebos,
)
from panelcause.scm.problem import ScmConfig, ScmFit

FAST = ScmConfig(outer_maxfev=40)


def fake_fit(pre_gaps, post_gaps):
    pre = tuple(range(2015, 2015 + len(pre_gaps)))
    post = tuple(range(2021, 2021 + len(post_gaps)))
    observed = {s: 0.3 for s in pre + post}
    synth = {s: 0.3 - g for s, g in zip(pre + post, list(pre_gaps) + list(post_gaps))}
    return ScmFit("p", Outcome.OBP, 2021, ("d",), np.ones(1), ("x",), np.ones(1), pre, synth,
                  observed, 0.0, 0.0), post


def distribution(values):
    entries = tuple(PlaceboEntry(f"c{i:02d}", {2023: v}, 0.01, 1.0) for i, v in enumerate(values))
    return PlaceboDistribution(Outcome.OBP, 2023, EstimateKind.PLACEBO, (2023,), entries)


def test_mspe_ratio_examples():
    fit, post = fake_fit([0.01, 0.01], [0.03])
    assert mspe_ratio(fit, post) == pytest.approx(9.0)
    fit, post = fake_fit([0.02, -0.02], [0.0])
    assert mspe_ratio(fit, post) == 0.0
    fit, post = fake_fit([0.02, -0.02], [0.02])
    assert mspe_ratio(fit, post) == pytest.approx(1.0)


def test_mspe_ratio_perfect_prefit():
    fit, post = fake_fit([0.0, 0.0], [0.05])
    with pytest.raises(DegeneratePreFit):
        mspe_ratio(fit, post)


def test_p_value_examples():
    placebos = np.linspace(-0.05, 0.05, 58)
    assert placebo_p_value(0.085, placebos) == pytest.approx(1 / 59)
    assert placebo_p_value(0.0, placebos) == 1.0
    three_bigger = np.concatenate([np.full(55, 0.01), [0.2, -0.3, 0.1]])
    assert placebo_p_value(0.09, three_bigger) == pytest.approx(4 / 59)
    # ties count against the target
    assert placebo_p_value(0.05, [0.05, -0.05, 0.01]) == pytest.approx(3 / 4)
    assert placebo_p_value(0.05, distribution(placebos)) == pytest.approx(3 / 59)
    with pytest.raises(ValueError):
        placebo_p_value(0.1, [])


@settings(max_examples=200)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=80), st.floats(-1, 1), st.floats(0, 1))
def test_p_value_bounds_and_monotonicity(placebos, t, bump):
    n = len(placebos)
    p = placebo_p_value(t, placebos)
    assert 1 / (n + 1) - 1e-15 <= p <= 1.0
    bigger = abs(t) + bump
    assert placebo_p_value(bigger, placebos) <= p
    k = round(p * (n + 1))
    assert abs(p * (n + 1) - k) < 1e-9


def test_dose_response_two_points():
    slope, intercept = dose_response_fit([(0.8, 0.1), (0.9, 0.2)])
    assert slope == pytest.approx(1.0) and intercept == pytest.approx(-0.7)
    assert dose_response_fit([(0.8, 0.0), (0.9, 0.0), (0.95, 0.0)]) == (0.0, 0.0)


def test_dose_response_degenerate():
    with pytest.raises(DegenerateDesign):
        dose_response_fit([(0.8, 0.1), (0.8, 0.3)])
    with pytest.raises(DegenerateDesign):
        dose_response_fit([(0.8, 0.1)])


@settings(max_examples=100)
@given(st.lists(st.tuples(st.floats(0.75, 1.0), st.floats(-0.2, 0.3)), min_size=3, max_size=40))
def test_ols_residuals_orthogonal(points):
    xs = np.array([p[0] for p in points])
    if np.ptp(xs) < 1e-3:
        return
    slope, intercept = dose_response_fit(points)
    ys = np.array([p[1] for p in points])
    r = ys - (intercept + slope * xs)
    assert abs(r.sum()) < 1e-10
    assert abs(r @ xs) < 1e-10


def test_in_space_leaves_each_player_out(panel, controls):
    picks = controls[:6]
    dist = run_in_space_placebos(picks, panel, Outcome.OBP, config=FAST)
    assert [e.player_id for e in dist.entries] == sorted(picks)
    for e in dist.successful:
        assert e.player_id not in e.fit.donor_ids
        assert set(e.fit.donor_ids) <= set(picks)
        assert e.effects[2023] == e.estimate


def test_single_control_records_failure(panel, controls):
    dist = run_in_space_placebos(controls[:1], panel, Outcome.OBP, config=FAST)
    assert dist.n_failed == 1 and "EmptyDonorPool" in dist.entries[0].failure
    assert dist.estimates().size == 0


def test_empty_in_unit_cohort(panel, controls):
    dist = run_in_unit_placebos([], controls, panel, Outcome.OBP, config=FAST)
    assert dist.entries == () and dist.kind is EstimateKind.IN_UNIT_PLACEBO


def test_in_time_uses_2022(panel, targets, controls):
    dist = run_in_time_placebo(targets[:2], controls, panel, Outcome.OBP, config=FAST)
    assert dist.intervention_year == 2022
    for e in dist.successful:
        assert list(e.effects) == [2022]
        assert not any("2022" in lab for lab in e.fit.covariate_labels)


def test_parallel_matches_serial(panel, controls):
    picks = controls[:4]
    a = run_in_space_placebos(picks, panel, Outcome.OBP, config=FAST)
    b = run_in_space_placebos(picks, panel, Outcome.OBP, config=FAST, n_jobs=2)
    assert a.entries == b.entries
