"""Four-cell difference-in-differences on league splits.

The treated population is left-handed batters in bases-empty plate
appearances, the comparison population right-handed batters in the same
situation. For a post season ``t`` and the previous full season ``t-1``
(2019 precedes 2021)::

    did = (lhb[t] - lhb[t-1]) - (rhb[t] - rhb[t-1])

Post years before 2023 are pre-trend diagnostics. The 2023 estimate is the
ATT; the 2024 estimate (against 2023) measures the change in the effect
between the first and second season under the rule.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .core import (
    INTERVENTION_YEAR,
    EffectEstimate,
    EstimateKind,
    LeagueSplitSeries,
    Outcome,
    Population,
    is_analysis_season,
    previous_season,
    season_set,
)
from .exceptions import InvariantViolation, MissingSeason

# Labelled caveats attached to every DID report. They cannot be checked from
# the data; the pre-trend rows are the only partial diagnostic.
DID_ASSUMPTIONS = (
    "(1) consistency and no anticipation: observed outcomes before 2023 are the "
    "no-ban outcomes and those from 2023 on are the with-ban outcomes",
    "(2) no spillover: right-handed bases-empty plate appearances are unaffected by the ban",
    "(3) parallel trends: absent the ban, the season-over-season change for "
    "left-handed batters would equal that for right-handed batters",
)

REPORT_COLUMNS = (
    "outcome", "post_year", "pre_year", "lhb_pre", "lhb_post", "rhb_pre", "rhb_post",
    "did_estimate", "counterfactual_lhb_post", "kind",
)


@dataclass(frozen=True)
class DidResult:
    outcome: Outcome
    year: int
    pre_year: int
    lhb_pre: float
    lhb_post: float
    rhb_pre: float
    rhb_post: float
    lhb_diff: float
    rhb_diff: float
    did_estimate: float
    counterfactual_post_lhb: float
    kind: EstimateKind

    def as_effect(self) -> EffectEstimate:
        return EffectEstimate(self.outcome, Population.LHB.value, self.year, self.did_estimate, self.kind)

    def as_row(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "post_year": self.year,
            "pre_year": self.pre_year,
            "lhb_pre": self.lhb_pre,
            "lhb_post": self.lhb_post,
            "rhb_pre": self.rhb_pre,
            "rhb_post": self.rhb_post,
            "did_estimate": self.did_estimate,
            "counterfactual_lhb_post": self.counterfactual_post_lhb,
            "kind": self.kind.value,
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outcome"] = self.outcome.value
        d["kind"] = self.kind.value
        return d


def _value(series: LeagueSplitSeries, season: int) -> float:
    try:
        return series.values[season]
    except KeyError:
        raise MissingSeason(series.population.value, season) from None


def did_2x2(
    series_lhb: LeagueSplitSeries,
    series_rhb: LeagueSplitSeries,
    pre: int,
    post: int,
) -> DidResult:
    if series_lhb.outcome is not series_rhb.outcome:
        raise ValueError(
            f"outcome mismatch: {series_lhb.outcome.value} vs {series_rhb.outcome.value}"
        )
    for season in (pre, post):
        if not is_analysis_season(season):
            raise InvariantViolation("season", season, "not an analysis season")
    if not pre < post:
        raise InvariantViolation("pre", pre, f"must precede post={post}")
    lhb_pre, lhb_post = _value(series_lhb, pre), _value(series_lhb, post)
    rhb_pre, rhb_post = _value(series_rhb, pre), _value(series_rhb, post)
    lhb_diff = lhb_post - lhb_pre
    rhb_diff = rhb_post - rhb_pre
    kind = EstimateKind.PRE_TREND if post < INTERVENTION_YEAR else EstimateKind.ATT
    return DidResult(
        outcome=series_lhb.outcome,
        year=post,
        pre_year=pre,
        lhb_pre=lhb_pre,
        lhb_post=lhb_post,
        rhb_pre=rhb_pre,
        rhb_post=rhb_post,
        lhb_diff=lhb_diff,
        rhb_diff=rhb_diff,
        did_estimate=lhb_diff - rhb_diff,
        counterfactual_post_lhb=lhb_pre + rhb_diff,
        kind=kind,
    )


def did_series(
    series_lhb: LeagueSplitSeries,
    series_rhb: LeagueSplitSeries,
    seasons=None,
) -> list[DidResult]:
    """One estimate per adjacent pair of analysis seasons in ``seasons``.

    Adjacency skips 2020, so 2021 is compared with 2019. ``seasons`` defaults
    to the seasons present in both series.
    """
    if seasons is None:
        seasons = set(series_lhb.values) & set(series_rhb.values)
    seasons = season_set(seasons)
    if len(seasons) < 2:
        raise InvariantViolation("seasons", seasons, "need at least two seasons")
    present = set(seasons)
    return [
        did_2x2(series_lhb, series_rhb, previous_season(post), post)
        for post in seasons[1:]
        if previous_season(post) in present
    ]


def rescale_att(att: EffectEstimate, pa_share: float) -> EffectEstimate:
    """League-wide effect, assuming the ban only touches this split's PAs."""
    if not 0.0 <= pa_share <= 1.0:
        raise InvariantViolation("pa_share", pa_share, "outside [0, 1]")
    return EffectEstimate(att.outcome, att.unit, att.year, att.estimate * pa_share, att.kind)


__all__ = ["DID_ASSUMPTIONS", "DidResult", "REPORT_COLUMNS", "did_2x2", "did_series", "rescale_att"]
