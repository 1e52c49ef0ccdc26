"""Write a results bundle as plain CSV and JSON.

Everything written is a pure function of the configuration and the input
files: no timestamps, no absolute paths, rows in sorted order and floats in
shortest round-trip form. Two runs on the same inputs give identical bytes.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from collections.abc import Iterable
from pathlib import Path

from .core import INTERVENTION_YEAR, Outcome, Population
from .did import DID_ASSUMPTIONS, REPORT_COLUMNS
from .exceptions import AnalysisNotRun
from .inference import DUMP_COLUMNS, PLACEBO_CAVEAT, PlaceboDistribution
from .pipeline import Results, required_files
from .scm.problem import DISPLAY_WEIGHT_FLOOR

FIGURE_COLUMNS = ("figure", "series", "player_or_population", "season", "value")
FIGURES = ("fig1", "fig2", "fig3", "fig4", "figA1", "figA2", "figA3", "figA4")
REPORT_DIR = "report"


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


# --------------------------------------------------------------------------
# figure data

def _gap_rows(fig, series, dist: PlaceboDistribution):
    for e in dist.successful:
        fit = e.fit
        for season in sorted(fit.synthetic_trajectory):
            if season in fit.observed:
                yield (fig, series, e.player_id, season, fit.gap(season))


def _trajectory_rows(fig, results: Results, batches: dict[Outcome, PlaceboDistribution]):
    pid = results.config.focus_player
    rows = []
    for outcome, dist in batches.items():
        entry = next((e for e in dist.successful if e.player_id == pid), None)
        if entry is None:
            continue
        fit = entry.fit
        tag = outcome.value
        for season in sorted(fit.synthetic_trajectory):
            if season in fit.observed:
                rows.append((fig, f"observed_{tag}", pid, season, fit.observed[season]))
            rows.append((fig, f"synthetic_{tag}", pid, season, fit.synthetic_trajectory[season]))
    if not rows:
        raise AnalysisNotRun(fig, f"no fit for focus player {pid!r}")
    return rows


def _need(results: Results, fig: str, *analyses: str):
    missing = [a for a in analyses if a not in results.ran]
    if missing:
        raise AnalysisNotRun(fig, "requires " + ", ".join(missing))


def figure_rows(results: Results, figure_id: str) -> list[tuple]:
    """Long-format rows ``(figure, series, player_or_population, season, value)``."""
    if figure_id not in FIGURES:
        raise AnalysisNotRun(figure_id, f"unknown figure; expected one of {FIGURES}")
    rows: list[tuple] = []
    if figure_id == "fig1":
        _need(results, figure_id, "did")
        for outcome, did_rows in results.did.items():
            tag = outcome.value
            trend = {}
            for r in did_rows:
                if r.year > INTERVENTION_YEAR:
                    continue
                trend[r.pre_year] = (r.lhb_pre, r.rhb_pre)
                trend[r.year] = (r.lhb_post, r.rhb_post)
            for pop_i, pop in enumerate(Population):
                for season in sorted(trend):
                    rows.append((figure_id, f"trend_{tag}", pop.value, season, trend[season][pop_i]))
            for r in did_rows:
                if r.year == INTERVENTION_YEAR:
                    rows.append((figure_id, f"counterfactual_{tag}", Population.LHB.value, r.year,
                                 r.counterfactual_post_lhb))
            for r in did_rows:
                if r.year <= INTERVENTION_YEAR:
                    rows.append((figure_id, f"did_{tag}", "LHB-RHB", r.year, r.did_estimate))
    elif figure_id == "fig2":
        _need(results, figure_id, "scm")
        rows = _trajectory_rows(figure_id, results, results.targets)
    elif figure_id == "figA1":
        _need(results, figure_id, "extension_2024")
        rows = _trajectory_rows(figure_id, results, results.extension)
    elif figure_id in ("fig3", "figA2", "figA3", "figA4"):
        need = {"fig3": ("scm",), "figA2": ("extension_2024",), "figA3": ("in_unit",), "figA4": ("in_time",)}
        _need(results, figure_id, *need[figure_id])
        treated = {
            "fig3": results.targets, "figA2": results.extension,
            "figA3": results.in_unit, "figA4": results.in_time,
        }[figure_id]
        controls = {
            "fig3": results.placebos, "figA2": results.extension_placebos,
            "figA3": results.placebos, "figA4": results.in_time_controls,
        }[figure_id]
        for outcome, dist in treated.items():
            rows.extend(_gap_rows(figure_id, f"target_gap_{outcome.value}", dist))
            if outcome in controls:
                rows.extend(_gap_rows(figure_id, f"placebo_gap_{outcome.value}", controls[outcome]))
    elif figure_id == "fig4":
        _need(results, figure_id, "scm", "dose_response")
        players = set()
        for outcome, dist in results.targets.items():
            for e in dist.successful:
                players.add(e.player_id)
                rows.append((figure_id, f"effect_{outcome.value}", e.player_id, INTERVENTION_YEAR, e.estimate))
        for pid in sorted(players):
            rows.append((figure_id, "shift_rate", pid, 2022, results.shift_rates[pid]))
        for outcome, (slope, intercept) in results.dose_response.items():
            rows.append((figure_id, f"ols_{outcome.value}", "slope", INTERVENTION_YEAR, slope))
            rows.append((figure_id, f"ols_{outcome.value}", "intercept", INTERVENTION_YEAR, intercept))
    return rows


def emit_figure_data(results: Results, figure_id: str, out_dir: str | Path) -> Path:
    rows = figure_rows(results, figure_id)
    path = Path(out_dir) / f"{figure_id}.csv"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(FIGURE_COLUMNS, rows), encoding="utf-8")
    return path


# --------------------------------------------------------------------------
# tables

def _did_files(results: Results) -> dict[str, str]:
    rows = []
    table1 = []
    for outcome, did_rows in results.did.items():
        for r in did_rows:
            rows.append([r.as_row()[c] for c in REPORT_COLUMNS])
        att = next((r for r in did_rows if r.year == INTERVENTION_YEAR), None)
        if att is not None:
            tag = outcome.value
            table1.append((tag, "LHB", att.lhb_pre, att.lhb_post, att.lhb_diff))
            table1.append((tag, "RHB", att.rhb_pre, att.rhb_post, att.rhb_diff))
            table1.append((tag, "DID", None, None, att.did_estimate))
            table1.append((tag, "LHB_counterfactual", None, att.counterfactual_post_lhb, None))
    payload = {
        "assumptions": list(DID_ASSUMPTIONS),
        "estimates": [r.to_dict() for rs in results.did.values() for r in rs],
        "rescaled_att": [
            {"outcome": o.value, "year": e.year, "estimate": e.estimate}
            for o, e in results.did_rescaled.items()
        ],
    }
    return {
        "did_estimates.csv": csv_text(REPORT_COLUMNS, rows),
        "did_table1.csv": csv_text(
            ("outcome", "row", str(INTERVENTION_YEAR - 1), str(INTERVENTION_YEAR), "difference"), table1
        ),
        "did.json": json_text(payload),
    }


def _dump_rows(dist: PlaceboDistribution, is_target: bool, p_values=None, year=None):
    year = dist.post_years[0] if year is None else year
    for e in dist.entries:
        if not e.ok:
            continue
        p = None
        if p_values is not None:
            p = p_values.get(e.player_id, p_values.get((e.player_id, year)))
        yield (e.player_id, dist.outcome.value, e.effects[year], e.pre_rmspe, e.mspe_ratio, is_target, p)


def _failure_rows(label: str, batches: dict[Outcome, PlaceboDistribution]):
    for outcome, dist in batches.items():
        for e in dist.entries:
            if not e.ok:
                yield (label, outcome.value, e.player_id, e.failure)


def _scm_files(results: Results) -> dict[str, str]:
    panel = results.panel
    out = {}
    name = panel.name
    outcomes = list(results.targets)

    # main estimate matrix: one row per target
    header = ["player_id", "name", "shift_rate_2022"]
    for o in outcomes:
        header += [f"{o.value}_estimate", f"{o.value}_p_value"]
    players = sorted({e.player_id for d in results.targets.values() for e in d.entries})
    table = []
    for pid in players:
        row = [pid, name(pid), results.shift_rates.get(pid)]
        for o in outcomes:
            entry = next(e for e in results.targets[o].entries if e.player_id == pid)
            row += [entry.estimate, results.p_values.get(o, {}).get(pid)]
        table.append(row)
    out["scm_estimates.csv"] = csv_text(header, table)

    weights = []
    fits = {"main": results.targets, "extension_2024": results.extension,
            "extension_2024_only": results.extension_2024_only}
    dumps = {}
    for label, batches in fits.items():
        if not batches:
            continue
        dumps[label] = []
        for outcome, dist in batches.items():
            for e in dist.successful:
                dumps[label].append(e.fit.to_dict(panel))
                for rank, (d, w) in enumerate(e.fit.top_donors(DISPLAY_WEIGHT_FLOOR), 1):
                    weights.append((label, e.player_id, outcome.value, rank, d, name(d), w))
    out["scm_fits.json"] = json_text(dumps)
    out["donor_weights.csv"] = csv_text(
        ("analysis", "target", "outcome", "rank", "donor_id", "donor_name", "weight"), weights
    )

    if results.extension:
        header = ["player_id", "name"]
        for o in results.extension:
            for y in (2023, 2024):
                header += [f"{o.value}_{y}_estimate", f"{o.value}_{y}_p_value"]
        ids = sorted({e.player_id for d in results.extension.values() for e in d.entries})
        table = []
        for pid in ids:
            row = [pid, name(pid)]
            for o, dist in results.extension.items():
                entry = next(e for e in dist.entries if e.player_id == pid)
                pv = results.extension_p_values.get(o, {})
                for y in (2023, 2024):
                    row += [entry.effects.get(y), pv.get((pid, y))]
            table.append(row)
        out["scm_extension_estimates.csv"] = csv_text(header, table)
        only = []
        for o, dist in results.extension_2024_only.items():
            for e in dist.entries:
                only.append((e.player_id, name(e.player_id), o.value, e.effects.get(2024)))
        out["scm_extension_2024_only.csv"] = csv_text(("player_id", "name", "outcome", "estimate_2024"), only)

    dumps_csv = {
        "placebo_in_space.csv": [
            (results.targets, True, results.p_values, None),
            (results.placebos, False, None, None),
        ],
        "placebo_in_unit.csv": [(results.in_unit, False, None, None)],
        "placebo_in_time.csv": [
            (results.in_time, True, None, None),
            (results.in_time_controls, False, None, None),
        ],
        "placebo_extension.csv": [
            (results.extension, True, results.extension_p_values, y) for y in (2023, 2024)
        ] + [(results.extension_placebos, False, None, y) for y in (2023, 2024)],
    }
    ran_for = {
        "placebo_in_space.csv": "placebos", "placebo_in_unit.csv": "in_unit",
        "placebo_in_time.csv": "in_time", "placebo_extension.csv": "extension_2024",
    }
    for fname, parts in dumps_csv.items():
        if ran_for[fname] not in results.ran:
            continue
        rows = []
        for batches, is_target, pv, year in parts:
            for outcome, dist in batches.items():
                per_outcome = None if pv is None else pv.get(outcome, {})
                rows.extend(_dump_rows(dist, is_target, per_outcome, year))
        if fname == "placebo_extension.csv":
            rows = [r for r in rows if r[2] is not None]
        out[fname] = csv_text(DUMP_COLUMNS, rows)

    failures = []
    for label, batches in (
        ("main", results.targets), ("in_space", results.placebos), ("in_unit", results.in_unit),
        ("in_time", results.in_time), ("in_time_controls", results.in_time_controls),
        ("extension_2024", results.extension), ("extension_placebos", results.extension_placebos),
        ("extension_2024_only", results.extension_2024_only),
    ):
        failures.extend(_failure_rows(label, batches))
    out["fit_failures.csv"] = csv_text(("analysis", "outcome", "player_id", "reason"), failures)

    if results.dose_response:
        out["dose_response.csv"] = csv_text(
            ("outcome", "slope", "intercept", "slope_per_10pp", "n_targets"),
            [
                (o.value, s, i, s * 0.1, len(results.targets[o].successful))
                for o, (s, i) in results.dose_response.items()
            ],
        )
    return out


def _cohort_file(results: Results) -> str:
    return csv_text(
        ("player_id", "name", "shift_rate_2022", "cohort"),
        [(c.player_id, results.panel.name(c.player_id), c.shift_rate_2022, c.cohort.value)
         for c in results.cohorts],
    )


def summary(results: Results) -> dict:
    s = {"analyses_run": sorted(results.ran)}
    if results.cohorts:
        counts = {}
        for c in results.cohorts:
            counts[c.cohort.value] = counts.get(c.cohort.value, 0) + 1
        s["cohort_counts"] = dict(sorted(counts.items()))
    for label, batches in (("placebo", results.placebos), ("in_unit", results.in_unit)):
        if batches:
            s[f"{label}_share_positive"] = {
                o.value: (d.share_positive() if d.successful else None) for o, d in batches.items()
            }
            s[f"{label}_failed_fits"] = {o.value: d.n_failed for o, d in batches.items()}
    return s


def build_bundle(results: Results, figures: Iterable[str] | None = None, tables: bool = True) -> dict[str, str]:
    """Relative path -> file text for the whole report."""
    files: dict[str, str] = {}
    if tables:
        if "did" in results.ran:
            files.update(_did_files(results))
        if "scm" in results.ran:
            files["cohorts.csv"] = _cohort_file(results)
            files.update(_scm_files(results))
    wanted = FIGURES if figures is None else tuple(figures)
    for fig in wanted:
        try:
            rows = figure_rows(results, fig)
        except AnalysisNotRun:
            if figures is not None:
                raise
            continue
        files[f"figures/{fig}.csv"] = csv_text(FIGURE_COLUMNS, rows)

    cfg = results.config
    data_hashes = {}
    for fname in sorted(required_files(cfg)):
        data_hashes[fname] = sha256_file(cfg.data_dir / fname)
    settings = cfg.to_dict()
    del settings["data_dir"]
    manifest = {
        "config": settings,
        "config_sha256": cfg.digest(),
        "input_sha256": data_hashes,
        "caveats": {"did": list(DID_ASSUMPTIONS), "placebo": PLACEBO_CAVEAT},
        "summary": summary(results),
        "files": {
            name: hashlib.sha256(text.encode("utf-8")).hexdigest()
            for name, text in sorted(files.items())
        },
    }
    files["manifest.json"] = json_text(manifest)
    return dict(sorted(files.items()))


def write_bundle(results: Results, out_dir: str | Path, **kw) -> Path:
    root = Path(out_dir) / REPORT_DIR
    for rel, text in build_bundle(results, **kw).items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return root


__all__ = [
    "FIGURES", "FIGURE_COLUMNS", "build_bundle", "emit_figure_data", "figure_rows", "write_bundle",
]
