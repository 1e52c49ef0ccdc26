"""``panelcause`` command line.

Exit status is 0 on success and 2 on any input or analysis error, in which
case a JSON object ``{"status": "error", "errors": [...]}`` is written to
stderr, one entry per problem.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .config import ANALYSES, RunConfig, parse_analyses
from .core import Cohort, EstimateKind
from .did import DID_ASSUMPTIONS
from .exceptions import PanelCauseError
from .inference import PLACEBO_CAVEAT, fit_batch
from .pipeline import Results, load_inputs, run_analyses
from .report import FIGURES, build_bundle, json_text, write_bundle

log = logging.getLogger("panelcause")

EXIT_OK = 0
EXIT_ERROR = 2


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI run configuration")
    common.add_argument("--out-dir", type=Path, default=Path("."),
                        help="directory that receives report/ (default: current directory)")
    common.add_argument("--analyses", help=f"comma-separated subset of {','.join(ANALYSES)}, or 'all'")
    common.add_argument("--seedless", action="store_true",
                        help="accepted for scripting; every solver is deterministic and no seed is used")
    common.add_argument("--jobs", type=int, help="worker processes for independent fits")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="panelcause", description="Shift-ban panel causal analyses.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run the configured analyses and write report/")
    sub.add_parser("did", parents=[common], help="league-split difference-in-differences only")
    scm = sub.add_parser("scm", parents=[common], help="synthetic control fits for one player")
    scm.add_argument("--target", required=True, help="player_id to fit")
    sub.add_parser("placebo", parents=[common], help="main fits plus placebo analyses")
    figs = sub.add_parser("figures", parents=[common], help="write figure data files only")
    figs.add_argument("--figure", action="append", choices=FIGURES,
                      help="figure id (repeatable); default: every figure whose analyses ran")
    return p


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.analyses:
        cfg = cfg.with_analyses(args.analyses)
    if args.jobs:
        cfg = replace(cfg, n_jobs=args.jobs)
    return cfg


def _error_entry(exc: BaseException) -> dict:
    entry = {"type": type(exc).__name__, "message": str(exc)}
    for attr in ("path", "line", "column", "field", "player_id", "season", "figure_id", "target_id"):
        if hasattr(exc, attr):
            value = getattr(exc, attr)
            entry[attr] = str(value) if isinstance(value, Path) else value
    return entry


def _errors(exc: BaseException) -> list[dict]:
    nested = getattr(exc, "problems", None)
    if nested:
        return [_error_entry(e) for e in nested]
    return [_error_entry(exc)]


def _print_caveats(results: Results, out) -> None:
    if "did" in results.ran:
        print("DID identifying assumptions:", file=out)
        for line in DID_ASSUMPTIONS:
            print(f"  {line}", file=out)
    if "placebos" in results.ran:
        print(f"Note: {PLACEBO_CAVEAT}", file=out)


def _cmd_run(cfg: RunConfig, args) -> int:
    results = run_analyses(cfg)
    root = write_bundle(results, args.out_dir)
    _print_caveats(results, sys.stdout)
    print(f"wrote {root}")
    return EXIT_OK


def _cmd_scm(cfg: RunConfig, args) -> int:
    cfg = cfg.with_analyses(("scm",))
    results = Results(cfg)
    load_inputs(cfg, results)
    pid = args.target
    if pid not in results.panel.player_ids:
        raise PanelCauseError(f"unknown player_id {pid!r}")
    controls = [c for c in results.members(Cohort.LOW) if c != pid]
    fits = []
    for outcome in cfg.outcomes:
        batch = fit_batch(
            [pid], lambda _: controls, results.panel, outcome, kind=EstimateKind.ATT,
            config=cfg.scm, min_pa=cfg.min_pa,
        )
        entry = batch.entries[0]
        if not entry.ok:
            raise PanelCauseError(f"{outcome.value} fit for {pid} failed: {entry.failure}")
        fits.append(entry.fit.to_dict(results.panel))
        print(f"{pid} {outcome.value}: effect {entry.estimate:+.3f}, pre-RMSPE {entry.pre_rmspe:.4f}")
    path = args.out_dir / "report" / f"scm_{pid}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json_text({"target": pid, "fits": fits}), encoding="utf-8")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_placebo(cfg: RunConfig, args) -> int:
    keep = [a for a in cfg.analyses if a in ("in_unit", "in_time")]
    cfg = cfg.with_analyses(("scm", "placebos", *keep))
    return _cmd_run(cfg, args)


def _cmd_figures(cfg: RunConfig, args) -> int:
    results = run_analyses(cfg)
    root = args.out_dir / "report"
    bundle = build_bundle(results, figures=args.figure, tables=False)
    for rel, text in bundle.items():
        if rel.startswith("figures/"):
            path = root / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            print(f"wrote {path}")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "did": lambda cfg, args: _cmd_run(cfg.with_analyses(("did",)), args),
    "scm": _cmd_scm,
    "placebo": _cmd_placebo,
    "figures": _cmd_figures,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config(args)
        if args.analyses:
            parse_analyses(args.analyses)
        return COMMANDS[args.command](cfg, args)
    except (PanelCauseError, OSError) as exc:
        print(json.dumps({"status": "error", "errors": _errors(exc)}, sort_keys=True), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
