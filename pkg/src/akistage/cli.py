"""Command-line entry point: ``annotate``, ``validate``, and ``config``.

Every flag defaults to the validation-study configuration, so a bare
``annotate`` run uses the rolling 7-day minimum relative baseline, the
rolling 48-hour minimum absolute baseline, strict consecutive-hour urine
evaluation, anuria at exactly zero, and forward filling of gaps up to five
hours.  A JSON config file may supply the same keys; explicit flags win.

Exit codes: 0 success, 1 data/validation errors, 2 usage errors (including
unreadable flag or config values), 3 accuracy below ``--min-accuracy``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .baseline import BaselineKind, BaselineMethod, WindowStat
from .core import Quantity, StagingError, Unit
from .io import load_dataset, write_stage_records, write_summaries
from .pipeline import RunConfig, annotate_bundle, summarize_all
from .probes import ProbeConfig, UoMode
from .validate import load_labels, score, write_report

_CONFIG_DEFAULTS: Dict[str, object] = {
    "uo_mode": "strict-consecutive",
    "anuria_threshold": "0",
    "rel_baseline": "rolling:min:168",
    "abs_baseline": "rolling:min:48",
    "baseline_stat": None,
    "window_hours": None,
    "assumed_gfr": "75",
    "max_gap_hours": 5,
    "impute": True,
    "creatinine_unit": "mg/dL",
}

_UNIT_ALIASES = {
    "mg/dl": Unit.MG_DL,
    "umol/l": Unit.UMOL_L,
    "µmol/l": Unit.UMOL_L,
}


class UsageError(Exception):
    """Bad flag or config-file value; maps to exit code 2."""


def _config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON config file; flags override it")
    parser.add_argument(
        "--uo-mode", choices=["strict-consecutive", "trailing-mean"], default=None
    )
    parser.add_argument(
        "--anuria-threshold",
        metavar="ML_KG_H",
        default=None,
        help="urine rate at or below which an hour counts as anuric (default 0)",
    )
    parser.add_argument(
        "--rel-baseline",
        metavar="SPEC",
        default=None,
        help="relative-pathway baseline: fixed:<mg/dL> | initial:<stat>:<hours> | "
        "rolling:<stat>:<hours> | cockcroft-gault[:<gfr>] (default rolling:min:168)",
    )
    parser.add_argument(
        "--abs-baseline",
        metavar="SPEC",
        default=None,
        help="absolute-pathway baseline spec (default rolling:min:48)",
    )
    parser.add_argument(
        "--baseline-stat",
        choices=["min", "mean", "first"],
        default=None,
        help="override the window statistic of both window baselines",
    )
    parser.add_argument(
        "--window-hours",
        type=int,
        default=None,
        help="override the window length of both window baselines",
    )
    parser.add_argument(
        "--assumed-gfr",
        metavar="ML_MIN",
        default=None,
        help="assumed filtration rate for cockcroft-gault baselines (default 75)",
    )
    parser.add_argument("--max-gap-hours", type=int, default=None)
    parser.add_argument(
        "--no-impute",
        action="store_true",
        default=False,
        help="disable forward filling; input must already be gridded as desired",
    )
    parser.add_argument(
        "--creatinine-unit",
        metavar="UNIT",
        default=None,
        help="unit of the creatinine file: mg/dL (default) or umol/L",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="akistage",
        description="Hourly KDIGO acute-kidney-injury stage annotation and validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    annotate = sub.add_parser("annotate", help="stage a dataset hour by hour")
    annotate.add_argument("--urine-output", required=True, metavar="FILE")
    annotate.add_argument("--creatinine", required=True, metavar="FILE")
    annotate.add_argument("--dialysis", required=True, metavar="FILE")
    annotate.add_argument("--patients", required=True, metavar="FILE")
    annotate.add_argument("--output", required=True, metavar="FILE")
    annotate.add_argument(
        "--summary",
        metavar="FILE",
        default=None,
        help="per-patient summary file (default: <output>.summary.csv)",
    )
    annotate.add_argument(
        "--jobs",
        type=int,
        default=os.cpu_count() or 1,
        help="parallel workers across subjects (default: available processors)",
    )
    _config_flags(annotate)

    validate = sub.add_parser("validate", help="score predictions against gold labels")
    validate.add_argument("--pred", required=True, metavar="FILE")
    validate.add_argument("--gold", required=True, metavar="FILE")
    validate.add_argument(
        "--min-accuracy",
        metavar="FRACTION",
        default=None,
        help="exit 3 unless every category's overall accuracy meets this bound",
    )
    validate.add_argument(
        "--report-file", metavar="FILE", default=None, help="also write the report as CSV"
    )

    config = sub.add_parser("config", help="print the effective configuration as JSON")
    _config_flags(config)

    return parser


def _resolve_settings(args: argparse.Namespace) -> Dict[str, object]:
    settings = dict(_CONFIG_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as f:
                loaded = json.load(f)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config file {args.config}: {exc}") from None
        unknown = set(loaded) - set(_CONFIG_DEFAULTS)
        if unknown:
            raise UsageError(f"config file {args.config}: unknown keys {sorted(unknown)}")
        settings.update(loaded)
    for key in (
        "uo_mode",
        "anuria_threshold",
        "rel_baseline",
        "abs_baseline",
        "baseline_stat",
        "window_hours",
        "assumed_gfr",
        "max_gap_hours",
        "creatinine_unit",
    ):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if args.no_impute:
        settings["impute"] = False
    return settings


def _parse_decimal_flag(name: str, text: object, unit: Unit) -> Quantity:
    try:
        return Quantity.parse(str(text), unit)
    except ValueError:
        raise UsageError(f"{name}: not a decimal number: {text!r}") from None


def _build_baseline(
    spec: str, stat: Optional[str], hours: Optional[int], gfr: Quantity
) -> BaselineMethod:
    try:
        method = BaselineMethod.parse(str(spec))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        if method.kind in (BaselineKind.INITIAL_WINDOW, BaselineKind.ROLLING_WINDOW):
            if stat is not None or hours is not None:
                ctor = (
                    BaselineMethod.initial_window
                    if method.kind is BaselineKind.INITIAL_WINDOW
                    else BaselineMethod.rolling_window
                )
                method = ctor(
                    WindowStat(stat) if stat is not None else method.stat,
                    int(hours) if hours is not None else method.length_hours,
                )
        elif method.kind is BaselineKind.COCKCROFT_GAULT and ":" not in str(spec):
            method = BaselineMethod.cockcroft_gault(gfr)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return method


def build_run_config(settings: Dict[str, object]) -> Tuple[RunConfig, List[str]]:
    """Turn resolved settings into a RunConfig plus advisory warnings."""
    try:
        uo_mode = UoMode(str(settings["uo_mode"]))
    except ValueError:
        raise UsageError(f"uo_mode: unknown mode {settings['uo_mode']!r}") from None
    anuria = _parse_decimal_flag("anuria_threshold", settings["anuria_threshold"], Unit.ML_KG_H)
    gfr = _parse_decimal_flag("assumed_gfr", settings["assumed_gfr"], Unit.ML_MIN)
    stat = settings["baseline_stat"]
    hours = settings["window_hours"]
    rel = _build_baseline(str(settings["rel_baseline"]), stat, hours, gfr)
    abs_ = _build_baseline(str(settings["abs_baseline"]), stat, hours, gfr)
    unit_key = str(settings["creatinine_unit"]).strip().lower()
    if unit_key not in _UNIT_ALIASES:
        raise UsageError(f"creatinine_unit: expected mg/dL or umol/L, got {settings['creatinine_unit']!r}")
    try:
        probe = ProbeConfig(
            uo_mode=uo_mode, anuria_threshold=anuria, rel_baseline=rel, abs_baseline=abs_
        )
        cfg = RunConfig(
            probe=probe,
            max_gap_hours=int(settings["max_gap_hours"]),
            imputation_enabled=bool(settings["impute"]),
            creatinine_unit=_UNIT_ALIASES[unit_key],
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    warnings = []
    if BaselineKind.COCKCROFT_GAULT in (rel.kind, abs_.kind):
        warnings.append(
            "cockcroft-gault baseline selected: back-calculated creatinine is a "
            "last-resort baseline; prefer a measured one when available"
        )
    return cfg, warnings


def _effective_json(cfg: RunConfig, jobs: Optional[int], warnings: List[str]) -> str:
    payload = {
        "uo_mode": cfg.probe.uo_mode.value,
        "anuria_threshold": str(cfg.probe.anuria_threshold),
        "rel_baseline": cfg.probe.rel_baseline.describe(),
        "abs_baseline": cfg.probe.abs_baseline.describe(),
        "max_gap_hours": cfg.max_gap_hours,
        "impute": cfg.imputation_enabled,
        "creatinine_unit": cfg.creatinine_unit.value,
    }
    if jobs is not None:
        payload["jobs"] = jobs
    if warnings:
        payload["warnings"] = warnings
    return json.dumps(payload, indent=2)


def _cmd_annotate(args: argparse.Namespace) -> int:
    cfg, warnings = build_run_config(_resolve_settings(args))
    print(_effective_json(cfg, args.jobs, warnings), file=sys.stderr)
    bundle = load_dataset(
        urine_output_file=args.urine_output,
        creatinine_file=args.creatinine,
        dialysis_file=args.dialysis,
        patients_file=args.patients,
        creatinine_unit=cfg.creatinine_unit,
    )
    records = annotate_bundle(bundle, cfg, jobs=args.jobs)
    write_stage_records(records, args.output)
    summary_path = args.summary
    if summary_path is None:
        out = Path(args.output)
        summary_path = out.with_name(out.stem + ".summary" + (out.suffix or ".csv"))
    write_summaries(summarize_all(records), summary_path)
    print(
        f"annotated {len(records)} hours across {len({r.subject_id for r in records})} subjects",
        file=sys.stderr,
    )
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    bound = None
    if args.min_accuracy is not None:
        try:
            bound = Fraction(Decimal(str(args.min_accuracy)))
        except (InvalidOperation, ValueError):
            raise UsageError(f"--min-accuracy: not a number: {args.min_accuracy!r}") from None
    pred = load_labels(args.pred)
    gold = load_labels(args.gold)
    report = score(pred, gold)
    print(report.format_table())
    if args.report_file:
        write_report(report, args.report_file)
    if bound is not None:
        failing = [
            c for c, s in report.categories.items() if s.overall_accuracy < bound
        ]
        if failing:
            print(f"accuracy below {args.min_accuracy} for: {', '.join(failing)}", file=sys.stderr)
            return 3
    return 0


def _cmd_config(args: argparse.Namespace) -> int:
    cfg, warnings = build_run_config(_resolve_settings(args))
    print(_effective_json(cfg, None, warnings))
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "annotate":
            return _cmd_annotate(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_config(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"usage error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    except StagingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
