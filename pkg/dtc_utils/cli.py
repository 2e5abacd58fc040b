"""Command-line front end: dtc-lab {demo,sweep,compute,monotone,runs}.

Exit codes: 0 on success, 1 on numerical failures, 2 on invalid input
or configuration, 3 if an operator would exceed the dimension cap.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from collections.abc import Sequence
from typing import Callable

from .config import DEFAULT_SETTINGS, Settings
from .correlations import GapReport
from .exc import (
    ConfigError,
    DimensionCapExceededError,
    DtcError,
    OutputFileError,
    StateFileError,
    StateValidationError,
    UnknownDemoError,
    UnknownRunError,
)
from .lab import (
    COMPUTE_QUANTITIES,
    DEMOS,
    ReportRecord,
    SweepConfig,
    SweepSummary,
    compute_quantity,
    demo,
    format_report,
    format_value,
    monotonicity_survey,
    sweep,
    write_jsonl,
)
from .stateio import read_state
from .store import DEFAULT_URL, ReportStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_CAP_EXCEEDED = 3

_Handler = Callable[[argparse.Namespace, Settings], int]


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    handler: _Handler = args.handler
    try:
        settings = settings_from_args(args)
        return handler(args, settings)
    except DimensionCapExceededError as exc:
        _error(exc)
        return EXIT_CAP_EXCEEDED
    except (
        StateValidationError,
        StateFileError,
        OutputFileError,
        ConfigError,
        UnknownDemoError,
        UnknownRunError,
    ) as exc:
        _error(exc)
        return EXIT_INVALID
    except DtcError as exc:
        _error(exc)
        return EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--base",
        choices=["2", "e"],
        default="2",
        help="logarithm base: 2 for bits, e for nats (default: 2)",
    )
    common.add_argument("--cap", type=int, help="largest matrix dimension")
    common.add_argument(
        "--tol-support",
        type=float,
        help="support threshold relative to the largest eigenvalue",
    )
    common.add_argument(
        "--tol-contain", type=float, help="support containment tolerance"
    )
    common.add_argument(
        "--gap-threshold",
        type=float,
        help="smallest gap counted as a difference",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="log more (-vv for debug output)",
    )

    parser = argparse.ArgumentParser(
        prog="dtc-lab",
        description="Compare the dual total correlation with its "
        "relative-entropy reformulations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", parents=[common], help="run a named example")
    p.add_argument("name", help=f"one of {', '.join(DEMOS)}")
    p.add_argument("--out", help="write the report as JSON to this path")
    p.set_defaults(handler=run_demo)

    p = sub.add_parser("sweep", parents=[common], help="random state survey")
    _add_ensemble_arguments(p)
    p.add_argument("--out", help="write JSON lines to this path")
    p.add_argument(
        "--no-timings",
        action="store_true",
        help="omit wall-clock timings from the JSON lines",
    )
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--db", help="also save the run to this database URL")
    p.set_defaults(handler=run_sweep)

    p = sub.add_parser(
        "compute", parents=[common], help="evaluate a state file"
    )
    p.add_argument("file", help="JSON state file")
    p.add_argument("quantity", help=f"one of {', '.join(COMPUTE_QUANTITIES)}")
    p.add_argument("--out", help="write the result as JSON to this path")
    p.set_defaults(handler=run_compute)

    p = sub.add_parser(
        "monotone",
        parents=[common],
        help="check that local channels never increase I_n",
    )
    _add_ensemble_arguments(p)
    p.add_argument("--kraus", type=int, default=2, help="Kraus rank")
    p.set_defaults(handler=run_monotone)

    p = sub.add_parser("runs", parents=[common], help="list stored sweeps")
    p.add_argument("--db", default=DEFAULT_URL, help="database URL")
    p.add_argument("--show", type=int, help="print the summary of a run")
    p.set_defaults(handler=run_runs)

    return parser


def settings_from_args(args: argparse.Namespace) -> Settings:
    overrides: dict[str, float] = {}
    if args.base == "e":
        overrides["base"] = math.e
    if args.cap is not None:
        if args.cap < 1:
            raise ConfigError(f"invalid dimension cap {args.cap}")
        overrides["dim_cap"] = args.cap
    for flag, name in [
        ("tol_support", "support"),
        ("tol_contain", "containment"),
        ("gap_threshold", "gap"),
    ]:
        value = getattr(args, flag)
        if value is not None:
            if not value > 0:
                raise ConfigError(f"--{flag.replace('_', '-')} must be > 0")
            overrides[name] = value
    return DEFAULT_SETTINGS.with_overrides(**overrides)


def run_demo(args: argparse.Namespace, settings: Settings) -> int:
    record = demo(args.name, settings=settings)
    print(format_report(record, settings))
    if args.out:
        _write_json(args.out, record.to_json())
    return EXIT_OK


def run_sweep(args: argparse.Namespace, settings: Settings) -> int:
    cfg = sweep_config_from_args(args, settings)
    result = sweep(cfg, workers=args.workers)
    include_timings = not args.no_timings
    if args.out:
        try:
            write_jsonl(
                result.records,
                result.summary,
                args.out,
                include_timings=include_timings,
            )
        except OSError as exc:
            raise OutputFileError(args.out, _reason(exc)) from exc
    print(format_summary(result.summary))
    if args.db:
        with ReportStore(args.db) as store:
            run_id = store.save_sweep(cfg, result.records, result.summary)
        print(f"saved as run {run_id}")
    return EXIT_OK


def run_compute(args: argparse.Namespace, settings: Settings) -> int:
    s = read_state(args.file, settings=settings)
    try:
        result = compute_quantity(s, args.quantity, settings=settings)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(result, GapReport):
        record = ReportRecord(args.file, result)
        print(format_report(record, settings))
        doc = record.to_json()
    else:
        print(format_value(result, settings.unit))
        doc = {
            "quantity": args.quantity,
            "value": result.to_json(),
            "infinite": result.is_infinite,
            "base": "e" if settings.base == math.e else settings.base,
        }
    if args.out:
        _write_json(args.out, doc)
    return EXIT_OK


def run_monotone(args: argparse.Namespace, settings: Settings) -> int:
    cfg = sweep_config_from_args(args, settings)
    result = monotonicity_survey(cfg, n_kraus=args.kraus)
    print(
        f"{len(result.records)} samples, {result.violations} increases "
        f"of I_n, largest change {result.max_increase:+.3e} "
        f"{settings.unit}"
    )
    return EXIT_OK


def run_runs(args: argparse.Namespace, settings: Settings) -> int:
    with ReportStore(args.db) as store:
        if args.show is not None:
            stored = store.load_sweep(args.show)
            print(json.dumps(stored.summary, indent=1, sort_keys=True))
            return EXIT_OK
        for run in store.list_runs():
            print(
                f"{run.id:>5}  {run.created:%Y-%m-%d %H:%M}  "
                f"{run.ensemble:<10} dims {list(run.dims)}  "
                f"samples {run.samples}  seed {run.seed}"
            )
    return EXIT_OK


def sweep_config_from_args(
    args: argparse.Namespace, settings: Settings
) -> SweepConfig:
    return SweepConfig(
        n_parties=args.parties,
        local_dims=parse_dims(args.dims, args.parties),
        ensemble=args.ensemble,
        samples=args.samples,
        seed=args.seed,
        settings=settings,
    )


def parse_dims(text: str, n_parties: int) -> tuple[int, ...]:
    """Parse "2,3,2", or a single dimension shared by all parties."""
    try:
        dims = tuple(int(d) for d in text.split(","))
    except ValueError:
        raise ConfigError(f"invalid dims '{text}'") from None
    if len(dims) == 1:
        dims *= n_parties
    return dims


def format_summary(summary: SweepSummary) -> str:
    lines = [
        f"samples:                  {summary.samples}",
        f"J̃ - I beyond {summary.gap_threshold:g}: "
        f"{summary.jtilde_flagged} ({summary.jtilde_flagged_fraction:.1%})",
        f"inconclusive:             {summary.jtilde_inconclusive}",
    ]
    if summary.jtilde_gap_mean is not None:
        lines.append(
            f"finite J̃ - I gaps:        min {summary.jtilde_gap_min:.6f} "
            f"max {summary.jtilde_gap_max:.6f} "
            f"mean {summary.jtilde_gap_mean:.6f}"
        )
    lines += [
        f"J support violations:     {summary.j_support_violations}",
        f"J̃ support violations:     {summary.jtilde_support_violations}",
        f"borderline supports:      {summary.borderline_records}",
        f"relent/I disagreements:   {summary.triple_disagreements}",
    ]
    if summary.records_with_errors:
        lines.append(
            f"records with errors:      {summary.records_with_errors}"
        )
    return "\n".join(lines)


def _add_ensemble_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--parties", type=int, default=3)
    p.add_argument(
        "--dims",
        default="2",
        help="local dimensions, comma-separated or one for all parties",
    )
    p.add_argument(
        "--ensemble",
        default="full-rank",
        help="pure, full-rank, or rank-R (default: full-rank)",
    )
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)


def _configure_logging(verbosity: int) -> None:
    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    logging.basicConfig(
        level=levels[min(verbosity, len(levels) - 1)],
        format="%(levelname)s:%(name)s:%(message)s",
    )


def _error(exc: Exception) -> None:
    logger.debug("command failed", exc_info=exc)
    print(f"dtc-lab: error: {exc}", file=sys.stderr)



def _write_json(path: str, doc: object) -> None:
    try:
        with open(path, "w") as f:
            json.dump(doc, f, indent=1, sort_keys=True)
            f.write("\n")
    except OSError as exc:
        raise OutputFileError(path, _reason(exc)) from exc


def _reason(exc: OSError) -> str:
    return exc.strerror or str(exc)
