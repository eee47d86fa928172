"""Command-line interface.

Subcommands: mmd, scan, batch, extract, simulate (ratio-drift | mixture),
calibrate, correlate. Exit codes: 0 success, 1 usage error, 2 data or
validation error. Diagnostics go to stderr; data goes to files named by
flags or to stdout. Every output embeds the fully resolved configuration,
defaults and seed included, so runs can be reproduced from their outputs
alone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .embeddings import DataError, DatasetPair, load_embeddings, save_embeddings
from .kernels import KernelSpec
from .mmd import mmd
from .prep import BatchConfig, batch_means
from .rng import derive_seed
from .scan import ScanConfig, drift_scan, extract_cause_samples, load_report, report_to_dict, windows_to_csv
from .simharness import axis_mixture_spec, correlation_study, generate_mixture, null_calibration, ratio_drift_study

_SPLIT_NAMES = {"paired": "paired_halves", "literal": "literal_quarter"}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for data errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _bandwidth_arg(text: str):
    if text in ("median", "median-window"):
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected 'median', 'median-window', or a positive number, got {text!r}"
        ) from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"fixed bandwidth must be positive and finite, got {text!r}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def _add_io_flags(p, out_default_stdout=False):
    p.add_argument("--ref", required=True, metavar="PATH", help="reference embeddings file")
    p.add_argument("--target", required=True, metavar="PATH", help="target embeddings file")
    p.add_argument("--format", choices=("auto", "csv", "binary"), default="auto",
                   help="input file format (default: auto-sniff)")


def _add_kernel_flags(p):
    p.add_argument("--kernel", choices=("rbf", "linear"), default="rbf")
    p.add_argument("--bandwidth", type=_bandwidth_arg, default="median", metavar="POLICY",
                   help="median | median-window | positive number (default: median)")
    p.add_argument("--estimator", choices=("biased", "unbiased"), default="biased")


def _add_scan_flags(p, bootstraps_default=50):
    p.add_argument("--window", type=int, default=32, help="samples per compared window (default: 32)")
    p.add_argument("--bootstraps", type=int, default=bootstraps_default,
                   help=f"bootstrap iterations per window (default: {bootstraps_default})")
    p.add_argument("--stride", type=int, default=1, help="window step (default: 1)")
    p.add_argument("--split", choices=("paired", "literal"), default="paired",
                   help="bootstrap split policy (default: paired)")
    p.add_argument("--alpha", type=float, default=0.05, help="flagging threshold (default: 0.05)")
    _add_kernel_flags(p)


def _add_run_flags(p):
    p.add_argument("--seed", type=int, default=0, help="base RNG seed (default: 0)")
    p.add_argument("--threads", type=int, default=0,
                   help="internal parallelism cap, 0 = auto; never affects results (default: 0)")


def _kernel_spec(args) -> KernelSpec:
    return KernelSpec(family=args.kernel, bandwidth=args.bandwidth)


def _scan_config(args) -> ScanConfig:
    return ScanConfig(
        window=args.window,
        bootstraps=args.bootstraps,
        stride=args.stride,
        estimator=args.estimator,
        kernel=_kernel_spec(args),
        split_policy=_SPLIT_NAMES[args.split],
        seed=args.seed,
        alpha=args.alpha,
    )


def _emit_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        _write_text(out_path, text)
    else:
        sys.stdout.write(text)


def _write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _table_csv(config: dict, header: list[str], rows: list[list]) -> str:
    lines = [f"# config: {json.dumps(config)}", ",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_safe(value: float):
    # undefined statistics serialize as null rather than the non-JSON NaN literal
    return None if isinstance(value, float) and math.isnan(value) else value


def cmd_mmd(args) -> int:
    ref = load_embeddings(args.ref, args.format)
    target = load_embeddings(args.target, args.format)
    pair = DatasetPair(ref, target)
    est = mmd(_kernel_spec(args), pair.reference, pair.target, args.estimator)
    _emit_json(
        {
            "config": {
                "command": "mmd",
                "ref": args.ref,
                "target": args.target,
                "format": args.format,
                "kernel": {"family": args.kernel, "bandwidth": args.bandwidth},
                "estimator": args.estimator,
            },
            "squared": est.squared,
            "value": est.value,
            "bandwidth_used": est.bandwidth_used,
        },
        args.out,
    )
    return 0


def cmd_scan(args) -> int:
    ref = load_embeddings(args.ref, args.format)
    target = load_embeddings(args.target, args.format)
    if args.batch_size is not None:
        ref = batch_means(ref, BatchConfig(args.batch_size, shuffle=True,
                                           seed=derive_seed(args.seed, "batch-ref")))
        target = batch_means(target, BatchConfig(args.batch_size, shuffle=True,
                                                 seed=derive_seed(args.seed, "batch-target")))
    report = drift_scan(DatasetPair(ref, target), _scan_config(args))
    payload = report_to_dict(report)
    payload["config"]["cli"] = {
        "command": "scan",
        "ref": args.ref,
        "target": args.target,
        "format": args.format,
        "batch_size": args.batch_size,
    }
    _emit_json(payload, args.out)
    if args.csv_out:
        _write_text(args.csv_out, windows_to_csv(report))
    return 0


def cmd_batch(args) -> int:
    matrix = load_embeddings(args.input, args.format)
    config = BatchConfig(
        batch_size=args.batch_size,
        shuffle=not args.no_shuffle,
        seed=args.seed,
        tail_policy="keep_partial" if args.tail == "keep" else "drop",
    )
    reduced = batch_means(matrix, config)
    save_embeddings(reduced, args.out, args.out_format)
    _emit_json(
        {
            "config": {
                "command": "batch",
                "input": args.input,
                "format": args.format,
                "batch_size": config.batch_size,
                "shuffle": config.shuffle,
                "seed": config.seed,
                "tail_policy": config.tail_policy,
                "out": args.out,
                "out_format": args.out_format,
            },
            "input_rows": matrix.rows,
            "output_rows": reduced.rows,
            "dims": reduced.dims,
        },
        None,
    )
    return 0


def cmd_extract(args) -> int:
    ref = load_embeddings(args.ref, args.format)
    target = load_embeddings(args.target, args.format)
    report = load_report(args.report)
    pair = DatasetPair(ref, target)
    if args.which == "both":
        if not (args.out_ref and args.out_target):
            raise DataError("--which both needs --out-ref and --out-target")
        cause_ref, cause_target = extract_cause_samples(pair, report, "both")
        save_embeddings(cause_ref, args.out_ref, args.out_format)
        save_embeddings(cause_target, args.out_target, args.out_format)
    else:
        if not args.out:
            raise DataError(f"--which {args.which} needs --out")
        save_embeddings(extract_cause_samples(pair, report, args.which), args.out, args.out_format)
    _emit_json(
        {
            "config": {
                "command": "extract",
                "ref": args.ref,
                "target": args.target,
                "report": args.report,
                "which": args.which,
                "out": args.out,
                "out_ref": args.out_ref,
                "out_target": args.out_target,
                "out_format": args.out_format,
            },
            "cause_reference": list(report.cause_reference),
            "cause_target": list(report.cause_target),
            "rows": report.cause_target[1] - report.cause_target[0] + 1,
        },
        None,
    )
    return 0


def cmd_simulate_ratio(args) -> int:
    base = axis_mixture_spec(args.dims, args.n, 0.5, args.seed,
                             scale=args.scale, separation=args.separation)
    rows = ratio_drift_study(base, args.fractions, _scan_config(args), batch_size=args.batch_size)
    config = {
        "command": "simulate ratio-drift",
        "n": args.n,
        "dims": args.dims,
        "fractions": args.fractions,
        "scale": args.scale,
        "separation": args.separation,
        "batch_size": args.batch_size,
        "scan": _scan_config(args).to_dict(),
    }
    text = _table_csv(config, ["fraction", "summary_score"], [list(r) for r in rows])
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate_mixture(args) -> int:
    spec = axis_mixture_spec(args.dims, args.n, args.fraction, args.seed,
                             scale=args.scale, separation=args.separation)
    save_embeddings(generate_mixture(spec), args.out, args.out_format)
    _emit_json(
        {
            "config": {
                "command": "simulate mixture",
                "n": args.n,
                "dims": args.dims,
                "fraction": args.fraction,
                "scale": args.scale,
                "separation": args.separation,
                "seed": args.seed,
                "out": args.out,
                "out_format": args.out_format,
            }
        },
        None,
    )
    return 0


def cmd_calibrate(args) -> int:
    result = null_calibration(
        trials=args.trials,
        n=args.n,
        dims=args.dims,
        window=args.window,
        bootstraps=args.bootstraps,
        alpha=args.alpha,
        seed=args.seed,
        kernel=_kernel_spec(args),
        estimator=args.estimator,
        split_policy=_SPLIT_NAMES[args.split],
    )
    _emit_json(
        {
            "config": {
                "command": "calibrate",
                "trials": args.trials,
                "n": args.n,
                "dims": args.dims,
                "window": args.window,
                "bootstraps": args.bootstraps,
                "alpha": args.alpha,
                "seed": args.seed,
                "kernel": {"family": args.kernel, "bandwidth": args.bandwidth},
                "estimator": args.estimator,
                "split": args.split,
                    },
            "trials": result.trials,
            "rejections": result.rejections,
            "rate": result.rate,
        },
        args.out,
    )
    return 0


def cmd_correlate(args) -> int:
    profile = args.profile
    series, corr_bce, corr_auc = correlation_study(
        buckets=len(profile),
        drift_profile=profile,
        scan=_scan_config(args),
        seed=args.seed,
        dims=args.dims,
        n=args.n,
        batch_size=args.batch_size,
        scale=args.scale,
        separation=args.separation,
    )
    config = {
        "command": "correlate",
        "profile": profile,
        "n": args.n,
        "dims": args.dims,
        "batch_size": args.batch_size,
        "scale": args.scale,
        "separation": args.separation,
        "scan": _scan_config(args).to_dict(),
    }
    if args.out:
        rows = [[m.bucket_id, m.drift, m.bce, m.auc] for m in series]
        _write_text(args.out, _table_csv(config, ["bucket_id", "drift", "bce", "auc"], rows))
    _emit_json(
        {
            "config": config,
            "pearson_drift_bce": _json_safe(corr_bce),
            "pearson_drift_auc": _json_safe(corr_auc),
        },
        None,
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="driftscan", description="Embedding drift detection via sliding-window MMD")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("mmd", help="MMD between two embedding files")
    _add_io_flags(p)
    _add_kernel_flags(p)
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_mmd)

    p = sub.add_parser("scan", help="sliding-window drift scan")
    _add_io_flags(p)
    _add_scan_flags(p)
    _add_run_flags(p)
    p.add_argument("--batch-size", type=int, default=None, metavar="N",
                   help="reduce inputs to means of N-sample batches before scanning")
    p.add_argument("--out", metavar="PATH", help="report JSON destination (default: stdout)")
    p.add_argument("--csv-out", metavar="PATH", help="also write the window series as CSV")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("batch", help="batch-mean reduction of one embedding file")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--format", choices=("auto", "csv", "binary"), default="auto")
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-shuffle", action="store_true", help="keep input row order")
    p.add_argument("--tail", choices=("drop", "keep"), default="drop")
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--out-format", choices=("csv", "binary"), default="csv")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("extract", help="rows of the drift-cause window from a report")
    _add_io_flags(p)
    p.add_argument("--report", required=True, metavar="PATH", help="drift report JSON")
    p.add_argument("--which", choices=("reference", "target", "both"), default="target")
    p.add_argument("--out", metavar="PATH", help="output for a single side")
    p.add_argument("--out-ref", metavar="PATH", help="reference output for --which both")
    p.add_argument("--out-target", metavar="PATH", help="target output for --which both")
    p.add_argument("--out-format", choices=("csv", "binary"), default="csv")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("simulate", help="synthetic-data studies and generators")
    sim = p.add_subparsers(dest="study", required=True, metavar="STUDY")

    q = sim.add_parser("ratio-drift", help="drift score vs target class-ratio table")
    q.add_argument("--n", type=int, default=5000, help="samples per side (default: 5000)")
    q.add_argument("--dims", type=int, default=16)
    q.add_argument("--fractions", type=_float_list, default=[0.1, 0.3, 0.5, 0.7, 0.9],
                   metavar="F1,F2,...", help="target positive-class fractions")
    q.add_argument("--scale", type=float, default=1.0)
    q.add_argument("--separation", type=float, default=4.0,
                   help="class-mean separation in units of scale (default: 4)")
    q.add_argument("--batch-size", type=int, default=64)
    _add_scan_flags(q)
    _add_run_flags(q)
    q.add_argument("--out", metavar="PATH", help="table CSV destination (default: stdout)")
    q.set_defaults(func=cmd_simulate_ratio)

    q = sim.add_parser("mixture", help="write a synthetic two-class embedding file")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--dims", type=int, required=True)
    q.add_argument("--fraction", type=float, default=0.5, help="positive-class fraction")
    q.add_argument("--scale", type=float, default=1.0)
    q.add_argument("--separation", type=float, default=4.0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True, metavar="PATH")
    q.add_argument("--out-format", choices=("csv", "binary"), default="csv")
    q.set_defaults(func=cmd_simulate_mixture)

    p = sub.add_parser("calibrate", help="false-positive rate of the test under no drift")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--n", type=int, default=512, help="rows per side per trial (default: 512)")
    p.add_argument("--dims", type=int, default=8)
    p.add_argument("--window", type=int, default=32)
    p.add_argument("--bootstraps", type=int, default=199)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--split", choices=("paired", "literal"), default="paired")
    _add_kernel_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("correlate", help="drift vs scorer-performance correlation study")
    p.add_argument("--profile", type=_float_list, required=True, metavar="D1,D2,...",
                   help="per-bucket drift magnitudes")
    p.add_argument("--n", type=int, default=4096, help="samples per bucket (default: 4096)")
    p.add_argument("--dims", type=int, default=16)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--batch-size", type=int, default=64)
    _add_scan_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", metavar="PATH", help="per-bucket CSV destination")
    p.set_defaults(func=cmd_correlate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
