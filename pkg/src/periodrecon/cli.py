"""Command-line entry point: ``periodrecon <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics, pipeline
from .errors import ReconstructionError
from .sampler import NoiseModel, PointCloud, sample_cloud
from .signal_model import PeriodicSignal


def _write(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_synth(args) -> int:
    spec = {"type": args.signal, "period": args.period}
    if args.signal == "sine":
        spec["amplitude"] = args.amplitude
    signal = pipeline.signal_from_spec(spec)
    if args.table:
        signal = PeriodicSignal(signal.period, samples=signal.tabulate(args.table))
    _write(json.dumps(signal.to_dict()) + "\n", args.out)
    return 0


def cmd_sample(args) -> int:
    signal = PeriodicSignal.load(args.signal)
    tau = args.tau if args.tau is not None else 0.39 * signal.period
    cloud = sample_cloud(signal, tau, args.d, args.n, NoiseModel(args.sigma, args.profile),
                         args.delta, args.seed)
    _write(cloud.to_csv(), args.out)
    return 0


def cmd_reconstruct(args) -> int:
    cloud = PointCloud.from_csv(args.cloud, tau=args.tau)
    opts = pipeline.ReconstructOptions(grid=args.grid)
    try:
        result = pipeline.reconstruct(cloud, args.radius, opts)
    except ReconstructionError as exc:
        print(f"reconstruction failed in stage {exc.stage}: {exc}", file=sys.stderr)
        return 2
    _write(json.dumps(result.to_dict()) + "\n", args.out)
    return 0


def cmd_evaluate(args) -> int:
    doc = json.loads(Path(args.result).read_text())
    estimate = PeriodicSignal.from_dict(doc["signal"])
    reference = PeriodicSignal.load(args.reference)
    t_true = args.period or reference.period
    report = metrics.evaluate(reference, estimate, t_true, doc["period_estimate"],
                              shift_grid=args.shift_grid, metadata=doc.get("metadata", {}))
    if args.csv:
        metrics.append_rows(args.csv, [report])
    _write(json.dumps(report.row(), default=str) + "\n", args.out)
    return 0


def cmd_experiment(args) -> int:
    doc = json.loads(Path(args.config).read_text()) if args.config else {}
    overrides = {"tau_ratio": args.tau, "d_values": args.d, "n_values": args.n,
                 "sigma": args.sigma, "quantization": args.delta, "radius": args.radius,
                 "master_seed": args.seed, "trials": args.trials, "workers": args.workers}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.out:
        doc["results_path"] = args.out
        doc.setdefault("summary_path", str(Path(args.out).with_suffix(".summary.csv")))
    config = pipeline.ExperimentConfig.from_dict(doc)
    results = pipeline.run_experiment(config)
    if not config.results_path:
        sys.stdout.write(results.results_csv())
    failures = sum(1 for r in results.rows if r["failure_stage"])
    print(f"{len(results.rows)} trials, {failures} failed", file=sys.stderr)
    return 0


def cmd_plot_data(args) -> int:
    rows = pipeline.read_results(args.results)
    _write(pipeline.box_columns_csv(rows, args.metric), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="periodrecon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a signal description (JSON)")
    p.add_argument("--signal", choices=["chirp-like", "sine"], default="chirp-like")
    p.add_argument("--period", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--table", type=int, default=0, help="re-tabulate at this many samples")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("sample", help="signal JSON -> cloud CSV")
    p.add_argument("signal", help="signal JSON file")
    p.add_argument("--tau", type=float, help="sampling period in seconds (default 0.39 T)")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--sigma", type=float, default=0.0, help="total noise standard deviation")
    p.add_argument("--profile", choices=["gaussian-isotropic", "uniform-ball"],
                   default="gaussian-isotropic")
    p.add_argument("--delta", type=float, default=0.0, help="quantization step")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("reconstruct", help="cloud CSV -> result JSON")
    p.add_argument("cloud")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--tau", type=float, help="override the cloud header's tau")
    p.add_argument("--grid", type=int, default=4096, help="density inversion grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="result JSON + reference signal -> error report")
    p.add_argument("result")
    p.add_argument("--reference", required=True)
    p.add_argument("--period", type=float, help="true period (default: reference period)")
    p.add_argument("--shift-grid", type=int, default=metrics.SHIFT_GRID)
    p.add_argument("--csv", help="append the report as a row to this CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="config JSON -> results CSV + summary CSV")
    p.add_argument("--config")
    p.add_argument("--tau", type=float, help="tau / T ratio")
    p.add_argument("--d", type=int, nargs="+")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--radius", type=float, help="value for the config's radius rule")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="results CSV; the summary goes next to it")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot-data", help="results CSV -> per-cell box-plot columns")
    p.add_argument("results")
    p.add_argument("--metric", choices=list(pipeline.METRICS), default="eps_2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot_data)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
