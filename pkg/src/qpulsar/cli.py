"""Command-line experiment driver.

Subcommands wire the data pipeline into the two quantum pipelines and their
classical baseline, writing JSON and CSV reports. Exit codes: 0 success,
1 runtime failure, 2 usage or input-parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .data import DataFormatError, load_htru2, normalize_to_angle, split_70_30
from .experiments import (
    PIPELINES,
    ExperimentSettings,
    loglog_slope,
    noise_sweep,
    run_experiment,
    wall_benchmark,
)
from .metrics import METRIC_NAMES, aggregate_runs
from .runtime import T_CE_QCNN, T_CE_QSVM, QcnnTrain, QsvmTrain, extrapolate_device_time

DEFAULT_SEEDS = "0,1,2,3,4,5"
SPLIT_SEED = 1234


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}")


def _load_pools(path: str, seed: int = SPLIT_SEED):
    dataset = normalize_to_angle(load_htru2(path))
    return split_70_30(dataset, seed)


def _out_dir(args, command: str) -> str:
    base = args.out
    if args.stable_output:
        path = os.path.join(base, command)
    else:
        path = os.path.join(base, f"{command}-{time.strftime('%Y%m%dT%H%M%S')}")
    os.makedirs(path, exist_ok=True)
    return path


def _config_echo(args, command: str) -> dict:
    echo = {"command": command, "code_version": __version__}
    for key, value in sorted(vars(args).items()):
        if key in ("func",):
            continue
        echo[key] = value
    return echo


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def cmd_validate_data(args) -> int:
    dataset = load_htru2(args.data)
    lo = dataset.features.min(axis=0)
    hi = dataset.features.max(axis=0)
    print(f"rows: {len(dataset)}")
    print(f"positive: {dataset.n_positive}")
    print(f"negative: {dataset.n_negative}")
    for i in range(dataset.features.shape[1]):
        print(f"feature {i}: min {lo[i]:.6g} max {hi[i]:.6g}")
    return 0


def cmd_run(args) -> int:
    pools = _load_pools(args.data)
    settings = ExperimentSettings(
        n_train=args.n_train,
        n_test=args.n_test,
        epochs=args.epochs,
        learning_rate=args.lr,
        batch_size=10 if args.batch == "balanced10" else None,
        C=args.c,
        noise_p=args.noise_p,
        kernel_cache=args.kernel_cache,
    )
    out = _out_dir(args, f"run-{args.pipeline}")
    per_seed_rows = []
    reports = []
    results = []
    for seed in args.seeds:
        result = run_experiment(args.pipeline, pools, seed, settings)
        results.append(result)
        reports.append(result.report)
        row = {
            "seed": seed,
            "tp": result.confusion.tp,
            "tn": result.confusion.tn,
            "fp": result.confusion.fp,
            "fn": result.confusion.fn,
            "n_ce_train": result.n_ce_train,
            "n_ce_predict": result.n_ce_predict,
        }
        row.update({name: result.report.as_dict()[name] for name in METRIC_NAMES})
        if not args.stable_output:
            row["train_seconds"] = result.train_seconds
            row["predict_seconds"] = result.predict_seconds
        per_seed_rows.append(row)
    aggregate = aggregate_runs(reports, spread="se")
    payload = {
        "config": _config_echo(args, "run"),
        "seeds": args.seeds,
        "per_seed": per_seed_rows,
        "aggregate": {
            name: {"mean": stats.mean, "se": stats.spread, "n": stats.n}
            for name, stats in aggregate.items()
        },
    }
    if not args.stable_output:
        payload["timing"] = {
            "train_seconds": [r.train_seconds for r in results],
            "predict_seconds": [r.predict_seconds for r in results],
        }
    _write_json(os.path.join(out, "report.json"), payload)
    _write_csv(os.path.join(out, "per_seed.csv"), per_seed_rows)
    _write_csv(
        os.path.join(out, "aggregate.csv"),
        [
            {"metric": name, "mean": stats.mean, "se": stats.spread, "n": stats.n}
            for name, stats in aggregate.items()
        ],
    )
    for name, stats in aggregate.items():
        mean = "undefined" if stats.mean is None else f"{stats.mean:.3f}"
        print(f"{args.pipeline} {name}: {mean} +/- {stats.spread:.3f} (n={stats.n})")
    print(f"reports written to {out}")
    return 0


def cmd_noise_sweep(args) -> int:
    pools = _load_pools(args.data)
    for p in args.noise_levels:
        if not 0.0 <= p <= 1.0:
            raise UsageError(f"noise probability {p} outside [0, 1]")
    rows = noise_sweep(
        pools,
        args.noise_levels,
        n_train=args.n_train,
        n_test=args.n_test,
        runs=len(args.seeds),
        pipelines=tuple(args.pipelines),
        base_seed=args.seeds[0],
        trajectories=args.trajectories,
        qcnn_epochs=args.epochs,
    )
    out = _out_dir(args, "noise-sweep")
    _write_csv(os.path.join(out, "noise_sweep.csv"), rows)
    _write_json(os.path.join(out, "noise_sweep.json"), {"config": _config_echo(args, "noise-sweep"), "rows": rows})
    for row in rows:
        print(
            f"{row['pipeline']} p={row['p']}: balanced accuracy "
            f"{row['balanced_accuracy_mean']:.3f} +/- {row['balanced_accuracy_std']:.3f}"
        )
    print(f"reports written to {out}")
    return 0


def cmd_benchmark(args) -> int:
    pools = _load_pools(args.data)
    if not args.sizes:
        raise UsageError("size list must not be empty")
    out = _out_dir(args, "benchmark")
    all_rows = []
    crossover = None
    per_pipeline: dict[str, list[dict]] = {}
    for pipeline in args.pipelines:
        settings = ExperimentSettings(epochs=args.epochs, batch_size=10 if args.batch == "balanced10" else None)
        rows = wall_benchmark(
            pools,
            args.sizes,
            pipeline,
            n_test=args.n_test,
            repetitions=args.repetitions,
            base_seed=args.seeds[0],
            settings=settings,
        )
        for row in rows:
            t_ce = T_CE_QSVM if pipeline == "qsvm" else T_CE_QCNN
            if pipeline == "qsvm":
                kind = QsvmTrain(row["n_train"])
            else:
                kind = QcnnTrain(args.epochs, row["n_train"] if args.batch == "full" else 10)
            row["device_train_seconds"] = extrapolate_device_time(kind, t_ce).total_seconds
        per_pipeline[pipeline] = rows
        all_rows.extend(rows)
        sizes = [row["n_train"] for row in rows]
        print(f"{pipeline} log-log train-time slope: {loglog_slope(sizes, [r['train_seconds'] for r in rows]):.2f}")
    if "qsvm" in per_pipeline and any(p.startswith("qcnn") for p in per_pipeline):
        qcnn_key = next(p for p in args.pipelines if p.startswith("qcnn"))
        for qsvm_row, qcnn_row in zip(per_pipeline["qsvm"], per_pipeline[qcnn_key]):
            if qcnn_row["train_seconds"] < qsvm_row["train_seconds"]:
                crossover = qsvm_row["n_train"]
                break
        print(f"smallest size where {qcnn_key} trains faster than qsvm: {crossover}")
    _write_csv(os.path.join(out, "benchmark.csv"), all_rows)
    _write_json(
        os.path.join(out, "benchmark.json"),
        {"config": _config_echo(args, "benchmark"), "rows": all_rows, "crossover_n_train": crossover},
    )
    print(f"reports written to {out}")
    return 0


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpulsar", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qpulsar {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--data", required=True, help="path to the 9-column pulsar CSV")
        p.add_argument("--out", default="reports", help="output directory root")
        p.add_argument("--seeds", type=_parse_seeds, default=_parse_seeds(DEFAULT_SEEDS))
        p.add_argument("--stable-output", action="store_true",
                       help="deterministic file layout and no timing fields")

    p = sub.add_parser("validate-data", help="parse the data file and print summary counts")
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_validate_data)

    p = sub.add_parser("run", help="train and evaluate one pipeline over the seed list")
    add_common(p)
    p.add_argument("pipeline", choices=PIPELINES)
    p.add_argument("--n-train", type=int, default=200)
    p.add_argument("--n-test", type=int, default=400)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch", choices=("full", "balanced10"), default="full")
    p.add_argument("--noise-p", type=float, default=0.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--kernel-cache", default=None, help="directory for cached kernel CSVs")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("noise-sweep", help="balanced accuracy vs bit-flip probability")
    add_common(p)
    p.add_argument("--noise-levels", type=lambda s: [float(v) for v in s.split(",")],
                   default=[0.0, 0.01, 0.1, 0.5])
    p.add_argument("--pipelines", type=lambda s: s.split(","), default=["qsvm", "qcnn"])
    p.add_argument("--n-train", type=int, default=50)
    p.add_argument("--n-test", type=int, default=100)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--trajectories", type=int, default=64)
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("benchmark", help="wall-clock scaling plus device-time extrapolation")
    add_common(p)
    p.add_argument("--sizes", type=lambda s: [int(v) for v in s.split(",")], default=[25, 50, 100, 200])
    p.add_argument("--pipelines", type=lambda s: s.split(","), default=["qsvm", "qcnn"])
    p.add_argument("--n-test", type=int, default=400)
    p.add_argument("--epochs", type=int, default=150)
    p.add_argument("--batch", choices=("full", "balanced10"), default="full")
    p.add_argument("--repetitions", type=int, default=3)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
