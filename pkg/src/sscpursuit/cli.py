"""Command-line entry point.

Subcommands ``phase``, ``dd-sweep``, ``di-sweep``, and ``noiseless`` run the
synthetic sweeps and write ``grid.csv`` plus ``summary.json`` into the
output directory; ``cluster`` runs the pipeline on an external CSV dataset.
Exit codes: 0 success, 2 configuration error, 3 some sweep cells failed.
"""

import argparse
import json
import sys
from pathlib import Path

from .datamodel import save_labels_csv
from .exceptions import ParseError
from .experiments import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    ConfigError,
    cluster_external,
    make_config,
    run_experiment,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _add_common(sub):
    sub.add_argument("--config", type=Path, default=None, help="JSON config file")
    sub.add_argument("--seed", type=int, default=None, help="base random seed")
    sub.add_argument("--out", type=Path, default=None, help="output directory")


def _add_sweep_args(sub):
    _add_common(sub)
    sub.add_argument("--trials", type=int, default=None, help="Monte Carlo trials per cell")
    sub.add_argument("--threads", type=int, default=1, help="worker threads")
    sub.add_argument(
        "--dump-raw", action="store_true", help="persist raw supports per (cell, trial)"
    )


def build_parser():
    parser = argparse.ArgumentParser(prog="sscpursuit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, blurb in [
        ("phase", "clustering-error phase diagram over (t, rho, sigma)"),
        ("dd-sweep", "TP/FP tradeoff of residual-threshold stopping"),
        ("di-sweep", "sensitivity to the iteration budget / target sparsity"),
        ("noiseless", "iteration-budget sweep on noiseless data"),
    ]:
        s = sub.add_parser(name, help=blurb)
        _add_sweep_args(s)

    c = sub.add_parser("cluster", help="cluster an external CSV dataset")
    c.add_argument("data", type=Path, help="CSV file, one data point per row")
    c.add_argument("--labels", type=Path, default=None, help="ground-truth labels, one per row")
    c.add_argument("--method", choices=["omp", "mp"], default=None)
    c.add_argument("--clusters", type=int, default=None, help="number of clusters (else eigengap)")
    _add_common(c)
    return parser


def _load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg


def _run_sweep_command(args):
    overrides = _load_config_file(args.config)
    trials = args.trials if args.trials is not None else overrides.pop("trials", DEFAULT_TRIALS)
    seed = args.seed if args.seed is not None else overrides.pop("seed", DEFAULT_SEED)
    overrides.pop("trials", None)
    overrides.pop("seed", None)
    config = make_config(args.command, overrides)
    out_dir = args.out if args.out is not None else Path("runs") / args.command
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    sweep = run_experiment(
        args.command,
        config,
        trials=trials,
        seed=seed,
        threads=max(1, args.threads),
        out_dir=out_dir,
        dump_raw=args.dump_raw,
    )
    n_failed = len(sweep.failed_cells)
    print(f"{args.command}: {len(sweep.cells)} cells, {trials} trials, "
          f"{n_failed} failed, outputs in {out_dir}")
    return EXIT_PARTIAL if n_failed else EXIT_OK


def _run_cluster_command(args):
    overrides = _load_config_file(args.config)
    seed = args.seed if args.seed is not None else overrides.pop("seed", DEFAULT_SEED)
    overrides.pop("seed", None)
    config = make_config("cluster", overrides)
    if args.method is not None:
        config["method"] = args.method
    if args.clusters is not None:
        config["n_clusters"] = args.clusters
    labels, report = cluster_external(args.data, args.labels, config, seed=seed)
    out_dir = args.out if args.out is not None else Path("runs") / "cluster"
    out_dir.mkdir(parents=True, exist_ok=True)
    save_labels_csv(labels, out_dir / "labels.csv")
    report["config"] = config
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    shown = {k: report[k] for k in ("n_points", "n_clusters", "ce", "nfc")}
    print(f"cluster: {shown}, outputs in {out_dir}")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "cluster":
            return _run_cluster_command(args)
        return _run_sweep_command(args)
    except (ConfigError, ParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
