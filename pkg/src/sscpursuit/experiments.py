"""Experiment harness: synthetic parameter sweeps and external clustering.

Every sweep walks an explicit grid of cells; each (cell, trial) pair draws
its random stream as ``(seed, cell_index, trial_index)``, so results are
independent of the execution schedule and reruns are byte-identical.
``grid.csv`` holds one row per cell, method, and metric (trial means);
``summary.json`` echoes the configuration and carries the wall-clock
timings, which are deliberately kept out of the deterministic CSV.
"""

import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .datamodel import (
    SyntheticConfig,
    generate_points,
    load_labels_csv,
    load_points_csv,
    normalize_columns,
    sample_arrangement_common_core,
    sample_arrangement_shared_intersection,
)
from .graph import build_adjacency, check_nfc, coefficient_matrix, estimate_num_clusters_eigengap
from .metrics import clustering_error, evaluate_run, l1_norms, point_tp_counts, tp_fp_counts
from .numerics import RngStream
from .pursuit import Method, PursuitConfig, StopReason, represent_all
from .spectral import SpectralConfig, normalized_spectral_clustering
from .theory import curve_fit_rho_of_aff, curve_fit_rho_of_sigma, dd_tp_lower_bound

EXPERIMENTS = ("phase", "dd-sweep", "di-sweep", "noiseless", "cluster")

DEFAULT_TRIALS = 10
DEFAULT_SEED = 0

DEFAULTS = {
    "phase": {
        "L": 3,
        "d": 20,
        "m": 200,
        "s_max": 10,
        "t_values": [0, 6, 12, 18],
        "rho_values": [4],
        "sigma_values": [0.25, 0.5, 0.75, 1.0],
        "methods": ["omp", "mp"],
        "curve_fit_aff": None,  # e.g. {"c1": 0.37, "c2": 1.0}
        "curve_fit_sigma": None,  # e.g. {"c3": 0.2, "c4": 0.5, "c5": 1.0, "c6": 0.7, "c7": 2.3}
    },
    "dd-sweep": {
        "m": 300,
        "dims": [20, 40, 60, 80],
        "t_core": 4,
        "rho": 4,
        "sigma_values": [0.2],
        "tau_values": [0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 1.0],
        "methods": ["omp", "mp"],
        "iter_cap": 1000,
        "c_s": 0.1,
    },
    "di-sweep": {
        "L": 3,
        "m": 80,
        "d": 15,
        "t": 3,
        "rho": 4,
        "sigma": 0.5,
        "u_values": list(range(1, 31)),
        "iter_cap": 2000,
    },
    "noiseless": {
        "L": 3,
        "m": 80,
        "d": 15,
        "pairs": [[5, 3], [10, 3], [10, 6]],
        "u_values": list(range(1, 31)),
        "iter_cap": 2000,
    },
    "cluster": {
        "method": "omp",
        "s_max": 5,
        "p_max": None,
        "tau": 0.0,
        "alpha": 1.0,
        "n_clusters": None,
        "max_clusters": None,
        "normalize": True,
        "iter_cap": None,
    },
}

DI_VARIANTS = ("omp_smax", "mp_smax", "mp_pmax")


class ConfigError(ValueError):
    """Bad or inconsistent experiment configuration."""


@dataclass
class SweepCell:
    coords: dict
    metrics: dict = field(default_factory=dict)  # (method, metric) -> mean
    trials: int = 0
    failures: list = field(default_factory=list)


@dataclass
class SweepResult:
    experiment: str
    config: dict
    axes: tuple
    methods: tuple
    cells: list
    trials: int
    seed: int
    wall_time_s: float = 0.0
    pursuit_seconds: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def failed_cells(self):
        return [c for c in self.cells if c.failures]


def make_config(experiment, overrides=None):
    """Merge user overrides into the experiment's default parameters."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {EXPERIMENTS}")
    cfg = json.loads(json.dumps(DEFAULTS[experiment]))  # deep copy
    overrides = dict(overrides or {})
    declared = overrides.pop("experiment", None)
    if declared is not None and declared != experiment:
        raise ConfigError(f"config file is for experiment {declared!r}, not {experiment!r}")
    for key, value in overrides.items():
        if key not in cfg:
            raise ConfigError(f"unknown config key {key!r} for experiment {experiment!r}")
        cfg[key] = value
    return cfg


def _counts_for(rho, dims):
    # sampling density rho = n / d per subspace
    return tuple(int(round(rho * d)) for d in dims)


def _pipeline_outcome(dataset, results, n_clusters, spectral_rng, dims):
    """Metrics plus the raw artifacts (labels, supports, coefficients) for
    one completed representation run."""
    B = coefficient_matrix(results)
    A = build_adjacency(B)
    labels = normalized_spectral_clustering(A, n_clusters, SpectralConfig(rng=spectral_rng))
    ce = clustering_error(labels, dataset.truth)
    nfc, _ = check_nfc(A, dataset.truth)
    supports = [r.support for r in results]
    rep = tp_fp_counts(supports, dataset.truth, dims, dataset.m)
    tp_l1, fp_l1 = l1_norms(B, dataset.truth)
    metrics = {
        "ce": ce,
        "ce_zero": 1.0 if ce == 0.0 else 0.0,
        "nfc": 1.0 if nfc else 0.0,
        "tp_l1": tp_l1,
        "fp_l1": fp_l1,
        "tpr_size_mean": float(rep.tpr_size.mean()),
        "fpr_size_mean": float(rep.fpr_size.mean()),
    }
    for l in range(len(dims)):
        metrics[f"tp_count_{l}"] = float(rep.tp_count[l])
        metrics[f"fp_count_{l}"] = float(rep.fp_count[l])
        metrics[f"tpr_dim_{l}"] = float(rep.tpr_dim[l])
        metrics[f"fpr_dim_{l}"] = float(rep.fpr_dim[l])
    raw = {"labels": labels, "supports": supports, "B": B}
    return metrics, raw


def _raw_payload(dataset, dims, per_method_raw):
    payload = {"truth": dataset.truth.tolist(), "dims": list(dims), "m": int(dataset.m)}
    methods = {}
    for name, raw in per_method_raw.items():
        ii, jj = np.nonzero(raw["B"])
        methods[name] = {
            "labels": np.asarray(raw["labels"]).tolist(),
            "supports": [np.asarray(s).tolist() for s in raw["supports"]],
            "b_entries": [
                [int(i), int(j), float(raw["B"][i, j])] for i, j in zip(ii, jj)
            ],
        }
    payload["methods"] = methods
    return payload


def _stop_tallies(results):
    n = len(results)
    out = {}
    for reason in StopReason:
        out[f"stop_{reason.value}"] = sum(1 for r in results if r.stop_reason is reason) / n
    return out


def _timed_represent_all(Y, cfg):
    t0 = time.perf_counter()
    results = represent_all(Y, cfg)
    elapsed = time.perf_counter() - t0
    failed = [r for r in results if r.failure]
    if failed:
        raise RuntimeError(f"pursuit failed for {len(failed)} points: {failed[0].failure}")
    return results, elapsed


def _run_sweep(experiment, config, cells, methods, run_trial, trials, seed, threads, dump_dir):
    """Generic sweep engine.

    ``run_trial(coords, rng) -> (dict[method -> dict[metric -> value]],
    pursuit_seconds, payload_fn)``; metrics are averaged over trials in
    trial order, and ``payload_fn()`` builds the raw dump only when
    dumping is enabled (one JSON file per task).
    """
    t_start = time.perf_counter()
    tasks = [(ci, ti) for ci in range(len(cells)) for ti in range(trials)]
    root = RngStream(seed)
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    def work(task):
        ci, ti = task
        try:
            metrics, pursuit_s, payload_fn = run_trial(cells[ci].coords, root.child(ci, ti))
            if dump_dir is not None:
                payload = {"coords": cells[ci].coords, "trial": ti, **payload_fn()}
                out = dump_dir / f"cell{ci:04d}_trial{ti:04d}.json"
                out.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
            return ci, ti, metrics, pursuit_s, None
        except Exception as exc:  # cell failure is recorded, sweep continues
            return ci, ti, None, 0.0, f"trial {ti}: {type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(work, tasks))
    else:
        raw = [work(t) for t in tasks]

    by_cell = {}
    pursuit_total = 0.0
    for ci, ti, metrics, pursuit_s, err in raw:
        pursuit_total += pursuit_s
        if err is not None:
            cells[ci].failures.append(err)
        else:
            by_cell.setdefault(ci, {})[ti] = metrics

    for ci, cell in enumerate(cells):
        per_trial = by_cell.get(ci, {})
        cell.trials = len(per_trial)
        ordered = [per_trial[ti] for ti in sorted(per_trial)]
        if not ordered:
            continue
        for method in methods:
            for name in sorted(ordered[0][method]):
                vals = [tr[method][name] for tr in ordered]
                cell.metrics[(method, name)] = float(np.mean(vals))

    return SweepResult(
        experiment=experiment,
        config=config,
        axes=tuple(cells[0].coords) if cells else (),
        methods=tuple(methods),
        cells=cells,
        trials=trials,
        seed=seed,
        wall_time_s=time.perf_counter() - t_start,
        pursuit_seconds=pursuit_total,
    )


# ---------------------------------------------------------------------------
# the individual experiments


def run_phase_diagram(
    config, trials=DEFAULT_TRIALS, seed=DEFAULT_SEED, threads=1, dump_dir=None
):
    """Clustering error over a (t, rho, sigma) grid with the equal-dimension
    shared-intersection arrangement, under DI-stopping."""
    L, d, m, s_max = config["L"], config["d"], config["m"], config["s_max"]
    methods = [Method(meth).value for meth in config["methods"]]
    cells = [
        SweepCell({"t": t, "aff": float(np.sqrt(t / d)), "rho": rho, "sigma": sigma})
        for t in config["t_values"]
        for rho in config["rho_values"]
        for sigma in config["sigma_values"]
    ]

    def run_trial(coords, rng):
        arr = sample_arrangement_shared_intersection(m, L, d, coords["t"], rng.child(0))
        counts = _counts_for(coords["rho"], arr.dims)
        ds = generate_points(arr, SyntheticConfig(m, counts, coords["sigma"], rng.child(1)))
        ds.Y, _ = normalize_columns(ds.Y)
        out, raws, pursuit_s = {}, {}, 0.0
        for i, meth in enumerate(methods):
            pcfg = PursuitConfig(method=meth, s_max=s_max)
            results, dt = _timed_represent_all(ds.Y, pcfg)
            pursuit_s += dt
            out[meth], raws[meth] = _pipeline_outcome(ds, results, L, rng.child(2, i), arr.dims)
        return out, pursuit_s, lambda: _raw_payload(ds, arr.dims, raws)

    sweep = _run_sweep("phase", config, cells, methods, run_trial, trials, seed, threads, dump_dir)
    sweep.extras.update(_phase_curve_overlays(config))
    return sweep


def _phase_curve_overlays(config):
    extras = {}
    fit_a = config.get("curve_fit_aff")
    if fit_a:
        d = config["d"]
        extras["curve_fit_aff"] = {
            str(t): curve_fit_rho_of_aff(fit_a["c1"], fit_a["c2"], float(np.sqrt(t / d)))
            for t in config["t_values"]
            if fit_a["c2"] > np.sqrt(t / d)
        }
    fit_s = config.get("curve_fit_sigma")
    if fit_s:
        extras["curve_fit_sigma"] = {
            str(s): curve_fit_rho_of_sigma(
                fit_s["c3"], fit_s["c4"], fit_s["c5"], fit_s["c6"], fit_s["c7"], s
            )
            for s in config["sigma_values"]
            if fit_s["c7"] > s * (fit_s["c3"] + fit_s["c4"] * s)
        }
    return extras


def run_dd_sweep(config, trials=DEFAULT_TRIALS, seed=DEFAULT_SEED, threads=1, dump_dir=None):
    """TP/FP behavior of DD-stopping over a threshold grid, on the
    common-core arrangement with unequal subspace dimensions."""
    m, dims, t_core, rho = config["m"], tuple(config["dims"]), config["t_core"], config["rho"]
    methods = [Method(meth).value for meth in config["methods"]]
    iter_cap = config.get("iter_cap")
    c_s = config.get("c_s", 0.1)
    counts = _counts_for(rho, dims)
    cells = [
        SweepCell({"sigma": sigma, "tau": tau})
        for sigma in config["sigma_values"]
        for tau in config["tau_values"]
    ]

    def run_trial(coords, rng):
        arr = sample_arrangement_common_core(m, dims, t_core, rng.child(0))
        ds = generate_points(arr, SyntheticConfig(m, counts, coords["sigma"], rng.child(1)))
        ds.Y, _ = normalize_columns(ds.Y)
        tau = coords["tau"]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            bounds = {
                d_l: dd_tp_lower_bound(d_l, n_l, m, coords["sigma"], tau, c_s)
                for d_l, n_l in zip(dims, counts)
            }
        out, raws, pursuit_s = {}, {}, 0.0
        for i, meth in enumerate(methods):
            pcfg = PursuitConfig(method=meth, tau=tau, iter_cap=iter_cap)
            results, dt = _timed_represent_all(ds.Y, pcfg)
            pursuit_s += dt
            metrics, raw = _pipeline_outcome(ds, results, len(dims), rng.child(2, i), dims)
            metrics.update(_stop_tallies(results))
            tp_per_point = point_tp_counts([r.support for r in results], ds.truth)
            point_bounds = np.array([bounds[dims[l]] for l in ds.truth])
            metrics["tp_floor_frac"] = float(np.mean(tp_per_point >= point_bounds))
            metrics["tp_floor_max"] = float(max(bounds.values()))
            out[meth], raws[meth] = metrics, raw
        return out, pursuit_s, lambda: _raw_payload(ds, dims, raws)

    return _run_sweep("dd-sweep", config, cells, methods, run_trial, trials, seed, threads, dump_dir)


def _di_pursuit_config(variant, u, n_points, iter_cap):
    if variant == "omp_smax":
        return PursuitConfig(method="omp", s_max=u)
    if variant == "mp_smax":
        return PursuitConfig(method="mp", s_max=u, p_max=n_points)
    if variant == "mp_pmax":
        return PursuitConfig(method="mp", p_max=u, iter_cap=iter_cap)
    raise ConfigError(f"unknown variant {variant!r}")


def _run_iteration_sweep(experiment, config, cells, trials, seed, threads, dump_dir, sigma_of, arr_of):
    """Shared engine for the DI-stopping sensitivity sweeps: per cell the
    three variants (OMP budget u, MP budget u, MP target sparsity u) run on
    the same data."""
    m = config["m"]
    iter_cap = config.get("iter_cap")

    def run_trial(coords, rng):
        arr = arr_of(coords, rng.child(0))
        counts = _counts_for(coords.get("rho", config.get("rho")), arr.dims)
        ds = generate_points(arr, SyntheticConfig(m, counts, sigma_of(coords), rng.child(1)))
        ds.Y, _ = normalize_columns(ds.Y)
        u = coords["u"]
        out, raws, pursuit_s = {}, {}, 0.0
        for i, variant in enumerate(DI_VARIANTS):
            pcfg = _di_pursuit_config(variant, u, ds.n_points, iter_cap)
            results, dt = _timed_represent_all(ds.Y, pcfg)
            pursuit_s += dt
            metrics, raw = _pipeline_outcome(ds, results, len(arr.dims), rng.child(2, i), arr.dims)
            metrics.update(_stop_tallies(results))
            out[variant], raws[variant] = metrics, raw
        return out, pursuit_s, lambda: _raw_payload(ds, arr.dims, raws)

    return _run_sweep(experiment, config, cells, DI_VARIANTS, run_trial, trials, seed, threads, dump_dir)


def run_di_sweep(config, trials=DEFAULT_TRIALS, seed=DEFAULT_SEED, threads=1, dump_dir=None):
    """Sensitivity of DI-stopping to the iteration budget / target sparsity."""
    L, d, t = config["L"], config["d"], config["t"]
    cells = [SweepCell({"u": int(u)}) for u in config["u_values"]]
    return _run_iteration_sweep(
        "di-sweep",
        config,
        cells,
        trials,
        seed,
        threads,
        dump_dir,
        sigma_of=lambda coords: config["sigma"],
        arr_of=lambda coords, rng: sample_arrangement_common_core(
            config["m"], (d,) * L, t, rng
        ),
    )


def run_noiseless_sweep(config, trials=DEFAULT_TRIALS, seed=DEFAULT_SEED, threads=1, dump_dir=None):
    """DI-stopping sensitivity for noiseless data over (t, rho) pairs."""
    L, d = config["L"], config["d"]
    cells = [
        SweepCell({"t": int(t), "rho": rho, "u": int(u)})
        for (t, rho) in config["pairs"]
        for u in config["u_values"]
    ]
    return _run_iteration_sweep(
        "noiseless",
        config,
        cells,
        trials,
        seed,
        threads,
        dump_dir,
        sigma_of=lambda coords: 0.0,
        arr_of=lambda coords, rng: sample_arrangement_shared_intersection(
            config["m"], L, d, coords["t"], rng
        ),
    )


def cluster_external(data_path, labels_path, config, seed=DEFAULT_SEED):
    """Cluster a CSV dataset (one point per row) through the full pipeline.

    Returns ``(labels, report)`` where the report carries the cluster-count
    decision and, when ground-truth labels were supplied, CE and NFC.
    """
    Y = load_points_csv(data_path)
    if Y.shape[1] < 2:
        raise ConfigError("need at least two data points")
    truth = None
    if labels_path is not None:
        truth = load_labels_csv(labels_path)
        if truth.size != Y.shape[1]:
            raise ConfigError(f"{truth.size} labels for {Y.shape[1]} points (dimension mismatch)")
    zero_cols = []
    if config["normalize"]:
        Y, zero_cols = normalize_columns(Y)
    pcfg = PursuitConfig(
        method=config["method"],
        s_max=config["s_max"],
        p_max=config["p_max"],
        tau=config["tau"],
        alpha=config["alpha"],
        iter_cap=config["iter_cap"],
    )
    t0 = time.perf_counter()
    results = represent_all(Y, pcfg)
    pursuit_s = time.perf_counter() - t0
    B = coefficient_matrix(results)
    A = build_adjacency(B)
    estimated = False
    n_clusters = config["n_clusters"]
    if n_clusters is None:
        n_clusters = estimate_num_clusters_eigengap(A, config["max_clusters"])
        estimated = True
    labels = normalized_spectral_clustering(A, int(n_clusters), SpectralConfig(rng=RngStream(seed)))
    report = {
        "n_points": int(Y.shape[1]),
        "ambient_dim": int(Y.shape[0]),
        "n_clusters": int(n_clusters),
        "n_clusters_estimated": estimated,
        "zero_columns": zero_cols,
        "pursuit_seconds": pursuit_s,
        "ce": None,
        "nfc": None,
    }
    if truth is not None:
        mr = evaluate_run(B, [r.support for r in results], labels, truth)
        _, violations = check_nfc(A, truth)
        report["ce"] = mr.ce
        report["nfc"] = mr.nfc
        report["nfc_violations"] = len(violations)
        report["tp_l1"] = mr.tp_l1
        report["fp_l1"] = mr.fp_l1
    return labels, report


# ---------------------------------------------------------------------------
# output files


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_grid_csv(sweep, path):
    """One row per cell, method, and metric; trial means in ``value``."""
    axes = list(sweep.axes)
    lines = ["method," + ",".join(axes) + ",metric,value,trials"]
    metric_names = sorted({name for c in sweep.cells for (_, name) in c.metrics})
    for cell in sweep.cells:
        coord_part = ",".join(_fmt(cell.coords[a]) for a in axes)
        if cell.failures:
            for method in sweep.methods:
                lines.append(f"{method},{coord_part},failed,nan,0")
            continue
        for method in sweep.methods:
            for name in metric_names:
                if (method, name) not in cell.metrics:
                    continue
                val = cell.metrics[(method, name)]
                lines.append(f"{method},{coord_part},{name},{_fmt(val)},{cell.trials}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_summary_json(sweep, path, extra=None):
    import scipy

    summary = {
        "experiment": sweep.experiment,
        "config": sweep.config,
        "trials": sweep.trials,
        "seed": sweep.seed,
        "cells": len(sweep.cells),
        "failed_cells": [
            {"coords": c.coords, "failures": c.failures} for c in sweep.failed_cells
        ],
        "wall_time_s": sweep.wall_time_s,
        "pursuit_seconds": sweep.pursuit_seconds,
        "versions": {
            "sscpursuit": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }
    summary.update(sweep.extras)
    if extra:
        summary.update(extra)
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


RUNNERS = {
    "phase": run_phase_diagram,
    "dd-sweep": run_dd_sweep,
    "di-sweep": run_di_sweep,
    "noiseless": run_noiseless_sweep,
}


def run_experiment(experiment, config, trials, seed, threads=1, out_dir=None, dump_raw=False):
    """Run a sweep and write ``grid.csv`` / ``summary.json`` (and optional
    raw dumps) into ``out_dir``. Returns the SweepResult."""
    runner = RUNNERS[experiment]
    dump_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if dump_raw:
            dump_dir = out_dir / "raw"
    sweep = runner(config, trials=trials, seed=seed, threads=threads, dump_dir=dump_dir)
    if out_dir is not None:
        write_grid_csv(sweep, out_dir / "grid.csv")
        write_summary_json(sweep, out_dir / "summary.json")
    return sweep
