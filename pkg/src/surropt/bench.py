"""Benchmark orchestration, normalized scoring, and result persistence.

The protocol runs every (algorithm, problem, repetition) cell with an
independent derived seed, tracks best-so-far trajectories, drops the first
n_c warm-up evaluations (without resetting the running minimum), averages
the remaining curves over repetitions, and scores each algorithm per
iteration by

    r = (worst_mean - mean) / (worst_mean - best_mean)

so 1 is the best performer and 0 the worst; p is the mean of r over
iterations. Feasibility metrics count evaluations whose worst constraint
exceeds the violation threshold.

Artifacts: ``<out>/<suite>/<problem>/<algorithm>/rep<k>.csv`` (one row per
evaluation, floats at 17 significant digits), ``scores.json``,
``convergence.csv``, and ``cells.json`` with per-cell statuses.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import ConfigError, Trajectory, best_so_far, derive_seed
from .optimizers import run_optimizer
from .problems import get_problem

__all__ = [
    "BenchmarkConfig",
    "ScoreTable",
    "DEFAULT_BUDGETS",
    "DEFAULT_WARMUP",
    "score_r",
    "score_p",
    "count_violations",
    "run_benchmark",
    "score_results",
]

logger = logging.getLogger(__name__)

DEFAULT_BUDGETS = {2: 20, 5: 50, 7: 80, 10: 100}
DEFAULT_WARMUP = {2: 5, 5: 10, 7: 13, 10: 15}

# registry base names that expand over the configured dimension list
BASE_FUNCTIONS = ("ackley", "levy", "rosenbrock", "quadratic")


@dataclass
class BenchmarkConfig:
    algorithms: list
    problems: list
    dims: list = field(default_factory=lambda: [2])
    repetitions: int = 5
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    warmup: dict = field(default_factory=lambda: dict(DEFAULT_WARMUP))
    seed: int = 0
    violation_threshold: float = 1e-3
    suite: str = "custom"

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        if not self.problems:
            raise ConfigError("at least one problem is required")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        for d in set(self.budgets) & set(self.warmup):
            if self.budgets[d] <= self.warmup[d]:
                raise ConfigError(
                    f"budget {self.budgets[d]} must exceed warm-up "
                    f"{self.warmup[d]} for dimension {d}"
                )


@dataclass
class ScoreTable:
    """Normalized scores and feasibility metrics per (problem, algorithm)."""

    suite: str
    problems: list
    algorithms: list
    n_effective: dict  # problem key -> effective iteration count n
    r: dict  # (problem, algorithm) -> ndarray of per-iteration scores
    p: dict  # (problem, algorithm) -> scalar overall score
    feasibility: dict  # (problem, algorithm) -> feasible fraction
    mean_violation: dict  # (problem, algorithm) -> mean max-violation
    convergence: list = field(default_factory=list)
    cell_status: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        scores = {}
        for key in self.problems:
            scores[key] = {}
            for algo in self.algorithms:
                if (key, algo) not in self.p:
                    continue
                scores[key][algo] = {
                    "p": self.p[(key, algo)],
                    "r": [float(v) for v in self.r[(key, algo)]],
                    "feasibility": self.feasibility[(key, algo)],
                    "mean_violation": self.mean_violation[(key, algo)],
                }
        return scores


def score_r(worst: float, best: float, mean: float) -> float:
    """Relative score (worst - mean) / (worst - best); ties score 1."""
    if worst == best:
        return 1.0
    return float(np.clip((worst - mean) / (worst - best), 0.0, 1.0))


def score_p(r_values) -> float:
    r = np.asarray(r_values, dtype=float)
    if r.size == 0:
        raise ConfigError("score_p needs at least one r value")
    return float(np.mean(r))


def count_violations(trajectory, threshold: float = 1e-3):
    """(feasible_fraction, mean_violation) for a trajectory or raw G array.

    An evaluation violates when max_i g_i > threshold; the mean violation
    averages max_i g_i over violating evaluations only (0 when none).
    """
    if isinstance(trajectory, Trajectory):
        G = trajectory.gs
    else:
        G = np.atleast_2d(np.asarray(trajectory, dtype=float))
    if G.size == 0:
        return 1.0, 0.0
    worst = np.max(G, axis=1)
    violating = worst > threshold
    feasible_fraction = float(1.0 - np.mean(violating))
    mean_violation = float(np.mean(worst[violating])) if np.any(violating) else 0.0
    return feasible_fraction, mean_violation


def _resolve_problems(config: BenchmarkConfig):
    """Expand config problem entries into (key, dim, n_e, n_c) cells."""
    entries = []
    for name in config.problems:
        if name in BASE_FUNCTIONS:
            if not config.dims:
                raise ConfigError(f"'{name}' needs a non-empty dims list")
            for d in config.dims:
                entries.append((f"{name}-d{d}", int(d)))
        else:
            entries.append((name, get_problem(name).dim))
    resolved = []
    for key, d in entries:
        if d not in config.budgets or d not in config.warmup:
            raise ConfigError(
                f"no budget/warm-up preset for dimension {d} (problem '{key}'); "
                f"known dimensions: {sorted(config.budgets)}"
            )
        n_e, n_c = int(config.budgets[d]), int(config.warmup[d])
        if n_e <= n_c:
            raise ConfigError(f"budget {n_e} must exceed warm-up {n_c} for '{key}'")
        resolved.append((key, d, n_e, n_c))
    return resolved


def _run_cell(algo: str, key: str, budget: int, seed: int) -> Trajectory:
    # module-level so process pools can import it; rebuilds the problem
    # from its registry key instead of pickling closures
    return run_optimizer(algo, get_problem(key), budget, seed)


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _write_rep_csv(path: Path, traj: Trajectory) -> None:
    X, y, G = traj.xs, traj.ys, traj.gs
    bsf = best_so_far(traj)
    d, n_g = X.shape[1], G.shape[1]
    header = (
        ["iteration"]
        + [f"x{i}" for i in range(d)]
        + ["y"]
        + [f"g{i}" for i in range(n_g)]
        + ["best_so_far"]
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(len(traj)):
            row = [str(i + 1)]
            row += [_fmt(v) for v in X[i]]
            row.append(_fmt(y[i]))
            row += [_fmt(v) for v in G[i]]
            row.append(_fmt(bsf[i]))
            w.writerow(row)


def _read_rep_csv(path: Path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    i_bsf = header.index("best_so_far")
    g_cols = [i for i, h in enumerate(header) if h.startswith("g")]
    bsf = np.array([float(r[i_bsf]) for r in body])
    G = np.array([[float(r[j]) for j in g_cols] for r in body]).reshape(len(body), -1)
    return bsf, G


def _score_cells(curves, viol_stats, problems, algorithms, threshold):
    """Aggregate per-rep curves into a ScoreTable (pure reduction)."""
    n_effective, r_all, p_all, feas, mviol, convergence = {}, {}, {}, {}, {}, []
    for key, dim, n_e, n_c in problems:
        per_algo = {}
        for algo in algorithms:
            reps = curves.get((key, algo))
            if reps:
                per_algo[algo] = np.array(reps)  # (n_reps, n)
        if not per_algo:
            continue
        n = next(iter(per_algo.values())).shape[1]
        n_effective[key] = n
        mean_curves = {a: c.mean(axis=0) for a, c in per_algo.items()}
        stacked = np.array([mean_curves[a] for a in sorted(mean_curves)])
        worst = stacked.max(axis=0)
        best = stacked.min(axis=0)
        for algo, mc in mean_curves.items():
            r = np.array([score_r(worst[k], best[k], mc[k]) for k in range(n)])
            r_all[(key, algo)] = r
            p_all[(key, algo)] = score_p(r)
            G_all = viol_stats[(key, algo)]
            feas[(key, algo)], mviol[(key, algo)] = count_violations(
                G_all, threshold
            )
        for algo in sorted(per_algo):
            c = per_algo[algo]
            for k in range(n):
                vals = c[:, k]
                convergence.append(
                    (
                        key,
                        algo,
                        k + 1,
                        float(vals.mean()),
                        float(np.percentile(vals, 10)),
                        float(np.percentile(vals, 90)),
                    )
                )
    return n_effective, r_all, p_all, feas, mviol, convergence


def run_benchmark(
    config: BenchmarkConfig, out_dir: Optional[str] = None, jobs: int = 1
) -> ScoreTable:
    """Execute all cells, score them, and optionally persist artifacts.

    A failing cell is recorded in ``cell_status`` and skipped by the
    aggregation; everything else proceeds. Results are bit-reproducible for
    a fixed config regardless of ``jobs``.
    """
    problems = _resolve_problems(config)
    tasks = []
    for key, dim, n_e, n_c in problems:
        for algo in config.algorithms:
            for rep in range(config.repetitions):
                seed = derive_seed(config.seed, algo, key, dim, rep)
                tasks.append((key, dim, n_e, n_c, algo, rep, seed))

    trajectories, status = {}, {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                pool.submit(_run_cell, algo, key, n_e, seed): (key, algo, rep)
                for key, dim, n_e, n_c, algo, rep, seed in tasks
            }
            for fut, (key, algo, rep) in futures.items():
                try:
                    trajectories[(key, algo, rep)] = fut.result()
                    status[f"{key}/{algo}/rep{rep}"] = "ok"
                except Exception as exc:
                    status[f"{key}/{algo}/rep{rep}"] = f"failed: {exc}"
                    logger.warning("cell %s/%s rep %d failed: %s", key, algo, rep, exc)
    else:
        for key, dim, n_e, n_c, algo, rep, seed in tasks:
            try:
                trajectories[(key, algo, rep)] = _run_cell(algo, key, n_e, seed)
                status[f"{key}/{algo}/rep{rep}"] = "ok"
            except Exception as exc:
                status[f"{key}/{algo}/rep{rep}"] = f"failed: {exc}"
                logger.warning("cell %s/%s rep %d failed: %s", key, algo, rep, exc)

    curves, viol = {}, {}
    for key, dim, n_e, n_c in problems:
        for algo in config.algorithms:
            rep_curves, g_rows = [], []
            for rep in range(config.repetitions):
                traj = trajectories.get((key, algo, rep))
                if traj is None:
                    continue
                rep_curves.append(best_so_far(traj)[n_c:])  # warm-up dropped
                g_rows.append(traj.gs)
            if rep_curves:
                curves[(key, algo)] = rep_curves
                viol[(key, algo)] = np.vstack(g_rows)

    parts = _score_cells(curves, viol, problems, config.algorithms,
                         config.violation_threshold)
    table = ScoreTable(
        config.suite, [k for k, *_ in problems], list(config.algorithms),
        *parts[:5], convergence=parts[5], cell_status=status,
    )

    if out_dir is not None:
        root = Path(out_dir) / config.suite
        for (key, algo, rep), traj in sorted(trajectories.items()):
            _write_rep_csv(root / key / algo / f"rep{rep}.csv", traj)
        _write_scores(root, config, problems, table)
        _write_convergence(root / "convergence.csv", table.convergence)
        with open(root / "cells.json", "w") as fh:
            json.dump(status, fh, indent=2, sort_keys=True)
    return table


def _write_scores(root: Path, config, problems, table: ScoreTable) -> None:
    root.mkdir(parents=True, exist_ok=True)
    payload = {
        "suite": config.suite,
        "config": {
            "algorithms": list(config.algorithms),
            "problems": list(config.problems),
            "dims": list(config.dims),
            "repetitions": config.repetitions,
            "budgets": {str(k): v for k, v in config.budgets.items()},
            "warmup": {str(k): v for k, v in config.warmup.items()},
            "seed": config.seed,
            "violation_threshold": config.violation_threshold,
        },
        "cells": {
            key: {"dim": d, "n_e": n_e, "n_c": n_c}
            for key, d, n_e, n_c in problems
        },
        "scores": table.to_dict(),
    }
    with open(root / "scores.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)


def _write_convergence(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["problem", "algorithm", "iteration", "mean", "p10", "p90"])
        for key, algo, k, mean, p10, p90 in rows:
            w.writerow([key, algo, str(k), _fmt(mean), _fmt(p10), _fmt(p90)])


def score_results(results_dir: str, suite: Optional[str] = None) -> ScoreTable:
    """Recompute a ScoreTable from persisted CSVs, bit-identically.

    ``results_dir`` points at either the suite directory itself (holding
    scores.json) or its parent, in which case ``suite`` selects the child.
    """
    root = Path(results_dir)
    if suite is not None:
        root = root / suite
    scores_path = root / "scores.json"
    if not scores_path.exists():
        raise ConfigError(f"no scores.json under {root}")
    with open(scores_path) as fh:
        payload = json.load(fh)
    cfg = payload["config"]
    cells = payload["cells"]
    problems = [
        (key, meta["dim"], meta["n_e"], meta["n_c"]) for key, meta in cells.items()
    ]
    algorithms = cfg["algorithms"]
    curves, viol, status = {}, {}, {}
    for key, dim, n_e, n_c in problems:
        for algo in algorithms:
            rep_curves, g_rows = [], []
            for rep in range(cfg["repetitions"]):
                path = root / key / algo / f"rep{rep}.csv"
                if not path.exists():
                    continue
                bsf, G = _read_rep_csv(path)
                rep_curves.append(bsf[n_c:])
                g_rows.append(G)
                status[f"{key}/{algo}/rep{rep}"] = "ok"
            if rep_curves:
                curves[(key, algo)] = rep_curves
                viol[(key, algo)] = np.vstack(g_rows)
    parts = _score_cells(curves, viol, problems, algorithms,
                         cfg["violation_threshold"])
    return ScoreTable(
        payload["suite"], [k for k, *_ in problems], list(algorithms),
        *parts[:5], convergence=parts[5], cell_status=status,
    )
