"""Command-line interface: configure, run, score, and inspect benchmarks.

Subcommands::

    surropt run      --suite unconstrained --dims 2 --reps 5 --seed 42
    surropt optimize --algo dycors --problem ackley-d5 --budget 50
    surropt score    --out results --suite unconstrained
    surropt list

``run`` writes a manifest before any cell executes, then the full results
layout (per-repetition CSVs, scores.json, convergence.csv, cells.json).
``score`` recomputes scores from the stored trajectories and rewrites
scores.json; on untouched results the rewrite is bit-identical.

Config files are YAML with the keys suite, algorithms, problems, dims,
repetitions, budgets, warmup, seed, violation_threshold; every key has a
mirroring flag and flags win. The output root defaults to ./results or the
SURROPT_RESULTS environment variable.
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .bench import (
    DEFAULT_BUDGETS,
    DEFAULT_WARMUP,
    BASE_FUNCTIONS,
    BenchmarkConfig,
    _resolve_problems,
    _write_rep_csv,
    run_benchmark,
    score_results,
)
from .core import ConfigError
from .optimizers import ALGORITHMS, run_optimizer
from .problems import get_problem, list_problems

__all__ = ["RunManifest", "parse_config", "main"]

SUITES = {
    "unconstrained": {
        "algorithms": ["bo", "lsqm", "cobyla", "cobyqa", "cuatro", "dycors"],
        "problems": ["ackley", "levy", "rosenbrock", "quadratic"],
    },
    "constrained": {
        "algorithms": ["cbo", "cobyla", "cobyqa", "cuatro"],
        "problems": ["rosenbrock-c", "quadratic-c", "matyas-c"],
    },
    "casestudies": {
        "algorithms": ["cobyla", "cobyqa", "cuatro", "dycors"],
        "problems": ["cstr-pid", "williams-otto"],
        "budgets": {32: 150},
        "warmup": {32: 15},
    },
}

DEFAULT_DIMS = [2, 5, 7]

_CONFIG_KEYS = (
    "suite",
    "algorithms",
    "problems",
    "dims",
    "repetitions",
    "budgets",
    "warmup",
    "seed",
    "violation_threshold",
)


def _version() -> str:
    try:
        from importlib.metadata import version

        return version("surropt")
    except Exception:
        return "unknown"


@dataclass
class RunManifest:
    """Pre-run snapshot of a benchmark: written before any cell executes,
    never modified afterwards (per-cell outcomes land in cells.json)."""

    suite: str
    version: str
    timestamp: str
    seed: int
    config: dict
    cells: dict = field(default_factory=dict)

    @classmethod
    def plan(cls, config: BenchmarkConfig) -> "RunManifest":
        cells = {}
        for key, dim, n_e, n_c in _resolve_problems(config):
            for algo in config.algorithms:
                for rep in range(config.repetitions):
                    cells[f"{key}/{algo}/rep{rep}"] = "planned"
        snapshot = {
            "algorithms": list(config.algorithms),
            "problems": list(config.problems),
            "dims": list(config.dims),
            "repetitions": config.repetitions,
            "budgets": {str(k): v for k, v in config.budgets.items()},
            "warmup": {str(k): v for k, v in config.warmup.items()},
            "seed": config.seed,
            "violation_threshold": config.violation_threshold,
        }
        return cls(
            suite=config.suite,
            version=_version(),
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            seed=config.seed,
            config=snapshot,
            cells=cells,
        )

    def write(self, path: Path) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(self.__dict__, fh, indent=2, sort_keys=True)


def _suggest(value: str, valid, kind: str) -> ConfigError:
    close = difflib.get_close_matches(value, list(valid), n=1)
    hint = f"; did you mean '{close[0]}'?" if close else ""
    return ConfigError(
        f"unknown {kind} '{value}'{hint} (valid: {', '.join(sorted(valid))})"
    )


def _check_names(values, valid, kind: str) -> None:
    for v in values:
        if v not in valid:
            raise _suggest(v, valid, kind)


def parse_config(path: Optional[str] = None, flags: Optional[dict] = None) -> BenchmarkConfig:
    """Merge a YAML config file and command-line flags into a BenchmarkConfig.

    Precedence: flags > file > suite preset > documented defaults
    (repetitions 5, violation threshold 0.001, dims 2/5/7). An empty config
    selects the unconstrained suite.
    """
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    data = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        data = yaml.safe_load(p.read_text()) or {}
        if not isinstance(data, dict):
            raise ConfigError("config file must be a YAML mapping")
        for key in data:
            if key not in _CONFIG_KEYS:
                raise _suggest(key, _CONFIG_KEYS, "config key")

    suite = flags.get("suite", data.get("suite"))
    if suite is None and "algorithms" not in flags and "algorithms" not in data:
        suite = "unconstrained"
    if suite is not None and suite not in SUITES:
        raise _suggest(suite, SUITES, "suite")
    preset = SUITES.get(suite, {})

    def pick(key, default):
        return flags.get(key, data.get(key, preset.get(key, default)))

    algorithms = pick("algorithms", None)
    problems = pick("problems", None)
    if not algorithms:
        raise ConfigError("no algorithms selected; pass --algos or --suite")
    if not problems:
        raise ConfigError("no problems selected; pass --problems or --suite")
    _check_names(algorithms, ALGORITHMS, "algorithm")
    valid_problems = set(list_problems()) | set(BASE_FUNCTIONS)
    _check_names(problems, valid_problems, "problem")

    dims = [int(d) for d in pick("dims", DEFAULT_DIMS)]
    budgets = dict(DEFAULT_BUDGETS)
    budgets.update(preset.get("budgets", {}))
    budgets.update(data.get("budgets", {}))
    warmup = dict(DEFAULT_WARMUP)
    warmup.update(preset.get("warmup", {}))
    warmup.update(data.get("warmup", {}))

    # keep only the dimensions this config can actually touch, so a scalar
    # --budget never trips the budget>warmup check for unused presets
    dims_in_use = set()
    for name in problems:
        if name in BASE_FUNCTIONS:
            dims_in_use.update(dims)
        else:
            dims_in_use.add(get_problem(name).dim)
    if "budget" in flags:
        budgets = {d: int(flags["budget"]) for d in dims_in_use}
    else:
        budgets = {d: b for d, b in budgets.items() if d in dims_in_use}
    warmup = {d: w for d, w in warmup.items() if d in dims_in_use}

    return BenchmarkConfig(
        algorithms=list(algorithms),
        problems=list(problems),
        dims=dims,
        repetitions=int(pick("repetitions", 5)),
        budgets=budgets,
        warmup=warmup,
        seed=int(pick("seed", 0)),
        violation_threshold=float(pick("violation_threshold", 1e-3)),
        suite=suite or "custom",
    )


def _out_root(value: Optional[str]) -> Path:
    return Path(value or os.environ.get("SURROPT_RESULTS", "results"))


def _print_table(table) -> None:
    print(f"{'problem':<18} {'algorithm':<10} {'p':>7} {'feasible':>9} {'mean viol':>10}")
    for key in table.problems:
        for algo in table.algorithms:
            if (key, algo) not in table.p:
                continue
            feas = table.feasibility[(key, algo)]
            mv = table.mean_violation[(key, algo)]
            print(
                f"{key:<18} {algo:<10} {table.p[(key, algo)]:>7.3f} "
                f"{100 * feas:>8.1f}% {mv:>10.3g}"
            )


def cmd_run(args) -> int:
    config = parse_config(args.config, vars(args))
    root = _out_root(args.out)
    manifest = RunManifest.plan(config)
    manifest.write(root / config.suite / "manifest.json")
    jobs = args.jobs or os.cpu_count() or 1
    table = run_benchmark(config, out_dir=root, jobs=jobs)
    failed = sorted(k for k, v in table.cell_status.items() if v != "ok")
    _print_table(table)
    print(f"results under {root / config.suite}")
    if failed:
        print(f"{len(failed)} cell(s) failed:", file=sys.stderr)
        for cell in failed:
            print(f"  {cell}: {table.cell_status[cell]}", file=sys.stderr)
        if args.strict:
            return 1
    return 0


def cmd_optimize(args) -> int:
    if args.algo not in ALGORITHMS:
        raise _suggest(args.algo, ALGORITHMS, "algorithm")
    if args.problem not in list_problems():
        raise _suggest(args.problem, list_problems(), "problem")
    problem = get_problem(args.problem)
    budget = args.budget
    if budget is None:
        presets = {"cstr-pid": 150, "williams-otto": 20}
        budget = presets.get(args.problem, DEFAULT_BUDGETS.get(problem.dim))
    if budget is None:
        raise ConfigError(f"no budget preset for dimension {problem.dim}; pass --budget")
    traj = run_optimizer(args.algo, problem, budget, args.seed)
    out = Path(args.out or f"{args.problem}_{args.algo}_seed{args.seed}.csv")
    _write_rep_csv(out, traj)
    best = float(np.min(traj.ys)) if len(traj) else float("nan")
    print(f"{args.algo} on {args.problem}: best y = {best:.6g} after {len(traj)} evaluations")
    print(f"trajectory written to {out}")
    return 0


def cmd_score(args) -> int:
    root = _out_root(args.out)
    table = score_results(root, suite=args.suite)
    suite_dir = root / (args.suite or "") if args.suite else root
    scores_path = suite_dir / "scores.json"
    with open(scores_path) as fh:
        payload = json.load(fh)
    before = json.dumps(payload, indent=2, sort_keys=True)
    payload["scores"] = table.to_dict()
    after = json.dumps(payload, indent=2, sort_keys=True)
    with open(scores_path, "w") as fh:
        fh.write(after)
    _print_table(table)
    if before == after:
        print("scores.json reproduced bit-identically")
    else:
        print("scores.json updated (stored values differed)")
    return 0


def cmd_list(args) -> int:
    print("algorithms:")
    print("  " + " ".join(ALGORITHMS))
    print("suites:")
    for name, preset in SUITES.items():
        print(f"  {name}: {' '.join(preset['problems'])}")
    print("problems:")
    for key in list_problems():
        print(f"  {key}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surropt",
        description="surrogate-based optimization benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a benchmark suite")
    run.add_argument("--suite", choices=sorted(SUITES), default=None)
    run.add_argument("--config", default=None, help="YAML config file")
    run.add_argument("--algos", dest="algorithms", nargs="+", default=None)
    run.add_argument("--problems", nargs="+", default=None)
    run.add_argument("--dims", nargs="+", type=int, default=None)
    run.add_argument("--budget", type=int, default=None,
                     help="override the evaluation budget for every dimension in use")
    run.add_argument("--reps", dest="repetitions", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--threshold", dest="violation_threshold", type=float, default=None)
    run.add_argument("--out", default=None, help="output root (default ./results or $SURROPT_RESULTS)")
    run.add_argument("--jobs", type=int, default=None, help="parallel cells (default: cpu count)")
    run.add_argument("--strict", action="store_true", help="nonzero exit if any cell fails")
    run.set_defaults(fn=cmd_run)

    opt = sub.add_parser("optimize", help="run one algorithm on one problem")
    opt.add_argument("--algo", required=True)
    opt.add_argument("--problem", required=True)
    opt.add_argument("--budget", type=int, default=None)
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--out", default=None, help="trajectory CSV path")
    opt.set_defaults(fn=cmd_optimize)

    score = sub.add_parser("score", help="re-score a results directory")
    score.add_argument("--out", default=None, help="results root")
    score.add_argument("--suite", default=None)
    score.set_defaults(fn=cmd_score)

    lst = sub.add_parser("list", help="show algorithms, suites, and problems")
    lst.set_defaults(fn=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
