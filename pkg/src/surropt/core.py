"""Problem abstraction, seeded sampling, evaluation, and trajectory recording.

Everything downstream (surrogates, optimizers, the benchmark harness) works in
terms of the small set of containers defined here: a ``Problem`` bundles an
objective with its box bounds, optional constraints, and a noise model; an
optimizer run produces a ``Trajectory`` of ``Evaluation`` records; surrogate
fits consume a ``Dataset`` (rows are samples).

Randomness is handled through named sub-streams derived from one base seed, so
observation noise, the initial design, and optimizer-internal draws are
independently reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "Bounds",
    "NoiseSpec",
    "Problem",
    "Evaluation",
    "Dataset",
    "Trajectory",
    "BudgetExhausted",
    "EvaluationFailed",
    "ConfigError",
    "derive_seed",
    "substream",
    "latin_hypercube",
    "evaluate",
    "best_so_far",
]


class BudgetExhausted(RuntimeError):
    """Raised when an evaluation is requested beyond the trajectory budget."""


class EvaluationFailed(RuntimeError):
    """Raised when the objective returns a non-finite value."""


class ConfigError(ValueError):
    """Raised for invalid run or benchmark configuration."""


@dataclass(frozen=True)
class Bounds:
    """Box bounds, one (lower, upper) pair per dimension."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ConfigError("lower and upper must be 1-D arrays of equal length")
        if not np.all(lo < hi):
            raise ConfigError("degenerate bounds: need lower[i] < upper[i] for all i")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    @staticmethod
    def cube(lo: float, hi: float, dim: int) -> "Bounds":
        return Bounds(np.full(dim, float(lo)), np.full(dim, float(hi)))


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian observation noise; sigma = 0 means deterministic.

    Constraint observations are noiseless unless ``constraint_sigma`` is set
    explicitly (off by default).
    """

    sigma: float = 0.0
    constraint_sigma: float = 0.0

    def __post_init__(self):
        if self.sigma < 0 or self.constraint_sigma < 0:
            raise ConfigError("noise standard deviations must be >= 0")


@dataclass(frozen=True)
class Problem:
    """A black-box minimization problem over a box domain.

    Parameters
    ----------
    name : str
        Registry identifier.
    bounds : Bounds
        Box domain; ``dim`` is taken from it.
    objective : callable
        Maps a point (1-D array) to a float. Never called out of bounds;
        out-of-bounds proposals are clipped before evaluation.
    constraints : callable, optional
        Maps a point to a vector of ``n_constraints`` values in the
        g(x) <= 0 convention.
    noise : NoiseSpec
        Observation noise applied by :func:`evaluate`.
    known_optimum : (point, value) tuple, optional
        The analytic optimum when available.
    """

    name: str
    bounds: Bounds
    objective: Callable[[np.ndarray], float]
    constraints: Optional[Callable[[np.ndarray], np.ndarray]] = None
    n_constraints: int = 0
    noise: NoiseSpec = NoiseSpec()
    known_optimum: Optional[tuple] = None

    def __post_init__(self):
        if self.n_constraints < 0:
            raise ConfigError("n_constraints must be >= 0")
        if self.n_constraints > 0 and self.constraints is None:
            raise ConfigError("n_constraints > 0 requires a constraints callable")
        if self.known_optimum is not None:
            x_star = np.asarray(self.known_optimum[0], dtype=float)
            if x_star.shape != (self.dim,) or not self.bounds.contains(x_star):
                raise ConfigError("known_optimum point must lie within bounds")

    @property
    def dim(self) -> int:
        return self.bounds.dim


@dataclass(frozen=True)
class Evaluation:
    """One observed point: inputs, noisy objective, constraint values, counter."""

    x: np.ndarray
    y: float
    g: np.ndarray
    index: int


class Trajectory:
    """Ordered evaluation history of a single run, capped at ``budget``."""

    def __init__(self, budget: int, seed: int):
        if budget < 1:
            raise ConfigError("budget must be >= 1")
        self.budget = int(budget)
        self.seed = int(seed)
        self.evaluations: list[Evaluation] = []
        self.meta: dict = {}

    def __len__(self) -> int:
        return len(self.evaluations)

    @property
    def remaining(self) -> int:
        return self.budget - len(self.evaluations)

    def append(self, ev: Evaluation) -> None:
        if len(self.evaluations) >= self.budget:
            raise BudgetExhausted(
                f"budget of {self.budget} evaluations already spent"
            )
        if ev.index != len(self.evaluations) + 1:
            raise ConfigError(
                f"evaluation index {ev.index} breaks the 1..n sequence"
            )
        self.evaluations.append(ev)

    @property
    def xs(self) -> np.ndarray:
        return np.array([ev.x for ev in self.evaluations])

    @property
    def ys(self) -> np.ndarray:
        return np.array([ev.y for ev in self.evaluations])

    @property
    def gs(self) -> np.ndarray:
        # shape (n, n_g); (n, 0) when the problem is unconstrained
        return np.array([ev.g for ev in self.evaluations]).reshape(len(self), -1)


@dataclass
class Dataset:
    """Sampled inputs and outputs; rows are samples (n_d x n_x)."""

    X: np.ndarray
    y: np.ndarray
    G: Optional[np.ndarray] = None

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        if self.X.shape[0] != self.y.size:
            raise ConfigError("X and y must have the same number of rows")
        if self.G is not None:
            self.G = np.atleast_2d(np.asarray(self.G, dtype=float))
            if self.G.shape[0] != self.y.size:
                raise ConfigError("G must have the same number of rows as X")

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    @staticmethod
    def from_trajectory(traj: Trajectory) -> "Dataset":
        G = traj.gs
        return Dataset(traj.xs, traj.ys, G if G.shape[1] > 0 else None)


def derive_seed(base_seed: int, *tokens) -> int:
    """Deterministic 63-bit sub-seed from a base seed and hashable tokens."""
    payload = repr((int(base_seed),) + tuple(tokens)).encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def substream(base_seed: int, *tokens) -> np.random.Generator:
    """A named, independent RNG stream derived from ``base_seed``."""
    return np.random.default_rng(derive_seed(base_seed, *tokens))


def latin_hypercube(bounds: Bounds, n: int, seed: int) -> np.ndarray:
    """Latin hypercube design: n points, one per equal-width stratum per dim."""
    if n < 1:
        raise ConfigError("latin_hypercube needs n >= 1")
    rng = np.random.default_rng(int(seed))
    d = bounds.dim
    u = np.empty((n, d))
    for j in range(d):
        strata = rng.permutation(n)
        u[:, j] = (strata + rng.uniform(size=n)) / n
    return bounds.lower + u * bounds.width


def evaluate(
    problem: Problem,
    x,
    rng: np.random.Generator,
    trajectory: Optional[Trajectory] = None,
    index: Optional[int] = None,
) -> Evaluation:
    """Evaluate ``problem`` at ``x`` (clipped to bounds) with observation noise.

    When a trajectory is supplied the evaluation is counted against its
    budget and appended; exceeding the budget raises :class:`BudgetExhausted`
    (distinct from :class:`EvaluationFailed`, which signals a non-finite
    objective value).
    """
    if trajectory is not None and trajectory.remaining <= 0:
        raise BudgetExhausted(
            f"budget of {trajectory.budget} evaluations already spent"
        )
    x = problem.bounds.clip(x)
    y_true = float(problem.objective(x))
    if not np.isfinite(y_true):
        raise EvaluationFailed(f"objective returned non-finite value at x={x}")
    y = y_true
    if problem.noise.sigma > 0:
        y = y_true + problem.noise.sigma * rng.standard_normal()
    if problem.n_constraints > 0:
        g = np.asarray(problem.constraints(x), dtype=float).ravel()
        if g.size != problem.n_constraints:
            raise EvaluationFailed(
                f"constraints returned {g.size} values, expected {problem.n_constraints}"
            )
        if problem.noise.constraint_sigma > 0:
            g = g + problem.noise.constraint_sigma * rng.standard_normal(g.size)
    else:
        g = np.empty(0)
    if index is None:
        index = len(trajectory) + 1 if trajectory is not None else 1
    ev = Evaluation(x=x, y=y, g=g, index=int(index))
    if trajectory is not None:
        trajectory.append(ev)
    return ev


def best_so_far(trajectory) -> np.ndarray:
    """Running minimum of observed objective values.

    Accepts a :class:`Trajectory` or a plain sequence of values.
    """
    ys = trajectory.ys if isinstance(trajectory, Trajectory) else np.asarray(
        trajectory, dtype=float
    )
    if ys.size == 0:
        raise ConfigError("best_so_far needs a non-empty trajectory")
    return np.minimum.accumulate(ys)
