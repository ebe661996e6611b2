"""Optimization strategies sharing one step contract: history in, next point out.

Six methods are provided:

- ``bo`` / ``cbo``: Gaussian-process Bayesian optimization with a lower
  confidence bound acquisition, the constrained variant filtering candidates
  through per-constraint GP means.
- ``lsqm``: PSD-projected quadratic least-squares surrogate minimized inside
  a trust region.
- ``cuatro``: PSD quadratic surrogates for objective and constraints,
  feasibility-first candidate search inside the trust region.
- ``cobyla``: linear surrogates on a maintained simplex, merit
  f + penalty * [max g]_+ minimized within half the trust-region radius.
- ``cobyqa``: quadratic regression surrogates with the penalized merit
  f + sum_i rho_i * [g_i]_+ over the full trust-region ball.
- ``dycors``: cubic-RBF surrogate with stochastic coordinate perturbations
  and a cycling value/distance weighted score.

All inner argmins use the same derivative-free candidate-pool search
(seeded pool + analytic Newton/Cauchy candidates + coordinate pattern
refinement), so every step operation is a pure function of (data, state,
seed).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import (
    Bounds,
    ConfigError,
    Dataset,
    Problem,
    Trajectory,
    derive_seed,
    evaluate,
    latin_hypercube,
    substream,
)
from .surrogates import (
    SurrogateFitError,
    fit_gp,
    fit_linear,
    fit_quadratic,
    fit_rbf,
    gp_posterior,
    rbf_predict,
)

__all__ = [
    "TrustRegionState",
    "AcquisitionConfig",
    "MeritConfig",
    "DycorsState",
    "lcb",
    "propose_bo",
    "propose_cbo",
    "lsqm_step",
    "cuatro_step",
    "cobyla_step",
    "cobyqa_step",
    "trust_region_update",
    "dycors_step",
    "dycors_update",
    "run_optimizer",
    "ALGORITHMS",
    "initial_design_size",
]

logger = logging.getLogger(__name__)

ALGORITHMS = ("bo", "cbo", "lsqm", "cuatro", "cobyla", "cobyqa", "dycors")

DYCORS_WEIGHTS = (0.3, 0.5, 0.8, 0.95)


# ------------------------------------------------------------------ state types


@dataclass(frozen=True)
class TrustRegionState:
    """Center, radius, and adaptation counters of a trust-region method."""

    center: np.ndarray
    radius: float
    min_radius: float = 1e-6
    max_radius: float = math.inf
    success_count: int = 0
    fail_count: int = 0

    def __post_init__(self):
        if not (self.min_radius <= self.radius <= self.max_radius):
            raise ConfigError("need min_radius <= radius <= max_radius")


@dataclass(frozen=True)
class AcquisitionConfig:
    """LCB acquisition settings and inner-search effort."""

    gamma: float = 2.0
    candidate_pool: Optional[int] = None  # defaults to 100 * n_x
    refine_steps: int = 20
    feasibility_backoff: bool = False  # require mu + sigma <= 0 instead of mu <= 0

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")


@dataclass(frozen=True)
class MeritConfig:
    """Per-constraint penalties for merit functions."""

    penalties: np.ndarray = field(default_factory=lambda: np.array([100.0]))
    penalty_growth: float = 10.0
    penalty_cap: float = 1e8
    feasibility_threshold: float = 1e-3

    def __post_init__(self):
        pen = np.atleast_1d(np.asarray(self.penalties, dtype=float))
        if np.any(pen <= 0):
            raise ConfigError("all penalties must be > 0")
        if self.penalty_growth <= 1:
            raise ConfigError("penalty_growth must be > 1")
        object.__setattr__(self, "penalties", pen)

    @staticmethod
    def for_constraints(n_g: int) -> "MeritConfig":
        return MeritConfig(penalties=np.full(max(n_g, 1), 100.0))


@dataclass(frozen=True)
class DycorsState:
    """Iteration counter, step size, and weight-cycle position."""

    iteration: int
    max_iterations: int
    step_size: float
    initial_step_size: float
    weight_cycle_index: int = 0
    success_count: int = 0
    fail_count: int = 0

    def __post_init__(self):
        if not (0 <= self.iteration <= self.max_iterations):
            raise ConfigError("need 0 <= iteration <= max_iterations")
        if self.step_size <= 0:
            raise ConfigError("step_size must be > 0")


# ------------------------------------------------------------------ acquisition


def lcb(mu: float, sigma: float, gamma: float):
    """Lower confidence bound mu - gamma * sigma."""
    return mu - gamma * sigma


# ------------------------------------------------------------------ inner search
#
# Candidate-pool minimization with feasibility-first lexicographic keys.
# A key function maps an (m, d) batch to (primary, secondary) arrays;
# candidates are ranked by primary first (0 = predicted feasible), then
# secondary. Pattern refinement tries +/- step moves per coordinate,
# projecting trials into bounds and (when given) the trust-region ball.


def _lex_best(primary: np.ndarray, secondary: np.ndarray) -> int:
    order = np.lexsort((secondary, primary))
    return int(order[0])


def _project(x, bounds: Bounds, center=None, radius=None):
    x = bounds.clip(x)
    if center is not None:
        d = x - center
        norm = float(np.linalg.norm(d))
        if radius is not None and norm > radius:
            x = center + d * (radius / norm)
    return x


def _ball_candidates(center, radius, bounds, n, rng):
    d = center.size
    directions = rng.standard_normal((n, d))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = radius * rng.uniform(size=(n, 1)) ** (1.0 / d)
    X = center + directions / norms * radii
    return np.clip(X, bounds.lower, bounds.upper)


def _pool_minimize(
    keys_fn: Callable[[np.ndarray], tuple],
    bounds: Bounds,
    seed: int,
    n_pool: int,
    refine_steps: int,
    center=None,
    radius=None,
    extra: Optional[list] = None,
) -> np.ndarray:
    if center is not None:
        rng = substream(seed, "pool")
        X = _ball_candidates(center, radius, bounds, n_pool, rng)
        step = radius / 4.0
    else:
        X = latin_hypercube(bounds, n_pool, derive_seed(seed, "pool"))
        step = float(np.max(bounds.width)) / 10.0
    rows = [X]
    if extra:
        rows.append(
            np.array([_project(e, bounds, center, radius) for e in extra])
        )
    X = np.vstack(rows)
    primary, secondary = keys_fn(X)
    i = _lex_best(primary, secondary)
    x = X[i]
    best_key = (primary[i], secondary[i])

    d = bounds.dim
    for _ in range(refine_steps):
        trials = np.repeat(x[None, :], 2 * d, axis=0)
        for j in range(d):
            trials[2 * j, j] += step
            trials[2 * j + 1, j] -= step
        trials = np.array(
            [_project(t, bounds, center, radius) for t in trials]
        )
        p, s = keys_fn(trials)
        i = _lex_best(p, s)
        if (p[i], s[i]) < best_key:
            x = trials[i]
            best_key = (p[i], s[i])
        else:
            step *= 0.5
    return x


def _plain_keys(values: np.ndarray) -> tuple:
    return np.zeros(values.shape, dtype=int), values


# ------------------------------------------------------------------ BO / CBO


def _best_index(y, G=None, threshold=1e-3):
    """Feasible-first incumbent: min y among feasible, else min total violation."""
    if G is None or G.size == 0:
        return int(np.argmin(y))
    viol = np.sum(np.maximum(G, 0.0), axis=1)
    feasible = np.max(G, axis=1) <= threshold
    if np.any(feasible):
        idx = np.where(feasible)[0]
        return int(idx[np.argmin(np.asarray(y)[idx])])
    return int(np.argmin(viol))


def propose_bo(
    data: Dataset, bounds: Bounds, config: AcquisitionConfig = AcquisitionConfig(),
    seed: int = 0,
) -> np.ndarray:
    """Minimize the LCB of a freshly fitted GP over the candidate pool."""
    n_pool = config.candidate_pool or 100 * bounds.dim
    try:
        model = fit_gp(data, seed=derive_seed(seed, "gp"))
    except SurrogateFitError as exc:
        logger.warning("GP fit failed (%s); falling back to random proposal", exc)
        return substream(seed, "bo-fallback").uniform(bounds.lower, bounds.upper)

    def keys(X):
        mu, var = gp_posterior(model, X)
        return _plain_keys(lcb(mu, np.sqrt(var), config.gamma))

    incumbent = data.X[int(np.argmin(data.y))]
    return _pool_minimize(
        keys, bounds, seed, n_pool, config.refine_steps, extra=[incumbent]
    )


def propose_cbo(
    data: Dataset,
    bounds: Bounds,
    config: AcquisitionConfig = AcquisitionConfig(),
    merit: Optional[MeritConfig] = None,
    seed: int = 0,
) -> np.ndarray:
    """Constrained BO: LCB among candidates whose constraint-GP means are <= 0.

    Falls back to minimizing total predicted violation when no candidate is
    predicted feasible.
    """
    if data.G is None or data.G.shape[1] < 1:
        raise ConfigError("propose_cbo needs constraint observations")
    n_pool = config.candidate_pool or 100 * bounds.dim
    try:
        f_model = fit_gp(data, seed=derive_seed(seed, "gp"))
        g_models = [
            fit_gp(Dataset(data.X, data.G[:, i]), seed=derive_seed(seed, "gp-con", i))
            for i in range(data.G.shape[1])
        ]
    except SurrogateFitError as exc:
        logger.warning("GP fit failed (%s); falling back to random proposal", exc)
        return substream(seed, "bo-fallback").uniform(bounds.lower, bounds.upper)

    def keys(X):
        mu, var = gp_posterior(f_model, X)
        acq = mu - config.gamma * np.sqrt(var)
        total_viol = np.zeros(X.shape[0])
        worst = np.full(X.shape[0], -np.inf)
        for gm in g_models:
            mu_g, var_g = gp_posterior(gm, X)
            margin = mu_g + np.sqrt(var_g) if config.feasibility_backoff else mu_g
            total_viol += np.maximum(margin, 0.0)
            worst = np.maximum(worst, margin)
        infeasible = (worst > 0).astype(int)
        secondary = np.where(infeasible == 0, acq, total_viol)
        return infeasible, secondary

    threshold = merit.feasibility_threshold if merit else 1e-3
    incumbent = data.X[_best_index(data.y, data.G, threshold)]
    return _pool_minimize(
        keys, bounds, seed, n_pool, config.refine_steps, extra=[incumbent]
    )


# ------------------------------------------------------------------ trust region


def _newton_point(model, center):
    # unconstrained minimizer of the quadratic surrogate, min-norm when singular
    try:
        x_n, *_ = np.linalg.lstsq(2.0 * model.Q, -model.c, rcond=None)
        return x_n
    except np.linalg.LinAlgError:
        return None


def _cauchy_point(grad, center, radius):
    norm = float(np.linalg.norm(grad))
    if norm == 0:
        return None
    return center - radius * grad / norm


def _quad_extras(model, center, radius):
    extras = [center]
    x_n = _newton_point(model, center)
    if x_n is not None and np.all(np.isfinite(x_n)):
        extras.append(x_n)
    grad = 2.0 * model.Q @ center + model.c
    x_c = _cauchy_point(grad, center, radius)
    if x_c is not None:
        extras.append(x_c)
    return extras


def _boundary_flag(x, center, radius):
    return float(np.linalg.norm(x - center)) >= radius * (1.0 - 1e-3)


def _lsqm_impl(data, bounds, tr, seed, n_pool=None, refine_steps=20):
    model = fit_quadratic(data, psd=True)
    n_pool = n_pool or 100 * bounds.dim

    def keys(X):
        return _plain_keys(model.predict(X))

    x = _pool_minimize(
        keys, bounds, seed, n_pool, refine_steps,
        center=tr.center, radius=tr.radius,
        extra=_quad_extras(model, tr.center, tr.radius),
    )
    info = {
        "pred_center": model.predict(tr.center),
        "pred_new": model.predict(x),
        "boundary": _boundary_flag(x, tr.center, tr.radius),
        "f_model": model,
        "g_models": [],
    }
    return x, info


def lsqm_step(data: Dataset, bounds: Bounds, tr: TrustRegionState, seed: int = 0):
    """Minimize the PSD-projected quadratic surrogate over ball and bounds."""
    if data.n < bounds.dim + 1:
        raise ConfigError("lsqm_step needs at least n_x + 1 samples")
    return _lsqm_impl(data, bounds, tr, seed)[0]


def _penalized_merit(f_vals, g_list, penalties):
    merit = np.array(f_vals, dtype=float, copy=True)
    for i, g in enumerate(g_list):
        merit += penalties[min(i, len(penalties) - 1)] * np.maximum(g, 0.0)
    return merit


def _cuatro_impl(data, bounds, tr, merit, seed, n_pool=None, refine_steps=20):
    f_model = fit_quadratic(data, psd=True)
    n_g = 0 if data.G is None else data.G.shape[1]
    g_models = [
        fit_quadratic(Dataset(data.X, data.G[:, i]), psd=True) for i in range(n_g)
    ]
    n_pool = n_pool or 100 * bounds.dim

    def keys(X):
        f_hat = f_model.predict(X)
        if not g_models:
            return _plain_keys(f_hat)
        viol = np.zeros(X.shape[0])
        for gm in g_models:
            viol += np.maximum(gm.predict(X), 0.0)
        infeasible = (viol > 0).astype(int)
        return infeasible, np.where(infeasible == 0, f_hat, viol)

    x = _pool_minimize(
        keys, bounds, seed, n_pool, refine_steps,
        center=tr.center, radius=tr.radius,
        extra=_quad_extras(f_model, tr.center, tr.radius),
    )
    pen = merit.penalties if merit else np.array([100.0])
    info = {
        "pred_center": _penalized_merit(
            [f_model.predict(tr.center)], [[gm.predict(tr.center)] for gm in g_models], pen
        )[0],
        "pred_new": _penalized_merit(
            [f_model.predict(x)], [[gm.predict(x)] for gm in g_models], pen
        )[0],
        "boundary": _boundary_flag(x, tr.center, tr.radius),
        "f_model": f_model,
        "g_models": g_models,
    }
    return x, info


def cuatro_step(
    data: Dataset, bounds: Bounds, tr: TrustRegionState,
    merit: Optional[MeritConfig] = None, seed: int = 0,
):
    """Feasibility-first minimization of PSD quadratic surrogates in the ball."""
    if data.n < bounds.dim + 1:
        raise ConfigError("cuatro_step needs at least n_x + 1 samples")
    return _cuatro_impl(data, bounds, tr, merit or MeritConfig(), seed)[0]


def _cobyqa_impl(data, bounds, tr, merit, seed, n_pool=None, refine_steps=20):
    f_model = fit_quadratic(data)
    n_g = 0 if data.G is None else data.G.shape[1]
    g_models = [fit_quadratic(Dataset(data.X, data.G[:, i])) for i in range(n_g)]
    pen = merit.penalties
    n_pool = n_pool or 100 * bounds.dim

    def merit_values(X):
        f_hat = f_model.predict(X)
        return _penalized_merit(f_hat, [gm.predict(X) for gm in g_models], pen)

    def keys(X):
        return _plain_keys(merit_values(X))

    x = _pool_minimize(
        keys, bounds, seed, n_pool, refine_steps,
        center=tr.center, radius=tr.radius,
        extra=_quad_extras(f_model, tr.center, tr.radius),
    )
    info = {
        "pred_center": float(merit_values(tr.center[None, :])[0]),
        "pred_new": float(merit_values(x[None, :])[0]),
        "boundary": _boundary_flag(x, tr.center, tr.radius),
        "f_model": f_model,
        "g_models": g_models,
    }
    return x, info


def cobyqa_step(
    data: Dataset, bounds: Bounds, tr: TrustRegionState,
    merit: Optional[MeritConfig] = None, seed: int = 0,
):
    """Minimize f_hat + sum_i rho_i [g_hat_i]_+ over the trust-region ball."""
    if data.n < bounds.dim + 1:
        raise ConfigError("cobyqa_step needs at least n_x + 1 samples")
    n_g = 0 if data.G is None else data.G.shape[1]
    merit = merit or MeritConfig.for_constraints(n_g)
    return _cobyqa_impl(data, bounds, tr, merit, seed)[0]


def cobyla_merit(f_value: float, g_values, penalty: float) -> float:
    """Linear-method merit: f + penalty * [max_i g_i]_+ (0 when unconstrained)."""
    g = np.atleast_1d(np.asarray(g_values, dtype=float))
    if g.size == 0:
        return float(f_value)
    return float(f_value + penalty * max(0.0, float(np.max(g))))


def _cobyla_impl(data, bounds, tr, merit, seed, n_pool=None, refine_steps=20):
    f_model = fit_linear(data)
    n_g = 0 if data.G is None else data.G.shape[1]
    g_models = [fit_linear(Dataset(data.X, data.G[:, i])) for i in range(n_g)]
    mu = float(np.max(merit.penalties))
    half = tr.radius / 2.0
    n_pool = n_pool or 100 * bounds.dim

    def merit_values(X):
        f_hat = f_model.predict(X)
        if not g_models:
            return np.asarray(f_hat, dtype=float)
        worst = np.full(X.shape[0], -np.inf)
        for gm in g_models:
            worst = np.maximum(worst, gm.predict(X))
        return f_hat + mu * np.maximum(worst, 0.0)

    def keys(X):
        return _plain_keys(merit_values(X))

    extras = [tr.center]
    x_c = _cauchy_point(f_model.g_hat, tr.center, half)
    if x_c is not None:
        extras.append(x_c)
    x = _pool_minimize(
        keys, bounds, seed, n_pool, refine_steps,
        center=tr.center, radius=half, extra=extras,
    )
    info = {
        "pred_center": float(merit_values(tr.center[None, :])[0]),
        "pred_new": float(merit_values(x[None, :])[0]),
        "boundary": _boundary_flag(x, tr.center, half),
        "f_model": f_model,
        "g_models": g_models,
    }
    return x, info


def cobyla_step(
    data: Dataset, bounds: Bounds, tr: TrustRegionState,
    merit: Optional[MeritConfig] = None, seed: int = 0,
):
    """Linear-surrogate step within half the trust-region radius.

    ``data`` holds the current simplex of n_x + 1 points (plus constraint
    observations when present).
    """
    n_g = 0 if data.G is None else data.G.shape[1]
    merit = merit or MeritConfig.for_constraints(n_g)
    return _cobyla_impl(data, bounds, tr, merit, seed)[0]


def trust_region_update(
    tr: TrustRegionState,
    predicted_reduction: float,
    actual_reduction: float,
    step_on_boundary: bool,
    new_point: Optional[np.ndarray] = None,
    feasible: bool = True,
) -> TrustRegionState:
    """Ratio-based radius adaptation and center move.

    ratio >= 0.75 on the boundary doubles the radius (capped); ratio < 0.25
    or no actual reduction halves it (floored); the center moves to
    ``new_point`` only on actual improvement by a feasible point.
    """
    ratio = (
        actual_reduction / predicted_reduction
        if predicted_reduction > 0
        else -math.inf
    )
    radius = tr.radius
    if ratio >= 0.75 and step_on_boundary:
        radius = min(radius * 2.0, tr.max_radius)
    elif ratio < 0.25 or actual_reduction <= 0:
        radius = max(radius * 0.5, tr.min_radius)
    success = actual_reduction > 0
    center = tr.center
    if success and feasible and new_point is not None:
        center = np.asarray(new_point, dtype=float)
    return TrustRegionState(
        center=center,
        radius=radius,
        min_radius=tr.min_radius,
        max_radius=tr.max_radius,
        success_count=tr.success_count + 1 if success else 0,
        fail_count=0 if success else tr.fail_count + 1,
    )


# ------------------------------------------------------------------ DYCORS


def dycors_select_probability(state: DycorsState, dim: int) -> float:
    """Coordinate perturbation probability, decaying logarithmically."""
    denom = math.log(max(state.max_iterations, 2))
    decay = 1.0 - math.log(state.iteration + 1) / denom
    return min(20.0 / dim, 1.0) * max(decay, 0.0)


def _unit_rescale(v: np.ndarray) -> np.ndarray:
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi - lo < 1e-12:
        return np.ones_like(v)
    return (v - lo) / (hi - lo)


def dycors_step(
    data: Dataset, bounds: Bounds, state: DycorsState, incumbent, seed: int = 0,
) -> np.ndarray:
    """Perturb incumbent coordinates stochastically, score by RBF value and distance."""
    incumbent = np.asarray(incumbent, dtype=float)
    d = bounds.dim
    n_trials = 100 * d
    rng = substream(seed, "dycors")
    p = dycors_select_probability(state, d)
    mask = rng.uniform(size=(n_trials, d)) < p
    forced = rng.integers(0, d, size=n_trials)
    noise = rng.standard_normal((n_trials, d))
    empty = ~mask.any(axis=1)
    mask[empty, forced[empty]] = True  # at least one coordinate moves

    sigma = state.step_size * bounds.width
    trials = incumbent + mask * (noise * sigma)
    trials = np.clip(trials, bounds.lower, bounds.upper)

    try:
        model = fit_rbf(data)
    except SurrogateFitError as exc:
        logger.warning("RBF fit failed (%s); random perturbation proposal", exc)
        return trials[0]

    v_f = _unit_rescale(rbf_predict(model, trials))
    diff = trials[:, None, :] - data.X[None, :, :]
    nearest = np.sqrt(np.sum(diff**2, axis=2)).min(axis=1)
    v_d = _unit_rescale(nearest)
    w = DYCORS_WEIGHTS[state.weight_cycle_index % len(DYCORS_WEIGHTS)]
    score = w * v_f + (1.0 - w) * (1.0 - v_d)
    return trials[int(np.argmin(score))]


def dycors_update(state: DycorsState, success: bool) -> DycorsState:
    """Advance counters; 3 straight successes double the step, 5 failures halve it."""
    step = state.step_size
    succ, fail = state.success_count, state.fail_count
    if success:
        succ, fail = succ + 1, 0
        if succ >= 3:
            step = min(step * 2.0, state.initial_step_size)  # capped at initial
            succ = 0
    else:
        succ, fail = 0, fail + 1
        if fail >= 5:
            step = max(step * 0.5, 1e-3 * state.initial_step_size)
            fail = 0
    return replace(
        state,
        iteration=min(state.iteration + 1, state.max_iterations),
        step_size=step,
        weight_cycle_index=state.weight_cycle_index + 1,
        success_count=succ,
        fail_count=fail,
    )


# ------------------------------------------------------------------ runner


def initial_design_size(algorithm: str, dim: int) -> int:
    if algorithm in ("lsqm", "cuatro", "cobyla", "cobyqa"):
        return dim + 1
    return max(5, 2 * dim)


def _observed_merit(y, g, penalties, linear=False):
    g = np.atleast_1d(np.asarray(g, dtype=float))
    if g.size == 0:
        return float(y)
    if linear:
        return float(y + float(np.max(penalties)) * max(0.0, float(np.max(g))))
    return float(y + np.sum(penalties[: g.size] * np.maximum(g, 0.0)))


class _BoStrategy:
    def __init__(self, problem: Problem, acquisition: AcquisitionConfig, constrained: bool):
        self.problem = problem
        self.acq = acquisition
        self.constrained = constrained
        self.merit = MeritConfig.for_constraints(problem.n_constraints)
        self.n_init = initial_design_size("bo", problem.dim)

    def start(self, data: Dataset):
        pass

    def propose(self, data: Dataset, seed: int):
        if self.constrained:
            return propose_cbo(
                data, self.problem.bounds, self.acq, self.merit, seed
            )
        return propose_bo(data, self.problem.bounds, self.acq, seed)

    def update(self, x, y, g):
        pass


class _TrustRegionStrategy:
    """Shared runner-side state for lsqm, cuatro, and cobyqa."""

    def __init__(self, problem: Problem, kind: str, merit: Optional[MeritConfig]):
        self.problem = problem
        self.kind = kind
        n_g = problem.n_constraints
        self.merit = merit or MeritConfig.for_constraints(n_g)
        self.n_init = initial_design_size(kind, problem.dim)
        self.tr: Optional[TrustRegionState] = None
        self.center_y = math.inf
        self.center_g = np.empty(0)
        self._info = None

    def _initial_radius(self) -> TrustRegionState:
        width = float(np.max(self.problem.bounds.width))
        return TrustRegionState(
            center=np.zeros(self.problem.dim),
            radius=0.1 * width,
            min_radius=1e-6,
            max_radius=width,
        )

    def start(self, data: Dataset):
        i = _best_index(data.y, data.G, self.merit.feasibility_threshold)
        tr = self._initial_radius()
        self.tr = replace(tr, center=data.X[i].copy())
        self.center_y = float(data.y[i])
        self.center_g = (
            data.G[i].copy() if data.G is not None else np.empty(0)
        )

    def propose(self, data: Dataset, seed: int):
        impl = {"lsqm": _lsqm_impl, "cuatro": _cuatro_impl, "cobyqa": _cobyqa_impl}[
            self.kind
        ]
        if self.kind == "lsqm":
            x, info = impl(data, self.problem.bounds, self.tr, seed)
        else:
            x, info = impl(data, self.problem.bounds, self.tr, self.merit, seed)
        self._info = info
        return x

    def update(self, x, y, g):
        info = self._info
        pen = self.merit.penalties
        predicted = float(info["pred_center"] - info["pred_new"])
        actual = _observed_merit(self.center_y, self.center_g, pen) - _observed_merit(
            y, g, pen
        )
        g_arr = np.atleast_1d(np.asarray(g, dtype=float))
        feasible = g_arr.size == 0 or float(np.max(g_arr)) <= self.merit.feasibility_threshold
        moved = actual > 0 and feasible
        self.tr = trust_region_update(
            self.tr, predicted, actual, info["boundary"], new_point=x, feasible=feasible
        )
        if moved:
            self.center_y = float(y)
            self.center_g = g_arr.copy()
        if self.kind in ("cuatro", "cobyqa") and g_arr.size and float(np.max(g_arr)) > self.merit.feasibility_threshold:
            grown = np.minimum(
                self.merit.penalties * self.merit.penalty_growth,
                self.merit.penalty_cap,
            )
            self.merit = replace(self.merit, penalties=grown)


class _CobylaStrategy:
    def __init__(self, problem: Problem, merit: Optional[MeritConfig]):
        self.problem = problem
        self.merit = merit or MeritConfig.for_constraints(problem.n_constraints)
        self.n_init = problem.dim + 1
        self.tr: Optional[TrustRegionState] = None
        self.simplex: list = []  # [(x, y, g)]
        self.center_y = math.inf
        self.center_g = np.empty(0)
        self._info = None
        self._pending: list = []
        self._rebuilt: list = []

    def _vertex_merit(self, y, g):
        return _observed_merit(y, g, self.merit.penalties, linear=True)

    def start(self, data: Dataset):
        G = data.G
        self.simplex = [
            (
                data.X[i].copy(),
                float(data.y[i]),
                G[i].copy() if G is not None else np.empty(0),
            )
            for i in range(data.n)
        ]
        i = _best_index(data.y, G, self.merit.feasibility_threshold)
        width = float(np.max(self.problem.bounds.width))
        self.tr = TrustRegionState(
            center=data.X[i].copy(), radius=0.1 * width,
            min_radius=1e-6, max_radius=width,
        )
        self.center_y = float(data.y[i])
        self.center_g = G[i].copy() if G is not None else np.empty(0)

    def _degenerate(self) -> bool:
        V = np.array([v[0] for v in self.simplex])
        E = V[1:] - V[0]
        if np.linalg.matrix_rank(E) < self.problem.dim:
            return True
        return np.linalg.cond(E) > 1e8

    def _queue_rebuild(self):
        # fresh right-angled simplex around the incumbent at the current radius
        b = self.problem.bounds
        c = self.tr.center
        r = self.tr.radius
        pts = []
        for i in range(self.problem.dim):
            room_up = b.upper[i] - c[i]
            room_dn = c[i] - b.lower[i]
            length = min(r, max(room_up, room_dn))
            direction = 1.0 if room_up >= room_dn else -1.0
            p = c.copy()
            p[i] += direction * max(length, 1e-8)
            pts.append(p)
        self._pending = pts
        self._rebuilt = [(c.copy(), self.center_y, self.center_g.copy())]

    def propose(self, data: Dataset, seed: int):
        if not self._pending and self._rebuilt == [] and self._degenerate():
            self._queue_rebuild()
        if self._pending:
            self._info = None
            return self._pending[0]
        X = np.array([v[0] for v in self.simplex])
        y = np.array([v[1] for v in self.simplex])
        G = (
            np.array([v[2] for v in self.simplex])
            if self.simplex[0][2].size
            else None
        )
        x, info = _cobyla_impl(
            Dataset(X, y, G), self.problem.bounds, self.tr, self.merit, seed
        )
        self._info = info
        return x

    def update(self, x, y, g):
        g_arr = np.atleast_1d(np.asarray(g, dtype=float))
        if self._pending:
            self._pending.pop(0)
            self._rebuilt.append((np.asarray(x, dtype=float), float(y), g_arr.copy()))
            if not self._pending:
                self.simplex = self._rebuilt
                self._rebuilt = []
            return
        info = self._info
        predicted = float(info["pred_center"] - info["pred_new"])
        actual = self._vertex_merit(self.center_y, self.center_g) - self._vertex_merit(
            y, g_arr
        )
        feasible = (
            g_arr.size == 0
            or float(np.max(g_arr)) <= self.merit.feasibility_threshold
        )
        moved = actual > 0 and feasible
        # replace the worst non-center vertex with the evaluated point
        center = self.tr.center
        merits = [self._vertex_merit(v[1], v[2]) for v in self.simplex]
        order = np.argsort(merits)[::-1]
        for idx in order:
            if not np.array_equal(self.simplex[idx][0], center):
                self.simplex[idx] = (np.asarray(x, dtype=float), float(y), g_arr.copy())
                break
        self.tr = trust_region_update(
            self.tr, predicted, actual, info["boundary"], new_point=x, feasible=feasible
        )
        if moved:
            self.center_y = float(y)
            self.center_g = g_arr.copy()
        self._rebuilt = []


class _DycorsStrategy:
    def __init__(self, problem: Problem, budget: int):
        self.problem = problem
        self.n_init = initial_design_size("dycors", problem.dim)
        self.state: Optional[DycorsState] = None
        self.budget = budget
        self.incumbent_x = None
        self.incumbent_y = math.inf

    def start(self, data: Dataset):
        steps = max(self.budget - self.n_init, 1)
        self.state = DycorsState(
            iteration=0, max_iterations=steps, step_size=0.2,
            initial_step_size=0.2,
        )
        i = int(np.argmin(data.y))
        self.incumbent_x = data.X[i].copy()
        self.incumbent_y = float(data.y[i])

    def propose(self, data: Dataset, seed: int):
        return dycors_step(
            data, self.problem.bounds, self.state, self.incumbent_x, seed
        )

    def update(self, x, y, g):
        success = y < self.incumbent_y
        if success:
            self.incumbent_x = np.asarray(x, dtype=float)
            self.incumbent_y = float(y)
        self.state = dycors_update(self.state, success)


def _make_strategy(algorithm, problem, budget, acquisition, merit):
    if algorithm == "bo":
        return _BoStrategy(problem, acquisition or AcquisitionConfig(), constrained=False)
    if algorithm == "cbo":
        if problem.n_constraints < 1:
            raise ConfigError("cbo requires a constrained problem")
        return _BoStrategy(problem, acquisition or AcquisitionConfig(), constrained=True)
    if algorithm in ("lsqm", "cuatro", "cobyqa"):
        return _TrustRegionStrategy(problem, algorithm, merit)
    if algorithm == "cobyla":
        return _CobylaStrategy(problem, merit)
    if algorithm == "dycors":
        return _DycorsStrategy(problem, budget)
    raise ConfigError(
        f"unknown algorithm '{algorithm}'; choose from {', '.join(ALGORITHMS)}"
    )


def run_optimizer(
    algorithm: str,
    problem: Problem,
    budget: int,
    seed: int,
    acquisition: Optional[AcquisitionConfig] = None,
    merit: Optional[MeritConfig] = None,
) -> Trajectory:
    """Run one optimizer for exactly ``budget`` evaluations.

    The run starts with a Latin hypercube design, then loops
    propose -> clip -> evaluate -> update. Internal optimizer failures spend
    the remaining budget on random search (logged in ``trajectory.meta``), so
    the returned trajectory always has exactly ``budget`` evaluations.
    """
    algorithm = str(algorithm).lower()
    strategy = _make_strategy(algorithm, problem, budget, acquisition, merit)
    if budget < strategy.n_init:
        raise ConfigError(
            f"budget {budget} is below the initial design size {strategy.n_init}"
        )
    traj = Trajectory(budget=budget, seed=seed)
    noise_rng = substream(seed, "noise")
    X0 = latin_hypercube(problem.bounds, strategy.n_init, derive_seed(seed, "init"))
    for x in X0:
        evaluate(problem, x, noise_rng, trajectory=traj)
    strategy.start(Dataset.from_trajectory(traj))

    k = 0
    while len(traj) < budget:
        step_seed = derive_seed(seed, "step", k)
        try:
            x = strategy.propose(Dataset.from_trajectory(traj), step_seed)
        except Exception as exc:  # internal failure: spend the rest randomly
            logger.warning(
                "%s failed at iteration %d (%s); random search for remaining budget",
                algorithm, k, exc,
            )
            traj.meta["fallback_at"] = len(traj) + 1
            traj.meta["fallback_reason"] = f"{type(exc).__name__}: {exc}"
            fb = substream(seed, "fallback")
            while len(traj) < budget:
                x_rand = fb.uniform(problem.bounds.lower, problem.bounds.upper)
                evaluate(problem, x_rand, noise_rng, trajectory=traj)
            break
        ev = evaluate(problem, x, noise_rng, trajectory=traj)
        strategy.update(ev.x, ev.y, ev.g)
        k += 1
    return traj
