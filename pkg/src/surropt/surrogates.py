"""Surrogate models: Gaussian process, quadratic, linear, and cubic RBF.

All fits consume a :class:`~surropt.core.Dataset` (rows are samples) and
return immutable fitted models with cheap predict contracts. The GP uses a
squared-exponential kernel with per-dimension lengthscales on standardized
targets; hyperparameters are chosen by maximizing the log marginal likelihood
with a seeded multi-start search plus coordinate-wise golden-section
refinement (derivative-free, deterministic under seed).

The quadratic fit optionally projects its Hessian onto the PSD cone by
eigenvalue clipping; this replaces a semidefinite-programming formulation to
keep the toolkit dependency-free while preserving surrogate convexity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import Dataset, substream

__all__ = [
    "SurrogateFitError",
    "GpModel",
    "QuadModel",
    "LinModel",
    "RbfModel",
    "fit_gp",
    "gp_from_hyperparameters",
    "gp_posterior",
    "gp_log_marginal_likelihood",
    "fit_quadratic",
    "psd_project",
    "fit_linear",
    "fit_rbf",
    "rbf_predict",
]

_DUPLICATE_TOL = 1e-10
_JITTERS = (0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)


class SurrogateFitError(RuntimeError):
    """Raised when a surrogate cannot be fitted (singular or non-PD system)."""


def _merge_duplicates(X: np.ndarray, y: np.ndarray, tol: float = _DUPLICATE_TOL):
    """Merge rows of X closer than ``tol`` (their y values are averaged)."""
    keep_X: list[np.ndarray] = []
    keep_y: list[list[float]] = []
    for xi, yi in zip(X, y):
        for k, xk in enumerate(keep_X):
            if np.linalg.norm(xi - xk) < tol:
                keep_y[k].append(yi)
                break
        else:
            keep_X.append(xi)
            keep_y.append([yi])
    Xm = np.array(keep_X)
    ym = np.array([np.mean(v) for v in keep_y])
    return Xm, ym


def _sq_dists(A: np.ndarray, B: np.ndarray, lengthscales: np.ndarray) -> np.ndarray:
    As = A / lengthscales
    Bs = B / lengthscales
    aa = np.sum(As**2, axis=1)[:, None]
    bb = np.sum(Bs**2, axis=1)[None, :]
    d2 = aa + bb - 2.0 * As @ Bs.T
    return np.maximum(d2, 0.0)


def _se_kernel(A, B, lengthscales, signal_variance):
    return signal_variance * np.exp(-0.5 * _sq_dists(A, B, lengthscales))


def _chol_with_jitter(K: np.ndarray):
    for jitter in _JITTERS:
        try:
            L = np.linalg.cholesky(K + jitter * np.eye(K.shape[0]))
            return L, jitter
        except np.linalg.LinAlgError:
            continue
    raise SurrogateFitError(
        "kernel matrix not positive definite after jitter escalation to 1e-4"
    )


# ------------------------------------------------------------------ GP


@dataclass(frozen=True)
class GpModel:
    """Fitted zero-mean GP on standardized targets (SE-ARD kernel)."""

    X_train: np.ndarray
    y_train: np.ndarray  # standardized
    kernel_lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float  # standardized units
    chol_factor: np.ndarray
    alpha: np.ndarray
    y_mean: float
    y_std: float


def _build_gp(X, y_std_units, lengthscales, signal_variance, noise_variance,
              y_mean, y_scale) -> GpModel:
    K = _se_kernel(X, X, lengthscales, signal_variance)
    K[np.diag_indices_from(K)] += noise_variance
    L, _ = _chol_with_jitter(K)
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, y_std_units))
    return GpModel(
        X_train=X,
        y_train=y_std_units,
        kernel_lengthscales=np.asarray(lengthscales, dtype=float),
        signal_variance=float(signal_variance),
        noise_variance=float(noise_variance),
        chol_factor=L,
        alpha=alpha,
        y_mean=float(y_mean),
        y_std=float(y_scale),
    )


def gp_from_hyperparameters(
    data: Dataset,
    lengthscales,
    signal_variance: float,
    noise_variance: float,
    standardize: bool = True,
) -> GpModel:
    """Construct a GP with fixed hyperparameters (no marginal-likelihood search).

    With ``standardize=False`` the targets are used raw under a zero-mean
    prior, and ``noise_variance``/``signal_variance`` are in output units.
    """
    X, y = _merge_duplicates(data.X, data.y)
    lengthscales = np.broadcast_to(
        np.asarray(lengthscales, dtype=float), (X.shape[1],)
    ).copy()
    if standardize:
        y_mean = float(np.mean(y))
        y_scale = float(np.std(y))
        if y_scale <= 0:
            y_scale = 1.0
        ys = (y - y_mean) / y_scale
        nv = noise_variance / y_scale**2
    else:
        y_mean, y_scale = 0.0, 1.0
        ys = y
        nv = noise_variance
    return _build_gp(X, ys, lengthscales, signal_variance, nv, y_mean, y_scale)


def _gp_lml(X, ys, lengthscales, signal_variance, noise_variance) -> float:
    K = _se_kernel(X, X, lengthscales, signal_variance)
    K[np.diag_indices_from(K)] += noise_variance
    try:
        L, _ = _chol_with_jitter(K)
    except SurrogateFitError:
        return -np.inf
    alpha = np.linalg.solve(L.T, np.linalg.solve(L, ys))
    n = ys.size
    return float(
        -0.5 * ys @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * math.log(2 * math.pi)
    )


def _golden_section(f, lo, hi, iters=16):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def fit_gp(
    data: Dataset,
    noise_variance: Union[str, float] = "estimated",
    seed: int = 0,
) -> GpModel:
    """Fit a GP by maximizing log marginal likelihood on standardized targets.

    ``noise_variance`` is either ``"estimated"`` (fitted alongside the kernel
    hyperparameters) or a fixed float in output units. The search draws 8
    seeded random starts in the log-hyperparameter box and refines the best
    with one coordinate-wise golden-section sweep.
    """
    X, y = _merge_duplicates(data.X, data.y)
    if X.shape[0] < 1:
        raise SurrogateFitError("no samples to fit")
    d = X.shape[1]

    y_mean = float(np.mean(y))
    y_scale = float(np.std(y))
    if y_scale <= 0:
        y_scale = 1.0  # degenerate targets: fall back to unit scale
    ys = (y - y_mean) / y_scale

    widths = X.max(axis=0) - X.min(axis=0)
    widths[widths <= 0] = 1.0

    estimate_noise = isinstance(noise_variance, str)
    if estimate_noise and noise_variance != "estimated":
        raise ValueError("noise_variance must be 'estimated' or a float")
    fixed_nv = None if estimate_noise else max(float(noise_variance), 0.0) / y_scale**2

    # log-space search box: lengthscales, signal variance, optional noise
    lo = np.concatenate([np.log(1e-2 * widths), [math.log(1e-4)]])
    hi = np.concatenate([np.log(1e2 * widths), [math.log(1e4)]])
    if estimate_noise:
        lo = np.concatenate([lo, [math.log(1e-8)]])
        hi = np.concatenate([hi, [math.log(1.0)]])

    def unpack(theta):
        ls = np.exp(theta[:d])
        sv = math.exp(theta[d])
        nv = math.exp(theta[d + 1]) if estimate_noise else fixed_nv
        return ls, sv, nv

    def objective(theta):
        ls, sv, nv = unpack(theta)
        return -_gp_lml(X, ys, ls, sv, nv)

    rng = substream(seed, "gp-hypers")
    starts = rng.uniform(lo, hi, size=(8, lo.size))
    best_theta, best_obj = None, math.inf
    for theta in starts:
        obj = objective(theta)
        if obj < best_obj:
            best_theta, best_obj = theta.copy(), obj
    if best_theta is None or not np.isfinite(best_obj):
        raise SurrogateFitError("all hyperparameter starts failed")

    # coordinate-wise golden-section refinement around the best start
    span = 1.5 * math.log(10.0)
    for k in range(lo.size):
        a = max(lo[k], best_theta[k] - span)
        b = min(hi[k], best_theta[k] + span)

        def along(t, k=k):
            trial = best_theta.copy()
            trial[k] = t
            return objective(trial)

        t_best, f_best = _golden_section(along, a, b)
        if f_best < best_obj:
            best_theta[k] = t_best
            best_obj = f_best

    ls, sv, nv = unpack(best_theta)
    return _build_gp(X, ys, ls, sv, nv, y_mean, y_scale)


def gp_posterior(model: GpModel, x):
    """Posterior mean and variance at ``x`` (de-standardized).

    Accepts a single point (returns two floats) or an (m, d) batch
    (returns two arrays).
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X_query = np.atleast_2d(x)
    k_star = _se_kernel(
        X_query, model.X_train, model.kernel_lengthscales, model.signal_variance
    )
    mu_std = k_star @ model.alpha
    v = np.linalg.solve(model.chol_factor, k_star.T)
    var_std = np.maximum(model.signal_variance - np.sum(v**2, axis=0), 0.0)
    mu = mu_std * model.y_std + model.y_mean
    var = var_std * model.y_std**2
    if single:
        return float(mu[0]), float(var[0])
    return mu, var


def gp_log_marginal_likelihood(model: GpModel) -> float:
    """log p(y | X, theta) of the stored (standardized) training targets."""
    L = model.chol_factor
    n = model.y_train.size
    return float(
        -0.5 * model.y_train @ model.alpha
        - np.sum(np.log(np.diag(L)))
        - 0.5 * n * math.log(2 * math.pi)
    )


# ------------------------------------------------------------------ quadratic


@dataclass(frozen=True)
class QuadModel:
    """Quadratic surrogate f(x) = x'Qx + c'x + b with symmetric Q."""

    Q: np.ndarray
    c: np.ndarray
    b: float

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(x @ self.Q @ x + self.c @ x + self.b)
        return np.einsum("ij,jk,ik->i", x, self.Q, x) + x @ self.c + self.b


def _quad_features(X: np.ndarray) -> np.ndarray:
    n, d = X.shape
    cols = [np.ones(n)]
    cols.extend(X[:, i] for i in range(d))
    for i in range(d):
        for j in range(i, d):
            cols.append(X[:, i] * X[:, j])
    return np.column_stack(cols)


def psd_project(Q: np.ndarray) -> np.ndarray:
    """Frobenius-nearest PSD matrix: symmetrize, clip eigenvalues at zero."""
    S = 0.5 * (Q + Q.T)
    w, V = np.linalg.eigh(S)
    w = np.maximum(w, 0.0)
    P = (V * w) @ V.T
    return 0.5 * (P + P.T)


def fit_quadratic(
    data: Dataset, ridge: float = 1e-8, psd: bool = False
) -> QuadModel:
    """Ridge least-squares quadratic fit; optionally PSD-project the Hessian.

    Underdetermined systems return the minimum-norm ridge solution, so the
    fit is well-posed from n_x + 1 samples onward.
    """
    X = data.X
    y = data.y
    n, d = X.shape
    A = _quad_features(X)
    if ridge > 0:
        A_aug = np.vstack([A, math.sqrt(ridge) * np.eye(A.shape[1])])
        y_aug = np.concatenate([y, np.zeros(A.shape[1])])
        beta, *_ = np.linalg.lstsq(A_aug, y_aug, rcond=None)
    else:
        beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    b = beta[0]
    c = beta[1 : 1 + d].copy()
    Q = np.zeros((d, d))
    k = 1 + d
    for i in range(d):
        for j in range(i, d):
            if i == j:
                Q[i, i] = beta[k]
            else:
                Q[i, j] = Q[j, i] = 0.5 * beta[k]
            k += 1
    if psd:
        Q = psd_project(Q)
    return QuadModel(Q=Q, c=c, b=float(b))


# ------------------------------------------------------------------ linear


@dataclass(frozen=True)
class LinModel:
    """Affine surrogate f(x) = g_hat'x + b."""

    g_hat: np.ndarray
    b: float

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(self.g_hat @ x + self.b)
        return x @ self.g_hat + self.b


def fit_linear(data: Dataset, ridge: float = 0.0) -> LinModel:
    """Least-squares affine fit (ridge-regularized when ridge > 0).

    Interpolates exactly on a non-degenerate simplex of n_x + 1 points.
    """
    X, y = data.X, data.y
    A = np.column_stack([X, np.ones(X.shape[0])])
    if ridge > 0:
        A_aug = np.vstack([A, math.sqrt(ridge) * np.eye(A.shape[1])])
        y_aug = np.concatenate([y, np.zeros(A.shape[1])])
        beta, *_ = np.linalg.lstsq(A_aug, y_aug, rcond=None)
    else:
        beta, *_ = np.linalg.lstsq(A, y, rcond=None)
    return LinModel(g_hat=beta[:-1].copy(), b=float(beta[-1]))


# ------------------------------------------------------------------ cubic RBF


@dataclass(frozen=True)
class RbfModel:
    """Cubic RBF interpolant s(x) = sum_i lambda_i ||x - x_i||^3 + a'x + b."""

    centers: np.ndarray
    lam: np.ndarray
    poly_coeffs: np.ndarray  # [a_1..a_d, b]
    kernel: str = "cubic"


def fit_rbf(data: Dataset) -> RbfModel:
    """Fit the cubic RBF interpolant by solving the saddle system.

    Requires n_d >= n_x + 1 distinct points with a full-rank linear tail;
    rank-deficient or singular systems raise :class:`SurrogateFitError`.
    """
    X, y = _merge_duplicates(data.X, data.y)
    n, d = X.shape
    if n < d + 1:
        raise SurrogateFitError(
            f"cubic RBF needs at least n_x+1={d + 1} distinct points, got {n}"
        )
    P = np.column_stack([X, np.ones(n)])
    if np.linalg.matrix_rank(P) < d + 1:
        raise SurrogateFitError(
            "rank-deficient polynomial tail: sample points are affinely degenerate"
        )
    diff = X[:, None, :] - X[None, :, :]
    R = np.sqrt(np.sum(diff**2, axis=2))
    Phi = R**3
    M = np.zeros((n + d + 1, n + d + 1))
    M[:n, :n] = Phi
    M[:n, n:] = P
    M[n:, :n] = P.T
    rhs = np.concatenate([y, np.zeros(d + 1)])
    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(M)
        raise SurrogateFitError(
            f"singular RBF saddle system (cond={cond:.3e})"
        ) from exc
    return RbfModel(centers=X, lam=sol[:n].copy(), poly_coeffs=sol[n:].copy())


def rbf_predict(model: RbfModel, x):
    """Evaluate the RBF interpolant at a point or an (m, d) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    Xq = np.atleast_2d(x)
    diff = Xq[:, None, :] - model.centers[None, :, :]
    R = np.sqrt(np.sum(diff**2, axis=2))
    a = model.poly_coeffs[:-1]
    b = model.poly_coeffs[-1]
    vals = (R**3) @ model.lam + Xq @ a + b
    return float(vals[0]) if single else vals
