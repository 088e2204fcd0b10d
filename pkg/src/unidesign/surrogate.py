"""Gaussian Kriging metamodels with polynomial trends, and the MSE harness.

The model is y(x) = b(x)' beta + z(x) with b a polynomial basis (poly0 =
constant, poly1 = linear, poly2 = full quadratic with cross terms) and z a
stationary Gaussian process with anisotropic squared-exponential correlation

    R(x, x') = prod_k exp(-theta_k (x_k - x'_k)^2).

Models work in the unit cube: training designs live in [0,1]^s and the MSE
harness maps between experiment bounds and the cube.  The correlation scales
theta are chosen by maximizing the profiled log-likelihood (beta and sigma^2
concentrated out) with a bounded Nelder-Mead search in log space from
log-spaced multi-starts; a small nugget keeps the Cholesky factorization
positive definite while preserving near-interpolation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import cholesky, qr, solve_triangular
from scipy.optimize import minimize

from .benchfns import TestFunction, normalize_bounds, scale_design
from .discrepancy import as_design_matrix
from . import sampling

__all__ = [
    "TrendBasis",
    "basis_matrix",
    "KrigingModel",
    "kriging_fit",
    "kriging_predict",
    "evaluate_mse",
    "average_mse_over_samples",
]

TrendBasis = Literal["poly0", "poly1", "poly2"]

DEFAULT_NUGGET = 1e-10
DEFAULT_THETA_BOUNDS = (1e-2, 1e2)
_MULTISTARTS = 8


def basis_matrix(points: np.ndarray, basis: str) -> np.ndarray:
    """Trend design matrix: rows b(x)' for the requested polynomial basis."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    n, s = x.shape
    cols = [np.ones((n, 1))]
    if basis in ("poly1", "poly2"):
        cols.append(x)
    elif basis != "poly0":
        raise ValueError(f"unknown basis {basis!r}; expected poly0, poly1 or poly2")
    if basis == "poly2":
        for k in range(s):
            cols.append(x[:, k : k + 1] * x[:, k:])
    return np.hstack(cols)


def _correlation(a: np.ndarray, b: np.ndarray, theta: np.ndarray) -> np.ndarray:
    d2 = (a[:, None, :] - b[None, :, :]) ** 2
    return np.exp(-(d2 @ theta))


@dataclass
class KrigingModel:
    """Fitted Kriging state; immutable after fitting, safe for concurrent predict."""

    x_train: np.ndarray
    y_train: np.ndarray
    basis: str
    beta: np.ndarray
    theta: np.ndarray
    sigma2: float
    chol: np.ndarray
    gamma: np.ndarray
    nugget: float
    log_likelihood: float

    @property
    def n(self) -> int:
        return self.x_train.shape[0]

    @property
    def s(self) -> int:
        return self.x_train.shape[1]


def _profiled_fit(x, y, f, theta, nugget):
    """GLS solve for fixed theta; returns parameters and the profiled NLL."""
    n = len(y)
    r = _correlation(x, x, theta) + nugget * np.eye(n)
    chol_l = cholesky(r, lower=True)
    ft = solve_triangular(chol_l, f, lower=True)
    yt = solve_triangular(chol_l, y, lower=True)
    q, g = qr(ft, mode="economic")
    beta = solve_triangular(g, q.T @ yt, lower=False)
    rho = yt - ft @ beta
    sigma2 = float(rho @ rho) / n
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol_l))))
    nll = n * np.log(max(sigma2, 1e-300)) + logdet
    return chol_l, beta, rho, sigma2, nll


def kriging_fit(
    design,
    y,
    basis: str = "poly0",
    theta_bounds: tuple[float, float] = DEFAULT_THETA_BOUNDS,
    nugget: float = DEFAULT_NUGGET,
    theta=None,
) -> KrigingModel:
    """Fit a Kriging model on a unit-cube design by profiled maximum likelihood.

    The theta search runs a bounded Nelder-Mead in log(theta) space from
    ``_MULTISTARTS`` log-spaced isotropic starts and keeps the best of all
    starts and their initial points, so the returned likelihood is never
    worse than any start.  Fully deterministic.  Passing ``theta`` skips the
    search and fits the generalized least squares model at those scales.

    Raises ``ValueError`` for duplicate training rows (singular correlation)
    or when n <= trend size (underdetermined generalized least squares).
    """
    x = as_design_matrix(design)
    y = np.asarray(y, dtype=float).reshape(-1)
    n, s = x.shape
    if y.shape != (n,):
        raise ValueError(f"y must have length n={n}, got {y.shape}")
    if theta_bounds[0] <= 0 or theta_bounds[0] >= theta_bounds[1]:
        raise ValueError("theta_bounds must be positive with low < high")
    if len(np.unique(x, axis=0)) != n:
        raise ValueError("duplicate training rows make the correlation matrix singular")
    f = basis_matrix(x, basis)
    if n <= f.shape[1]:
        raise ValueError(
            f"need n > {f.shape[1]} runs for the {basis} trend, got n={n}"
        )

    lb, ub = np.log(theta_bounds[0]), np.log(theta_bounds[1])

    def nll_at(log_theta: np.ndarray) -> float:
        scales = np.exp(np.clip(log_theta, lb, ub))
        try:
            return _profiled_fit(x, y, f, scales, nugget)[4]
        except np.linalg.LinAlgError:
            return np.inf

    if theta is not None:
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if theta.shape != (s,) or np.any(theta <= 0):
            raise ValueError(f"theta must be {s} positive scales")
    else:
        best_log_theta = None
        best_nll = np.inf
        for t0 in np.geomspace(theta_bounds[0], theta_bounds[1], _MULTISTARTS):
            start = np.full(s, np.log(t0))
            for cand in (start, None):
                if cand is None:
                    res = minimize(
                        nll_at,
                        start,
                        method="Nelder-Mead",
                        options={"xatol": 1e-4, "fatol": 1e-10, "maxiter": 400 * s},
                    )
                    cand = res.x
                val = nll_at(cand)
                if val < best_nll:
                    best_nll = val
                    best_log_theta = np.clip(cand, lb, ub)
        if best_log_theta is None:
            raise np.linalg.LinAlgError("no admissible theta found")
        theta = np.exp(best_log_theta)
    chol_l, beta, rho, sigma2, nll = _profiled_fit(x, y, f, theta, nugget)
    gamma = solve_triangular(chol_l.T, rho, lower=False)
    # gamma solves R gamma = y - F beta through the decorrelated residual
    return KrigingModel(
        x_train=x.copy(),
        y_train=y.copy(),
        basis=basis,
        beta=beta,
        theta=theta,
        sigma2=sigma2,
        chol=chol_l,
        gamma=gamma,
        nugget=nugget,
        log_likelihood=-0.5 * nll,
    )


def kriging_predict(model: KrigingModel, points) -> np.ndarray:
    """BLUP predictions b(x)' beta + r(x)' R^-1 (y - F beta) at given points.

    Points outside the unit cube are evaluated but flagged with a
    ``RuntimeWarning`` (trend extrapolation dominates far away).
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    if p.shape[1] != model.s:
        raise ValueError(f"points must have {model.s} columns, got {p.shape[1]}")
    outside = np.count_nonzero((p < 0.0) | (p > 1.0))
    if outside:
        warnings.warn(
            f"{outside} coordinate(s) outside the unit cube: extrapolating",
            RuntimeWarning,
            stacklevel=2,
        )
    r = _correlation(p, model.x_train, model.theta)
    return basis_matrix(p, model.basis) @ model.beta + r @ model.gamma


def evaluate_mse(
    design,
    fn: TestFunction,
    bounds=None,
    basis: str = "poly0",
    num_test_points: int = 1000,
    seed: int = 0,
    test_points=None,
) -> tuple[float, float]:
    """Prediction error of a Kriging fit on a design, wood-style protocol.

    Scales the unit-cube design to the experiment bounds, evaluates ``fn``,
    fits the requested trend, then scores mean squared prediction error on
    ``num_test_points`` uniform points in the bounds (drawn with ``seed``).
    Returns (mse, rmse).  ``test_points`` overrides the drawn unit-cube test
    set (harness hook; e.g. re-scoring at the training points).
    """
    x = as_design_matrix(design)
    bounds_arr = normalize_bounds(bounds if bounds is not None else fn.bounds, x.shape[1])
    y = np.asarray(fn(scale_design(x, bounds_arr)), dtype=float)
    model = kriging_fit(x, y, basis)
    if test_points is None:
        if num_test_points < 1:
            raise ValueError("num_test_points must be >= 1")
        rng = np.random.default_rng(seed)
        test_points = rng.random((num_test_points, x.shape[1]))
    test_points = np.atleast_2d(np.asarray(test_points, dtype=float))
    y_true = np.asarray(fn(scale_design(test_points, bounds_arr)), dtype=float)
    err = kriging_predict(model, test_points) - y_true
    mse = float(np.mean(err**2))
    return mse, float(np.sqrt(mse))


def average_mse_over_samples(
    sampler: str,
    fn: TestFunction,
    n: int,
    s: int,
    bounds=None,
    basis: str = "poly0",
    num_test_points: int = 1000,
    seed: int = 0,
    reps: int = 10,
) -> tuple[float, float]:
    """Average evaluate_mse over ``reps`` seeded LHS or MLHS samples.

    Sample k uses sampler seed ``seed + k`` while every repetition is scored
    on the same test set (drawn from ``seed``), so designs stay comparable.
    Returns (mean mse, mean rmse).
    """
    if sampler not in ("lhs", "mlhs"):
        raise ValueError(f"sampler must be 'lhs' or 'mlhs', got {sampler!r}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    draw = sampling.lhs if sampler == "lhs" else sampling.mlhs
    mses = []
    rmses = []
    for k in range(reps):
        design = draw(n, s, seed + k)
        mse, rmse = evaluate_mse(
            design, fn, bounds=bounds, basis=basis,
            num_test_points=num_test_points, seed=seed,
        )
        mses.append(mse)
        rmses.append(rmse)
    return float(np.mean(mses)), float(np.mean(rmses))
