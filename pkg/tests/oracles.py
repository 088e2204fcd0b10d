"""Independent oracles: naive CD2 translation and finite differences.

These deliberately mirror the defining formulas with plain loops and stay
independent of the vectorized/cached production paths they are used to check.
"""

import numpy as np

from unidesign import cd2


def cd2_reference(design) -> float:
    """Literal triple-loop evaluation of the squared centered L2-discrepancy."""
    x = np.asarray(design, dtype=float)
    n, s = x.shape
    sum1 = 0.0
    for i in range(n):
        prod = 1.0
        for k in range(s):
            a = abs(x[i, k] - 0.5)
            prod *= 1.0 + 0.5 * a - 0.5 * a * a
        sum1 += prod
    sum2 = 0.0
    for i in range(n):
        for j in range(n):
            prod = 1.0
            for k in range(s):
                prod *= (
                    1.0
                    + 0.5 * abs(x[i, k] - 0.5)
                    + 0.5 * abs(x[j, k] - 0.5)
                    - 0.5 * abs(x[i, k] - x[j, k])
                )
            sum2 += prod
    return (13.0 / 12.0) ** s - (2.0 / n) * sum1 + sum2 / n**2


def central_difference_gradient(design, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of CD2, coordinate by coordinate."""
    x = np.asarray(design, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            plus = x.copy()
            minus = x.copy()
            plus[i, j] += h
            minus[i, j] -= h
            grad[i, j] = (cd2(plus) - cd2(minus)) / (2.0 * h)
    return grad


def gradient_relative_error(
    analytic: np.ndarray, finite: np.ndarray, floor: float = 1e-3
) -> float:
    """Max relative deviation with the denominator floored at ``floor``.

    Central differences with h = 1e-6 on CD2 resolve gradient entries only
    down to ~1e-10 absolute, so raw relative error is noise-dominated for
    near-stationary coordinates; the floor turns the check into an absolute
    bound of floor * tolerance there while keeping full relative strength
    everywhere the gradient is meaningfully nonzero.
    """
    denom = np.maximum(np.abs(finite), floor)
    return float(np.max(np.abs(analytic - finite) / denom))


def off_kink_design(n: int, s: int, seed: int, gap: float = 1e-3) -> np.ndarray:
    """Random design whose coordinates stay >= gap from 0.5 and column-mates.

    Columns draw without replacement from a 2*gap-spaced grid that excludes
    the band around 0.5, so finite differences never straddle a kink.
    """
    grid = np.arange(2 * gap, 1.0 - gap, 2 * gap)
    grid = grid[np.abs(grid - 0.5) >= 2 * gap]
    if len(grid) < n:
        raise ValueError("grid too coarse for the requested n")
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.choice(grid, size=n, replace=False) for _ in range(s)])
