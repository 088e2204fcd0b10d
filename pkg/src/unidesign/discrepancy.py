"""Centered L2-discrepancy: exact evaluation, coordinate gradient, incremental cache.

The squared centered L2-discrepancy of an n x s point set X in [0,1]^s is

    CD2(X) = (13/12)^s - (2/n) sum_i prod_k f1(x_ik)
             + (1/n^2) sum_i sum_j prod_k f2(x_ik, x_jk)

with the two kernels

    f1(x)    = 1 + |x - 1/2|/2 - |x - 1/2|^2 / 2
    f2(a, b) = 1 + |a - 1/2|/2 + |b - 1/2|/2 - |a - b|/2.

Both kernels are >= 1 everywhere on [0,1], which keeps every divide in the
incremental paths well conditioned.

``DiscrepancyCache`` stores the per-row f1 products and the full pairwise f2
kernel so that changing one coordinate re-evaluates CD2 after recomputing a
single kernel row/column.  Preview methods score a candidate change without
mutating the cache; committed updates recompute the affected entries from the
design values, so the cache never drifts from a from-scratch evaluation.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "as_design_matrix",
    "cd2",
    "cd2_gradient",
    "DiscrepancyCache",
    "zero_gradient_solve",
]


def as_design_matrix(values) -> np.ndarray:
    """Validate and return a design as an (n, s) float64 array in [0,1]."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"design must be a 2-D matrix, got ndim={x.ndim}")
    n, s = x.shape
    if n < 1 or s < 1:
        raise ValueError(f"design must have n >= 1 runs and s >= 1 factors, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("design contains non-finite entries")
    if x.min() < 0.0 or x.max() > 1.0:
        raise ValueError("design entries must lie in [0, 1]")
    return x


def cd2(design) -> float:
    """Squared centered L2-discrepancy of a design in [0,1]^s.

    Raw value; tiny negatives from round-off are not clamped.
    """
    x = as_design_matrix(design)
    n, s = x.shape
    a = np.abs(x - 0.5)
    row_products = np.prod(1.0 + 0.5 * a - 0.5 * a * a, axis=1)
    kernel = np.ones((n, n))
    for k in range(s):
        ak = a[:, k]
        kernel *= 1.0 + 0.5 * (ak[:, None] + ak[None, :]) - 0.5 * np.abs(
            x[:, k, None] - x[None, :, k]
        )
    return (13.0 / 12.0) ** s - (2.0 / n) * float(row_products.sum()) + float(
        kernel.sum()
    ) / n**2


def _coordinate_gradient(
    x: float,
    column: np.ndarray,
    p1: float,
    p2: float,
    kernel_row_loo: np.ndarray,
    n: int,
) -> float:
    """Partial derivative of CD2 w.r.t. one coordinate from leave-one-out products.

    ``p1`` / ``p2`` are the products over the other factors of f1 and of
    (1 + |x - 1/2|); ``kernel_row_loo[k]`` is prod_{q != j} f2(x_iq, x_kq).
    sgn(0) = 0 picks a deterministic subgradient at kinks.
    """
    d = x - 0.5
    sc = float(np.sign(d))
    w = 0.5 * sc - 0.5 * np.sign(x - column)
    # remove the k = i term: its leave-one-out product is exactly p2 and its
    # weight is sc/2 because sgn(x - x) = 0
    pair_sum = float(kernel_row_loo @ w) - p2 * 0.5 * sc
    return (
        -(2.0 / n) * p1 * (0.5 * sc - d)
        + p2 * sc / n**2
        + (2.0 / n**2) * pair_sum
    )


def _zero_gradient_recursion(
    x0: float,
    column: np.ndarray,
    p1: float,
    p2: float,
    kernel_row_loo: np.ndarray,
    n: int,
    t_max: int,
) -> float:
    """Fixed-point recursion for the coordinate stationarity equation.

    Freezes the sign terms at the previous iterate, solves the then-linear
    gradient equation, and repeats ``t_max`` times.  The denominator is
    -(2/n) * p1 <= -2/n < 0, so the step is always defined.  The final value
    is clamped into [0, 1].
    """
    b = -(2.0 / n) * p1
    xt = x0
    for _ in range(t_max):
        sc = float(np.sign(xt - 0.5))
        w = 0.5 * sc - 0.5 * np.sign(xt - column)
        pair_sum = float(kernel_row_loo @ w) - p2 * 0.5 * sc
        a = -(2.0 / n) * p1 * 0.5 * sc + p2 * sc / n**2 + (2.0 / n**2) * pair_sum
        xt = a / b + 0.5
    return min(1.0, max(0.0, xt))


def _row_loo_terms(x: np.ndarray, i: int, j: int):
    """Leave-one-out products for row ``i`` without factor ``j`` (O(ns))."""
    n = x.shape[0]
    ai = np.abs(x[i] - 0.5)
    f1_row = 1.0 + 0.5 * ai - 0.5 * ai * ai
    p1 = float(np.prod(f1_row) / f1_row[j])
    g2_row = 1.0 + ai
    p2 = float(np.prod(g2_row) / g2_row[j])
    a = np.abs(x - 0.5)
    # row i against itself collapses exactly to 1 + |x - 1/2| per factor
    f2_all = 1.0 + 0.5 * (ai[None, :] + a) - 0.5 * np.abs(x[i][None, :] - x)
    kernel_row = np.prod(f2_all, axis=1)
    kernel_row_loo = kernel_row / f2_all[:, j]
    return p1, p2, kernel_row_loo, x[:, j].copy(), n


def cd2_gradient(design) -> np.ndarray:
    """Analytic gradient matrix of CD2, entry (i, j) = dCD2/dx_ij.

    Uses the standard sign convention sgn(u) = +1 (u > 0), 0 (u = 0),
    -1 (u < 0); at non-differentiable points (x_ij = 1/2 or column ties)
    sgn(0) = 0 selects a deterministic subgradient.
    """
    x = as_design_matrix(design)
    n, s = x.shape
    a = np.abs(x - 0.5)
    d = x - 0.5
    sc = np.sign(d)

    f1 = 1.0 + 0.5 * a - 0.5 * a * a
    p1 = np.prod(f1, axis=1, keepdims=True) / f1

    g2 = 1.0 + a
    p2 = np.prod(g2, axis=1, keepdims=True) / g2

    kernel = np.ones((n, n))
    for k in range(s):
        ak = a[:, k]
        kernel *= 1.0 + 0.5 * (ak[:, None] + ak[None, :]) - 0.5 * np.abs(
            x[:, k, None] - x[None, :, k]
        )

    grad = -(2.0 / n) * p1 * (0.5 * sc - d) + p2 * sc / n**2
    for j in range(s):
        col = x[:, j]
        aj = a[:, j]
        f2_j = 1.0 + 0.5 * (aj[:, None] + aj[None, :]) - 0.5 * np.abs(
            col[:, None] - col[None, :]
        )
        loo = kernel / f2_j
        w = 0.5 * sc[:, j, None] - 0.5 * np.sign(col[:, None] - col[None, :])
        pair = np.einsum("ik,ik->i", loo, w) - p2[:, j] * 0.5 * sc[:, j]
        grad[:, j] += (2.0 / n**2) * pair
    return grad


def zero_gradient_solve(design, i: int, j: int, t_max: int = 1) -> float:
    """Coordinate value solving dCD2/dx_ij = 0 with sign terms frozen.

    Runs the stationarity recursion ``t_max`` times from the current value
    of x_ij (one step is normally sufficient) and returns the result clamped
    into [0, 1].
    """
    x = as_design_matrix(design)
    n, s = x.shape
    if not (0 <= i < n and 0 <= j < s):
        raise IndexError(f"coordinate ({i}, {j}) out of range for a {n}x{s} design")
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    p1, p2, kernel_row_loo, column, n = _row_loo_terms(x, i, j)
    return _zero_gradient_recursion(x[i, j], column, p1, p2, kernel_row_loo, n, t_max)


class DiscrepancyCache:
    """Cached CD2 state supporting O(ns) single-coordinate re-evaluation.

    Holds the design, its per-row f1 products, the symmetric pairwise f2
    kernel and the current CD2 value.  ``update`` commits a coordinate change
    by recomputing the affected kernel row/column from the design (no
    multiplicative deltas, so repeated updates cannot drift).  The
    ``preview_*`` methods score candidate changes in O(n) / O(ns) without
    mutating any state.

    Single-writer: concurrent mutation is not supported.
    """

    def __init__(self, design):
        x = as_design_matrix(design).copy()
        n, s = x.shape
        self._x = x
        self._a = np.abs(x - 0.5)
        self.n = n
        self.s = s
        self._const = (13.0 / 12.0) ** s
        self._rp = np.prod(1.0 + 0.5 * self._a - 0.5 * self._a * self._a, axis=1)
        kernel = np.ones((n, n))
        for k in range(s):
            ak = self._a[:, k]
            kernel *= 1.0 + 0.5 * (ak[:, None] + ak[None, :]) - 0.5 * np.abs(
                x[:, k, None] - x[None, :, k]
            )
        self._kernel = kernel
        self._sum_rp = float(self._rp.sum())
        self._sum_kernel = float(kernel.sum())
        self.cd2 = self._combine(self._sum_rp, self._sum_kernel)

    def _combine(self, sum_rp: float, sum_kernel: float) -> float:
        return self._const - (2.0 / self.n) * sum_rp + sum_kernel / self.n**2

    @property
    def design(self) -> np.ndarray:
        """Copy of the current design."""
        return self._x.copy()

    @property
    def row_products(self) -> np.ndarray:
        return self._rp.copy()

    @property
    def kernel(self) -> np.ndarray:
        return self._kernel.copy()

    def value_at(self, i: int, j: int) -> float:
        return float(self._x[i, j])

    def _check_update(self, i: int, j: int, value: float) -> None:
        if not (0 <= i < self.n and 0 <= j < self.s):
            raise IndexError(
                f"coordinate ({i}, {j}) out of range for a {self.n}x{self.s} design"
            )
        if not (0.0 <= value <= 1.0):
            raise ValueError(f"new value {value!r} outside [0, 1]")

    def _new_row(self, i: int, j: int, value: float):
        """Recomputed f1 product and kernel row for row i with x_ij = value."""
        xi = self._x[i].copy()
        xi[j] = value
        ai = np.abs(xi - 0.5)
        rp = float(np.prod(1.0 + 0.5 * ai - 0.5 * ai * ai))
        row = np.prod(
            1.0 + 0.5 * (ai[None, :] + self._a) - 0.5 * np.abs(xi[None, :] - self._x),
            axis=1,
        )
        row[i] = np.prod(1.0 + ai)
        return rp, row

    def update(self, i: int, j: int, value: float) -> float:
        """Set x_ij = value, refresh the affected cache entries, return CD2."""
        self._check_update(i, j, value)
        self._x[i, j] = value
        self._a[i, j] = abs(value - 0.5)
        rp, row = self._new_row(i, j, value)
        self._rp[i] = rp
        self._kernel[i, :] = row
        self._kernel[:, i] = row
        self._sum_rp = float(self._rp.sum())
        self._sum_kernel = float(self._kernel.sum())
        self.cd2 = self._combine(self._sum_rp, self._sum_kernel)
        return self.cd2

    def preview_update(self, i: int, j: int, value: float) -> float:
        """CD2 the design would have with x_ij = value; no state change."""
        self._check_update(i, j, value)
        if value == self._x[i, j]:
            return self.cd2
        rp, row = self._new_row(i, j, value)
        old_row = self._kernel[i]
        d_rp = rp - self._rp[i]
        d_kernel = 2.0 * float(row.sum() - old_row.sum()) - (row[i] - old_row[i])
        return self._combine(self._sum_rp + d_rp, self._sum_kernel + d_kernel)

    def preview_column_swap(self, r1: int, r2: int, col: int) -> float:
        """CD2 after exchanging x_{r1,col} and x_{r2,col}; no state change.

        O(n): the changed kernel rows are obtained by rescaling the cached
        rows with f2 factor ratios (all factors >= 1).
        """
        x, kernel = self._x, self._kernel
        u = x[r1, col]
        v = x[r2, col]
        if u == v:
            return self.cd2
        au, av = abs(u - 0.5), abs(v - 0.5)
        f1u = 1.0 + 0.5 * au - 0.5 * au * au
        f1v = 1.0 + 0.5 * av - 0.5 * av * av
        d_rp = self._rp[r1] * (f1v / f1u - 1.0) + self._rp[r2] * (f1u / f1v - 1.0)

        w = x[:, col]
        aw = self._a[:, col]
        f2_u = 1.0 + 0.5 * (au + aw) - 0.5 * np.abs(u - w)
        f2_v = 1.0 + 0.5 * (av + aw) - 0.5 * np.abs(v - w)
        ratio = f2_v / f2_u
        inv = f2_u / f2_v
        # off-diagonal deltas for both rows; the (r1, r2) entry and the
        # diagonals are corrected separately
        d1 = float(kernel[r1] @ ratio) - float(kernel[r1].sum())
        d1 -= kernel[r1, r1] * (ratio[r1] - 1.0) + kernel[r1, r2] * (ratio[r2] - 1.0)
        d2 = float(kernel[r2] @ inv) - float(kernel[r2].sum())
        d2 -= kernel[r2, r2] * (inv[r2] - 1.0) + kernel[r2, r1] * (inv[r1] - 1.0)
        gu, gv = 1.0 + au, 1.0 + av
        d_diag = kernel[r1, r1] * (gv / gu - 1.0) + kernel[r2, r2] * (gu / gv - 1.0)
        d_kernel = 2.0 * (d1 + d2) + d_diag
        return self._combine(self._sum_rp + d_rp, self._sum_kernel + d_kernel)

    def apply_column_swap(self, r1: int, r2: int, col: int) -> float:
        """Commit the exchange of x_{r1,col} and x_{r2,col}, return CD2."""
        u = self._x[r1, col]
        v = self._x[r2, col]
        self.update(r1, col, v)
        return self.update(r2, col, u)

    def _loo_terms(self, i: int, j: int):
        """Leave-one-out products at (i, j) from cached state (O(n + s))."""
        x = self._x[i, j]
        ai = self._a[i]
        f1x = 1.0 + 0.5 * ai[j] - 0.5 * ai[j] * ai[j]
        p1 = self._rp[i] / f1x
        g2_row = 1.0 + ai
        p2 = float(np.prod(g2_row) / g2_row[j])
        column = self._x[:, j]
        f2_col = 1.0 + 0.5 * (ai[j] + self._a[:, j]) - 0.5 * np.abs(x - column)
        kernel_row_loo = self._kernel[i] / f2_col
        return p1, p2, kernel_row_loo, column

    def coordinate_gradient(self, i: int, j: int) -> float:
        """dCD2/dx_ij at the cached design (O(n + s))."""
        p1, p2, kernel_row_loo, column = self._loo_terms(i, j)
        return _coordinate_gradient(
            self._x[i, j], column, p1, p2, kernel_row_loo, self.n
        )

    def zero_gradient_value(self, i: int, j: int, t_max: int = 1) -> float:
        """Stationarity recursion at (i, j) from cached state; clamped."""
        if t_max < 1:
            raise ValueError("t_max must be >= 1")
        p1, p2, kernel_row_loo, column = self._loo_terms(i, j)
        return _zero_gradient_recursion(
            self._x[i, j], column, p1, p2, kernel_row_loo, self.n, t_max
        )
