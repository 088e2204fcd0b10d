"""Continuous coordinate-descent refiners over the unit cube.

Three single-coordinate sweep strategies minimize CD2 from a given
initialization, visiting coordinates in row-major order with in-place
(Gauss-Seidel) updates:

* ``cgd``   -- step against the analytic coordinate gradient, fixed step size;
* ``czg``   -- jump to the frozen-sign stationarity solution of the coordinate;
* ``cdfss`` -- per epoch, apply the single best move among all x_ij +/- delta_j.

All refiners clamp iterates into [0, 1], are deterministic, and return the
best design seen at any epoch boundary, so the result never degrades the
initialization even when the per-sweep trajectory fluctuates.
``refine_pipeline`` chains threshold accepting with a chosen refiner.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np

from .discrepancy import DiscrepancyCache, as_design_matrix, cd2, cd2_gradient
from .lattice import TaConfig, TaResult, embed, ta_optimize

__all__ = [
    "RefinerConfig",
    "TraceRecord",
    "OptimizationTrace",
    "RefineResult",
    "cgd",
    "czg",
    "cdfss",
    "gradient_descent",
    "refine_pipeline",
]

TerminationReason = Literal["converged", "max_epochs", "no_improving_move"]


@dataclass
class RefinerConfig:
    """Shared knobs for the coordinate refiners.

    ``step_size`` is the CGD step (0 is accepted as a degenerate no-op
    configuration); ``epsilon`` is the per-epoch CD2 change below which a
    run is declared converged; ``t_max`` is the CZG recursion depth;
    ``column_steps`` are the CDFSS per-column grid steps (default 1/(2n)).
    ``guarded`` makes CZG reject coordinate updates that increase CD2.
    """

    step_size: float = 0.01
    epsilon: float = 1e-9
    max_epochs: int = 1000
    t_max: int = 1
    column_steps: Optional[Sequence[float]] = None
    guarded: bool = False

    def __post_init__(self):
        if self.step_size < 0:
            raise ValueError("step_size must be >= 0")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.column_steps is not None:
            steps = np.asarray(self.column_steps, dtype=float)
            if steps.ndim != 1 or np.any(steps <= 0):
                raise ValueError("column_steps must be a 1-D sequence of positive reals")
            self.column_steps = steps


class TraceRecord(NamedTuple):
    epoch: int
    cd2: float
    seconds: float


@dataclass
class OptimizationTrace:
    algorithm: str
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, epoch: int, value: float, seconds: float) -> None:
        self.records.append(TraceRecord(epoch, value, seconds))

    @property
    def cd2_values(self) -> list[float]:
        return [r.cd2 for r in self.records]


@dataclass
class RefineResult:
    design: np.ndarray
    cd2: float
    trace: OptimizationTrace
    termination: TerminationReason


class _Run:
    """Best-so-far and trace bookkeeping common to all refiners."""

    def __init__(self, algorithm: str, cache: DiscrepancyCache, epsilon: float):
        self.cache = cache
        self.epsilon = epsilon
        self.best_design = cache.design
        self.best_cd2 = cache.cd2
        self.trace = OptimizationTrace(algorithm)
        self.trace.append(0, cache.cd2, 0.0)
        self.prev_cd2 = cache.cd2
        self.t0 = time.perf_counter()

    def end_epoch(self, epoch: int) -> bool:
        """Record the epoch, refresh the best design, return convergence."""
        now = time.perf_counter()
        self.trace.append(epoch, self.cache.cd2, now - self.t0)
        self.t0 = now
        if self.cache.cd2 < self.best_cd2:
            self.best_cd2 = self.cache.cd2
            self.best_design = self.cache.design
        converged = abs(self.cache.cd2 - self.prev_cd2) < self.epsilon
        self.prev_cd2 = self.cache.cd2
        return converged

    def result(self, termination: TerminationReason) -> RefineResult:
        return RefineResult(self.best_design, self.best_cd2, self.trace, termination)


def _clamp(v: float) -> float:
    return min(1.0, max(0.0, v))


def cgd(init, config: RefinerConfig | None = None) -> RefineResult:
    """Coordinate gradient descent with a fixed step size.

    Each visit moves x_ij by -step_size times the coordinate gradient at the
    current (partially updated) design, clamped into [0, 1].
    """
    config = config or RefinerConfig()
    cache = DiscrepancyCache(init)
    run = _Run("cgd", cache, config.epsilon)
    termination: TerminationReason = "max_epochs"
    for epoch in range(1, config.max_epochs + 1):
        for i in range(cache.n):
            for j in range(cache.s):
                g = cache.coordinate_gradient(i, j)
                cache.update(i, j, _clamp(cache.value_at(i, j) - config.step_size * g))
        if run.end_epoch(epoch):
            termination = "converged"
            break
    return run.result(termination)


def czg(init, config: RefinerConfig | None = None) -> RefineResult:
    """Coordinate zero-gradient sweeps.

    Each visit replaces x_ij with the frozen-sign stationarity solution
    (``t_max`` recursion steps).  In guarded mode an update that increases
    CD2 is rolled back, making the per-coordinate trajectory non-increasing;
    unguarded sweeps may fluctuate, which the best-so-far return absorbs.
    """
    config = config or RefinerConfig()
    cache = DiscrepancyCache(init)
    run = _Run("czg", cache, config.epsilon)
    termination: TerminationReason = "max_epochs"
    for epoch in range(1, config.max_epochs + 1):
        for i in range(cache.n):
            for j in range(cache.s):
                old = cache.value_at(i, j)
                before = cache.cd2
                after = cache.update(i, j, cache.zero_gradient_value(i, j, config.t_max))
                if config.guarded and after > before:
                    cache.update(i, j, old)
        if run.end_epoch(epoch):
            termination = "converged"
            break
    return run.result(termination)


def cdfss(init, config: RefinerConfig | None = None) -> RefineResult:
    """Coordinate descent with fixed per-column step sizes.

    Each epoch previews all 2ns candidates x_ij +/- delta_j (clamped) and
    commits the single lowest-CD2 move, provided it strictly improves the
    current design; otherwise the run stops with ``no_improving_move``.
    """
    config = config or RefinerConfig()
    cache = DiscrepancyCache(init)
    if config.column_steps is None:
        steps = np.full(cache.s, 1.0 / (2 * cache.n))
    else:
        steps = np.asarray(config.column_steps, dtype=float)
        if steps.shape != (cache.s,):
            raise ValueError(f"column_steps must have length s={cache.s}")
    run = _Run("cdfss", cache, config.epsilon)
    termination: TerminationReason = "max_epochs"
    for epoch in range(1, config.max_epochs + 1):
        base = cache.cd2
        best_move = None
        best_val = base
        for i in range(cache.n):
            for j in range(cache.s):
                x = cache.value_at(i, j)
                for direction in (1.0, -1.0):
                    v = _clamp(x + direction * steps[j])
                    if v == x:
                        continue
                    candidate = cache.preview_update(i, j, v)
                    if candidate < best_val:
                        best_val = candidate
                        best_move = (i, j, v)
        if best_move is None:
            termination = "no_improving_move"
            break
        i, j, v = best_move
        old = cache.value_at(i, j)
        if cache.update(i, j, v) >= base:
            # preview and committed CD2 can differ by ~1 ulp; treat a
            # non-improving commit as no improving move and roll back
            cache.update(i, j, old)
            termination = "no_improving_move"
            break
        run.end_epoch(epoch)
    return run.result(termination)


def gradient_descent(init, config: RefinerConfig | None = None) -> RefineResult:
    """Plain full-matrix gradient descent (comparison baseline).

    Updates every coordinate simultaneously with the same step/epsilon/epoch
    contract as the coordinate methods.
    """
    config = config or RefinerConfig()
    x = as_design_matrix(init).copy()
    trace = OptimizationTrace("gd")
    value = cd2(x)
    trace.append(0, value, 0.0)
    best_x, best_val, prev = x.copy(), value, value
    termination: TerminationReason = "max_epochs"
    t0 = time.perf_counter()
    for epoch in range(1, config.max_epochs + 1):
        x = np.clip(x - config.step_size * cd2_gradient(x), 0.0, 1.0)
        value = cd2(x)
        now = time.perf_counter()
        trace.append(epoch, value, now - t0)
        t0 = now
        if value < best_val:
            best_val, best_x = value, x.copy()
        if abs(value - prev) < config.epsilon:
            termination = "converged"
            break
        prev = value
    return RefineResult(best_x, best_val, trace, termination)


_REFINERS = {"cgd": cgd, "czg": czg, "cdfss": cdfss}


def refine_pipeline(
    ta_config: TaConfig,
    refiner: str = "cgd",
    refiner_config: RefinerConfig | None = None,
) -> RefineResult:
    """Threshold accepting followed by a continuous coordinate refiner.

    The best TA lattice design is embedded at (l - 0.5)/q and handed to the
    chosen refiner; the result CD2 never exceeds the embedded TA value.  The
    refiner trace starts at the TA design (epoch 0).
    """
    if refiner not in _REFINERS:
        raise ValueError(f"unknown refiner {refiner!r}; expected one of {sorted(_REFINERS)}")
    ta_result: TaResult = ta_optimize(ta_config)
    return _REFINERS[refiner](embed(ta_result.design), refiner_config)
