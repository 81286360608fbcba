import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from lettuce_climate_optimizer.core.config import settings
from lettuce_climate_optimizer.core.exceptions import CropDomainError, SolverError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.scenario_schema import NoiseParams, StateGrid
from lettuce_climate_optimizer.models.tables import GrowthTable, Policy, SolveResult, ValueTable
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics


class GaussianKernel:
    """Truncated Gaussian transition rows on a linear grid.

    Row i for drift f is N(x_i + f dt, sigma2 x_i^2 dt) evaluated at the grid
    points and normalized to sum 1. Only a band of 2H+1 columns around the
    cell nearest to the mean is evaluated; columns beyond it carry less than
    exp(-sigmas^2 / 2) of the peak density.
    """

    def __init__(self, points: np.ndarray, cell_width: float, noise: NoiseParams,
                 sigmas: Optional[float] = None):
        self.points = points
        self.cell_width = cell_width
        self.noise = noise
        self.stds = math.sqrt(noise.sigma2 * noise.dt) * points
        sigmas = sigmas or settings.kernel_sigmas
        half = int(math.ceil(sigmas * float(self.stds.max()) / cell_width)) + 1
        self.half_width = min(half, len(points) - 1)

    @property
    def width(self) -> int:
        return 2 * self.half_width + 1

    def band(self, means, stds=None) -> Tuple[np.ndarray, np.ndarray]:
        """Column indices and weights, both shaped means.shape + (W,)."""
        means = np.asarray(means, dtype=float)
        stds = self.stds if stds is None else np.asarray(stds, dtype=float)
        n = len(self.points)
        center = np.clip(np.rint((means - self.points[0]) / self.cell_width), 0, n - 1).astype(np.int64)
        cols = center[..., None] + np.arange(-self.half_width, self.half_width + 1)
        inside = (cols >= 0) & (cols < n)
        cols = np.clip(cols, 0, n - 1)

        # Zero noise leaves non-finite rows, replaced by point masses below
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (self.points[cols] - means[..., None]) / np.broadcast_to(stds, means.shape)[..., None]
            exponent = np.where(inside, -0.5 * z * z, -np.inf)
            # Shift by the row maximum so the largest weight is exp(0) = 1
            exponent = exponent - exponent.max(axis=-1, keepdims=True)
            weights = np.exp(exponent)
            weights = weights / weights.sum(axis=-1, keepdims=True)

        degenerate = ~np.isfinite(weights).all(axis=-1)
        if degenerate.any():
            logger.debug(f"{int(degenerate.sum())} degenerate transition row(s); using point masses")
            weights[degenerate] = 0.0
            weights[degenerate, self.half_width] = 1.0
        return cols, weights

    def expect(self, means, v_next: np.ndarray, stds=None) -> np.ndarray:
        """E[v_next(x')] for each row; v_next is (N,) or one (N,) row per leading index."""
        cols, weights = self.band(means, stds)
        if v_next.ndim == 1:
            values = v_next[cols]
        else:
            flat = cols.reshape(cols.shape[0], -1)
            values = np.take_along_axis(v_next, flat, axis=1).reshape(cols.shape)
        return (weights * values).sum(axis=-1)

    def row(self, cell: int, drift: float) -> np.ndarray:
        """Dense transition row of one cell."""
        mean = np.array([self.points[cell] + drift * self.noise.dt])
        cols, weights = self.band(mean, self.stds[cell:cell + 1])
        return np.bincount(cols.ravel(), weights=weights.ravel(), minlength=len(self.points))

    def push(self, p: np.ndarray, means: np.ndarray) -> np.ndarray:
        """Forward step p_next[j] = sum_i p[i] A[i, j]."""
        cols, weights = self.band(means)
        return np.bincount(cols.ravel(), weights=(p[:, None] * weights).ravel(), minlength=len(self.points))


def transition_row(cell: int, drift: float, noise: NoiseParams, grid: StateGrid) -> np.ndarray:
    """Dense probability row of one grid cell over all N cells."""
    kernel = GaussianKernel(grid.points(), grid.cell_width, noise)
    return kernel.row(cell, drift)


@dataclass(frozen=True)
class BellmanStep:
    value: np.ndarray    # (N,)
    u_day: np.ndarray    # (N,)
    u_night: np.ndarray  # (N,)
    growth: np.ndarray   # (N,)


@dataclass(frozen=True)
class ConstantSearch:
    """Best constant setpoint pair per start day and cell"""

    value: np.ndarray   # (T + 1, N) best value over constant policies
    choice: np.ndarray  # (T + 1, N) candidate index attaining it
    candidates: np.ndarray  # (G, 2)


def first_best(scores: np.ndarray, tolerance: float) -> np.ndarray:
    """Per column, the first row whose score is within tolerance of the column max."""
    best = scores.max(axis=0)
    return np.argmax(scores >= best - tolerance, axis=0)


class MDPSolver:
    """Backward induction and fixed-policy evaluation on the dry weight grid"""

    def __init__(self, dynamics: ScenarioDynamics, noise: Optional[NoiseParams] = None,
                 threads: Optional[int] = None):
        self.dynamics = dynamics
        self.noise = noise or dynamics.scenario.noise
        self.threads = threads or settings.threads
        self.points = dynamics.points
        self.kernel = self.kernel_for(self.noise)
        self.tolerance = settings.tie_tolerance

    def kernel_for(self, noise: NoiseParams) -> GaussianKernel:
        return GaussianKernel(self.points, self.dynamics.grid.cell_width, noise)

    def _map_batches(self, fn: Callable[[slice], np.ndarray], count: int, width: int) -> List[np.ndarray]:
        """Apply fn to consecutive row slices; results keep the slice order."""
        size = max(1, settings.kernel_batch_elements // max(1, len(self.points) * width))
        slices = [slice(start, min(start + size, count)) for start in range(0, count, size)]
        if self.threads > 1 and len(slices) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                return list(pool.map(fn, slices))
        return [fn(s) for s in slices]

    def _domain_failure(self, k: int) -> SolverError:
        candidates = self.dynamics.candidates
        t_day, t_night = self.dynamics.class_temps(k, candidates[:, 0], candidates[:, 1])
        return SolverError(
            f"no candidate setpoint keeps the crop model in its domain on day {k}: "
            f"realized day {t_day.min():.2f}..{t_day.max():.2f} degC, "
            f"night {t_night.min():.2f}..{t_night.max():.2f} degC",
            day=k,
        )

    def bellman_step(self, k: int, v_next: np.ndarray) -> BellmanStep:
        """Maximize expected next value minus heating cost over the candidate lattice."""
        table = self.dynamics.candidate_table(k)
        rows = np.flatnonzero(table.valid)
        if rows.size == 0:
            raise self._domain_failure(k)

        dt = self.noise.dt
        means = self.points[None, :] + table.drift[rows] * dt
        cost = table.cost[rows]
        kernel = self.kernel

        def score(batch: slice) -> np.ndarray:
            return kernel.expect(means[batch], v_next) - cost[batch, None] * dt

        scores = np.concatenate(self._map_batches(score, len(rows), kernel.width), axis=0)
        choice = first_best(scores, self.tolerance)
        cells = np.arange(len(self.points))
        chosen = rows[choice]
        candidate = self.dynamics.candidates[table.representatives[chosen]]
        return BellmanStep(
            value=scores[choice, cells],
            u_day=candidate[:, 0].copy(),
            u_night=candidate[:, 1].copy(),
            growth=table.drift[chosen, cells],
        )

    def refine_step(self, k: int, v_next: np.ndarray, step: BellmanStep) -> BellmanStep:
        """Polish each cell's lattice choice one coordinate at a time within one lattice step."""
        box = self.dynamics.scenario.control_box
        dt = self.noise.dt
        value = step.value.copy()
        u_day = step.u_day.copy()
        u_night = step.u_night.copy()
        growth = step.growth.copy()

        for i, x in enumerate(self.points):
            def score(ud: float, un: float) -> Tuple[float, float]:
                try:
                    drift = float(self.dynamics.growth(k, x, ud, un))
                except CropDomainError:
                    return -np.inf, np.nan
                cost = float(self.dynamics.heating_cost(k, ud, un))
                mean = np.array([x + drift * dt])
                expected = float(self.kernel.expect(mean, v_next, self.kernel.stds[i:i + 1])[0])
                return expected - cost * dt, drift

            for axis, (low, high), lattice_step in (
                (0, box.day_range, box.day_step),
                (1, box.night_range, box.night_step),
            ):
                current = (u_day[i], u_night[i])
                lo = max(low, current[axis] - lattice_step)
                hi = min(high, current[axis] + lattice_step)
                if hi <= lo:
                    continue

                def objective(u: float) -> float:
                    pair = list(current)
                    pair[axis] = u
                    return -score(*pair)[0]

                result = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-3})
                pair = list(current)
                pair[axis] = float(result.x)
                candidate_value, candidate_growth = score(*pair)
                if candidate_value > value[i] + self.tolerance:
                    value[i] = candidate_value
                    growth[i] = candidate_growth
                    u_day[i], u_night[i] = pair

        return BellmanStep(value=value, u_day=u_day, u_night=u_night, growth=growth)

    def backward_induction(self) -> SolveResult:
        horizon = self.dynamics.horizon
        n = len(self.points)
        refine = self.dynamics.scenario.refine_controls
        started = time.perf_counter()
        logger.info(
            f"Backward induction: T={horizon}, N={n}, sigma2={self.noise.sigma2}, "
            f"band={self.kernel.width}, threads={self.threads}"
        )

        v = np.empty((horizon + 1, n))
        u_day = np.empty((horizon, n))
        u_night = np.empty((horizon, n))
        f_star = np.empty((horizon, n))
        v[horizon] = self.dynamics.terminal_value()

        for k in reversed(range(horizon)):
            step = self.bellman_step(k, v[k + 1])
            if refine:
                step = self.refine_step(k, v[k + 1], step)
            v[k], u_day[k], u_night[k], f_star[k] = step.value, step.u_day, step.u_night, step.growth
            logger.debug(f"Day {k}: max V={v[k].max():.6g} EUR m-2")

        logger.info(
            f"Backward induction done in {time.perf_counter() - started:.2f}s, "
            f"V[0] in [{v[0].min():.6g}, {v[0].max():.6g}]"
        )
        return SolveResult(
            value=ValueTable(v),
            policy=Policy(u_day, u_night),
            growth=GrowthTable(f_star),
            sigma2=self.noise.sigma2,
        )

    def evaluate_policy(self, policy: Policy, noise: Optional[NoiseParams] = None) -> ValueTable:
        """Expected net revenue of a fixed policy under the given noise level."""
        horizon = self.dynamics.horizon
        n = len(self.points)
        policy.check(horizon, n)
        noise = noise or self.noise
        kernel = self.kernel if noise == self.noise else self.kernel_for(noise)

        v = np.empty((horizon + 1, n))
        v[horizon] = self.dynamics.terminal_value()
        for k in reversed(range(horizon)):
            drift = self.dynamics.growth(k, self.points, policy.u_day[k], policy.u_night[k])
            cost = self.dynamics.heating_cost(k, policy.u_day[k], policy.u_night[k])
            v[k] = kernel.expect(self.points + drift * noise.dt, v[k + 1]) - cost * noise.dt
        return ValueTable(v)

    def constant_representatives(self) -> np.ndarray:
        """Lowest candidate of each class of candidates equivalent on every day and valid throughout."""
        candidates = self.dynamics.candidates
        groups = []
        valid = np.ones(len(candidates), dtype=bool)
        first_day = {}
        for k, day in enumerate(self.dynamics.days):
            first_day.setdefault(day.key, k)
        for k in first_day.values():
            table = self.dynamics.candidate_table(k)
            groups.append(table.group)
            valid &= table.valid[table.group]
        _, first = np.unique(np.column_stack(groups), axis=0, return_index=True)
        representatives = np.sort(first)
        return representatives[valid[representatives]]

    def best_constant_policy(self) -> ConstantSearch:
        """Evaluate every constant setpoint pair at once; keep the best per day and cell."""
        horizon = self.dynamics.horizon
        n = len(self.points)
        dt = self.noise.dt
        kernel = self.kernel
        chosen = self.constant_representatives()
        if chosen.size == 0:
            raise SolverError("no constant setpoint keeps the crop model in its domain on every day")
        logger.info(f"Constant policy search over {chosen.size} distinct setpoint pairs")

        best_value = np.empty((horizon + 1, n))
        best_choice = np.empty((horizon + 1, n), dtype=np.int64)
        v = np.tile(self.dynamics.terminal_value(), (chosen.size, 1))
        best_value[horizon] = v[0]
        best_choice[horizon] = chosen[0]

        for k in reversed(range(horizon)):
            table = self.dynamics.candidate_table(k)
            rows = table.group[chosen]
            means = self.points[None, :] + table.drift[rows] * dt
            cost = table.cost[rows]
            v_next = v

            def score(batch: slice) -> np.ndarray:
                return kernel.expect(means[batch], v_next[batch]) - cost[batch, None] * dt

            v = np.concatenate(self._map_batches(score, chosen.size, kernel.width), axis=0)
            pick = first_best(v, self.tolerance)
            best_value[k] = v[pick, np.arange(n)]
            best_choice[k] = chosen[pick]

        return ConstantSearch(value=best_value, choice=best_choice, candidates=self.dynamics.candidates)
