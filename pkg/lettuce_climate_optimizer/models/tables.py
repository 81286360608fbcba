"""Array containers produced by the solver and the simulators.

Axis convention: first axis is the day k, second the grid cell i (0-based).
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from lettuce_climate_optimizer.core.exceptions import DimensionMismatchError


def _check_shape(name: str, array: np.ndarray, shape) -> None:
    if array.shape != tuple(shape):
        raise DimensionMismatchError(f"{name} has shape {array.shape}, expected {tuple(shape)}")


@dataclass(frozen=True)
class Policy:
    u_day: np.ndarray    # (T, N) [degC]
    u_night: np.ndarray  # (T, N) [degC]

    def __post_init__(self):
        _check_shape("u_night", self.u_night, self.u_day.shape)

    @property
    def horizon(self) -> int:
        return self.u_day.shape[0]

    @property
    def n_cells(self) -> int:
        return self.u_day.shape[1]

    def check(self, horizon: int, n_cells: int) -> None:
        _check_shape("policy", self.u_day, (horizon, n_cells))

    @classmethod
    def constant(cls, u_day: float, u_night: float, horizon: int, n_cells: int) -> "Policy":
        return cls(np.full((horizon, n_cells), float(u_day)), np.full((horizon, n_cells), float(u_night)))


@dataclass(frozen=True)
class ValueTable:
    v: np.ndarray  # (T + 1, N) [EUR m-2]

    def at(self, day: int, cell: int) -> float:
        return float(self.v[day, cell])


@dataclass(frozen=True)
class GrowthTable:
    f_star: np.ndarray  # (T, N) [kg m-2 day-1]


@dataclass(frozen=True)
class SolveResult:
    value: ValueTable
    policy: Policy
    growth: GrowthTable
    sigma2: float


@dataclass(frozen=True)
class DensityTrajectory:
    """Cell probabilities for days start_day..T and the running costs paid on the way"""

    start_day: int
    p: np.ndarray             # (T + 1 - start_day, N)
    running_cost: np.ndarray  # (T - start_day,) expected cost per day [EUR m-2]

    @property
    def final(self) -> np.ndarray:
        return self.p[-1]

    @property
    def expected_cost(self) -> float:
        return float(self.running_cost.sum())


@dataclass(frozen=True)
class TrajectorySet:
    """Monte Carlo runs: states for days start_day..T and per-run accumulated cost"""

    start_day: int
    x: np.ndarray       # (n_runs, T + 1 - start_day) [kg m-2]
    cost: np.ndarray    # (n_runs,) [EUR m-2]
    clamped: int        # state updates that hit a grid boundary
    seed: Optional[int] = None

    @property
    def final(self) -> np.ndarray:
        return self.x[:, -1]

    @property
    def clamped_fraction(self) -> float:
        steps = self.x.shape[0] * max(self.x.shape[1] - 1, 1)
        return self.clamped / steps
