from enum import Enum
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from lettuce_climate_optimizer.models.params_schema import CropParams, EconParams, RevenueParams
from lettuce_climate_optimizer.models.weather_schema import WEATHER_PRESETS, WeatherProfile

# Setpoints within this of a box edge count as inside [degC]
BOX_TOLERANCE = 1e-9


class StateGrid(BaseModel):
    """Linear grid of crop dry weight, x(i) = x_min + (i-1) dx"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    x_min: Annotated[float, Field(0.005, gt=0, description="Lowest dry weight [kg m-2]")]
    x_max: Annotated[float, Field(0.400, gt=0, description="Highest dry weight [kg m-2]")]
    n_cells: Annotated[int, Field(2000, ge=2, description="Number of grid cells N")]

    @model_validator(mode="after")
    def check_range(self) -> "StateGrid":
        if self.x_max <= self.x_min:
            raise ValueError("x_max must exceed x_min")
        return self

    @property
    def cell_width(self) -> float:
        return (self.x_max - self.x_min) / (self.n_cells - 1)

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n_cells)

    def nearest_cell(self, x):
        """Index of the grid cell nearest to x, clipped to the grid."""
        idx = np.rint((np.asarray(x, dtype=float) - self.x_min) / self.cell_width)
        idx = np.clip(idx, 0, self.n_cells - 1).astype(np.int64)
        return int(idx) if idx.ndim == 0 else idx


def _lattice(low: float, high: float, step: float) -> np.ndarray:
    count = int(np.floor((high - low) / step + 1e-9)) + 1
    return low + step * np.arange(count)


class ControlBox(BaseModel):
    """Admissible (night, day) setpoint ranges and the search lattice"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    night_range: Tuple[float, float] = (5.0, 10.0)
    day_range: Tuple[float, float] = (5.0, 20.0)
    night_step: Annotated[float, Field(0.25, gt=0)]
    day_step: Annotated[float, Field(0.25, gt=0)]

    @field_validator("night_range", "day_range")
    @classmethod
    def validate_range(cls, v):
        if v[0] > v[1]:
            raise ValueError(f"empty range {v}")
        return v

    def day_values(self) -> np.ndarray:
        return _lattice(*self.day_range, self.day_step)

    def night_values(self) -> np.ndarray:
        return _lattice(*self.night_range, self.night_step)

    def candidates(self) -> np.ndarray:
        """(G, 2) array of (u_day, u_night), ascending lexicographically."""
        day, night = np.meshgrid(self.day_values(), self.night_values(), indexing="ij")
        return np.column_stack([day.ravel(), night.ravel()])

    def contains(self, u_day, u_night) -> bool:
        u_day = np.asarray(u_day)
        u_night = np.asarray(u_night)
        return bool(
            np.all(u_day >= self.day_range[0] - BOX_TOLERANCE)
            and np.all(u_day <= self.day_range[1] + BOX_TOLERANCE)
            and np.all(u_night >= self.night_range[0] - BOX_TOLERANCE)
            and np.all(u_night <= self.night_range[1] + BOX_TOLERANCE)
        )


class NoiseParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    sigma2: Annotated[float, Field(1e-4, ge=0, description="Relative variance rate [day-1]")]
    dt: Annotated[float, Field(1.0, gt=0, description="Time step [day]")]


class ScenarioConfig(BaseModel):
    """Everything one solve, simulation, comparison or sweep depends on"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    weather_file: Optional[Path] = None
    weather_profile: Optional[WeatherProfile] = None
    weather_preset: Optional[Literal["day5", "day79", "day187"]] = None
    weather_day: Annotated[int, Field(0, ge=0, description="First day taken from the weather file")]
    repeated_day: bool = True

    horizon: Annotated[int, Field(40, ge=1, description="Production round length T [days]")]
    grid: StateGrid = StateGrid()
    control_box: ControlBox = ControlBox()
    noise: NoiseParams = NoiseParams()
    crop: CropParams = CropParams()
    economics: EconParams = EconParams()
    revenue: RevenueParams = RevenueParams()

    x0: Annotated[float, Field(0.005, gt=0, description="Initial dry weight [kg m-2]")]
    start_day: Annotated[int, Field(0, ge=0, description="Planting day used by `simulate`")]
    seed: int = 0
    mc_runs: Annotated[int, Field(10_000, ge=1)]
    deterministic_sigma2: Annotated[float, Field(2e-6, gt=0, description="Design noise of the deterministic controller")]
    refine_controls: bool = False

    @model_validator(mode="after")
    def check_consistency(self) -> "ScenarioConfig":
        sources = [s for s in (self.weather_file, self.weather_profile, self.weather_preset) if s is not None]
        if len(sources) > 1:
            raise ValueError("give at most one of weather_file, weather_profile, weather_preset")
        if not self.grid.x_min <= self.x0 <= self.grid.x_max:
            raise ValueError(f"x0={self.x0} lies outside the grid [{self.grid.x_min}, {self.grid.x_max}]")
        if self.start_day >= self.horizon:
            raise ValueError("start_day must be smaller than the horizon")
        return self

    def resolved_profile(self) -> Optional[WeatherProfile]:
        """Profile of a synthetic scenario, day79 when no source is given."""
        if self.weather_file is not None:
            return None
        if self.weather_profile is not None:
            return self.weather_profile
        return WEATHER_PRESETS[self.weather_preset or "day79"]

    def with_sigma2(self, sigma2: float) -> "ScenarioConfig":
        return self.model_copy(update={"noise": self.noise.model_copy(update={"sigma2": sigma2})})


class ControllerKind(str, Enum):
    DYNAMIC_STOCHASTIC = "dynamic_stochastic"
    DYNAMIC_DETERMINISTIC = "dynamic_deterministic"
    STATIC_STOCHASTIC = "static_stochastic"


class ControllerSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ControllerKind
    design_sigma2: Optional[float] = Field(None, gt=0)
    eval_sigma2: Optional[float] = Field(None, gt=0)

    def resolve(self, scenario: ScenarioConfig) -> Tuple[float, float]:
        """(design, evaluation) noise levels for this controller in a scenario."""
        truth = scenario.noise.sigma2
        if self.kind == ControllerKind.DYNAMIC_DETERMINISTIC:
            design = self.design_sigma2 or scenario.deterministic_sigma2
        else:
            design = self.design_sigma2 or truth
        return design, self.eval_sigma2 or truth


class StaticControl(BaseModel):
    """One setpoint pair applied on every day and in every state"""

    u_day: float
    u_night: float
    start_day: int
    value: float


class SweepParameter(str, Enum):
    SIGMA2 = "sigma2"
    MARGIN = "margin"
    START_DAY = "start_day"
    START_WEIGHT = "start_weight"


ALL_CONTROLLERS: List[ControllerKind] = list(ControllerKind)


class SweepSpec(BaseModel):
    """One-parameter sensitivity sweep; values in internal units (kg m-2, day-1, day index)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    parameter: SweepParameter
    values: List[float]
    controllers: List[ControllerKind] = Field(default_factory=lambda: list(ALL_CONTROLLERS))
    scenario: ScenarioConfig = ScenarioConfig()

    @field_validator("values")
    @classmethod
    def validate_values(cls, v):
        if not v:
            raise ValueError("a sweep needs at least one value")
        diffs = np.diff(np.asarray(v, dtype=float))
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("sweep values must be strictly monotone")
        return v

    @field_validator("controllers")
    @classmethod
    def validate_controllers(cls, v):
        if not v:
            raise ValueError("a sweep needs at least one controller")
        return v

    @model_validator(mode="after")
    def check_parameter_values(self) -> "SweepSpec":
        if self.parameter == SweepParameter.START_DAY:
            for value in self.values:
                if value != int(value) or not 0 <= value < self.scenario.horizon:
                    raise ValueError(f"start day {value} is not a day index below the horizon")
        return self
