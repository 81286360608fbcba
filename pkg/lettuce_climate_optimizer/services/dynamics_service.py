from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from lettuce_climate_optimizer.core.config import settings
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.crop_model import LettuceCropModel
from lettuce_climate_optimizer.models.economics_model import GreenhouseEconomics
from lettuce_climate_optimizer.models.scenario_schema import ScenarioConfig
from lettuce_climate_optimizer.models.weather_model import class_temperature, day_summary
from lettuce_climate_optimizer.models.weather_schema import DaySummary, WeatherDay
from lettuce_climate_optimizer.services.weather_service import weather_service
from lettuce_climate_optimizer.utils.cache import SimpleCache, model_key, weather_day_key


@dataclass(frozen=True)
class DayInputs:
    """Hourly arrays and class summary of one weather day"""

    key: str
    summary: DaySummary
    is_day: np.ndarray
    radiation_out: np.ndarray
    temp_out: np.ndarray
    temp_sky: np.ndarray
    wind: np.ndarray

    @classmethod
    def from_day(cls, day: WeatherDay, transmissivity: float) -> "DayInputs":
        summary = day_summary(day, transmissivity)
        return cls(
            key=weather_day_key(day),
            summary=summary,
            is_day=summary.mask.as_array(),
            radiation_out=day.radiation_out,
            temp_out=day.temp_out,
            temp_sky=day.temp_sky,
            wind=day.wind,
        )


@dataclass(frozen=True)
class CandidateTable:
    """Growth and cost of every lattice candidate on one weather day.

    Candidates realizing the same (day temperature, night temperature,
    heating cost) share one row; ``representatives`` holds the lowest
    candidate index of each row in ascending order and ``group`` maps every
    candidate to its row.
    """

    representatives: np.ndarray  # (R,) candidate indices
    group: np.ndarray            # (G,) row per candidate
    drift: np.ndarray            # (R, N) [kg m-2 day-1], NaN where invalid
    cost: np.ndarray             # (R,) [EUR m-2 day-1]
    valid: np.ndarray            # (R,) temperatures inside the crop model domain


# Global cache of candidate tables, keyed by weather day and model parameters
candidate_cache = SimpleCache(maxsize=settings.cache_size)


class ScenarioDynamics:
    """Per-day growth and heating cost of a scenario, as the solver sees them"""

    def __init__(self, scenario: ScenarioConfig, days: Optional[Sequence[WeatherDay]] = None):
        self.scenario = scenario
        self.grid = scenario.grid
        self.points = scenario.grid.points()
        self.candidates = scenario.control_box.candidates()
        self.crop = LettuceCropModel(scenario.crop)
        self.economics = GreenhouseEconomics(scenario.economics, scenario.revenue)

        if days is None:
            days = weather_service.scenario_days(scenario)
        if len(days) != scenario.horizon:
            raise ValueError(f"need {scenario.horizon} weather days, got {len(days)}")

        transmissivity = scenario.economics.c_tau_cover
        by_identity = {}
        self.days: List[DayInputs] = []
        for day in days:
            # Repeated days are the same object; summarize them once
            if id(day) not in by_identity:
                by_identity[id(day)] = DayInputs.from_day(day, transmissivity)
            self.days.append(by_identity[id(day)])

        self._model_key = model_key(scenario.crop, scenario.economics, scenario.grid, scenario.control_box)

    @property
    def horizon(self) -> int:
        return self.scenario.horizon

    def class_temps(self, k: int, u_day, u_night) -> Tuple[np.ndarray, np.ndarray]:
        day = self.days[k]
        return (
            class_temperature(day.temp_out, day.is_day, u_day),
            class_temperature(day.temp_out, ~day.is_day, u_night),
        )

    def valid_temps(self, k: int, t_day, t_night) -> np.ndarray:
        summary = self.days[k].summary
        ok = np.ones(np.shape(t_day), dtype=bool)
        if summary.n_day_hours:
            ok &= self.crop.in_domain(t_day)
        if summary.n_night_hours:
            ok &= self.crop.in_domain(t_night)
        return ok

    def growth(self, k: int, x, u_day, u_night):
        """Daily growth f_k(x, u); raises CropDomainError outside the crop model domain."""
        t_day, t_night = self.class_temps(k, u_day, u_night)
        return self.crop.growth_rate(x, t_day, t_night, self.days[k].summary)

    def heating_cost(self, k: int, u_day, u_night):
        day = self.days[k]
        return self.economics.heating_cost_arrays(
            u_day, u_night, day.radiation_out, day.temp_out, day.temp_sky, day.wind, day.is_day
        )

    def terminal_value(self) -> np.ndarray:
        return self.economics.revenue(self.points)

    def candidate_table(self, k: int) -> CandidateTable:
        key = (self.days[k].key, self._model_key)
        table = candidate_cache.get(key)
        if table is None:
            table = self._build_table(k)
            candidate_cache.set(key, table)
        return table

    def _build_table(self, k: int) -> CandidateTable:
        u_day = self.candidates[:, 0]
        u_night = self.candidates[:, 1]
        t_day, t_night = self.class_temps(k, u_day, u_night)
        cost = self.heating_cost(k, u_day, u_night)

        signature = np.column_stack([t_day, t_night, cost])
        _, first, group = np.unique(signature, axis=0, return_index=True, return_inverse=True)
        # Re-label rows so they follow the first (lowest) candidate of each group
        order = np.argsort(first, kind="stable")
        representatives = first[order]
        relabel = np.empty_like(order)
        relabel[order] = np.arange(len(order))
        group = relabel[np.asarray(group).reshape(-1)]

        t_day_r = t_day[representatives]
        t_night_r = t_night[representatives]
        valid = self.valid_temps(k, t_day_r, t_night_r)

        drift = np.full((len(representatives), len(self.points)), np.nan)
        if valid.any():
            drift[valid] = self.crop.growth_rate(
                self.points[None, :], t_day_r[valid, None], t_night_r[valid, None], self.days[k].summary
            )
        logger.debug(
            f"Day {k}: {len(self.candidates)} candidates, {len(representatives)} distinct, "
            f"{int(valid.sum())} inside the crop model domain"
        )
        return CandidateTable(
            representatives=representatives,
            group=group,
            drift=drift,
            cost=cost[representatives],
            valid=valid,
        )
