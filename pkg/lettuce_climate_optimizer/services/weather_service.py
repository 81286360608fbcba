from pathlib import Path
from typing import List, Sequence

from lettuce_climate_optimizer.core.exceptions import ConfigError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.scenario_schema import ScenarioConfig
from lettuce_climate_optimizer.models.weather_model import day_summary, synthesize_weather
from lettuce_climate_optimizer.models.weather_schema import DayStatistics, WeatherDay, WeatherProfile
from lettuce_climate_optimizer.repositories.weather_repository import weather_repository


class WeatherService:
    """Service layer for weather ingestion, synthesis and inspection"""

    def __init__(self):
        self.weather_repository = weather_repository

    def load_weather(self, path) -> List[WeatherDay]:
        return self.weather_repository.load_weather(path)

    def scenario_days(self, scenario: ScenarioConfig) -> List[WeatherDay]:
        """Weather for days 0..T-1 of the production round."""
        horizon = scenario.horizon
        profile = scenario.resolved_profile()
        if profile is not None:
            return [synthesize_weather(profile, scenario.seed)] * horizon

        days = self.load_weather(scenario.weather_file)
        first = scenario.weather_day
        if scenario.repeated_day:
            if first >= len(days):
                raise ConfigError(f"weather_day {first} beyond the {len(days)} days in {scenario.weather_file}")
            return [days[first]] * horizon
        if first + horizon > len(days):
            raise ConfigError(
                f"{scenario.weather_file} holds {len(days)} days; need {horizon} from day {first}"
            )
        return days[first:first + horizon]

    def synthesize(self, profile: WeatherProfile, seed: int = 0, n_days: int = 1) -> List[WeatherDay]:
        return [synthesize_weather(profile, seed + i) for i in range(n_days)]

    def inspect(self, days: Sequence[WeatherDay], transmissivity: float = 0.7) -> List[DayStatistics]:
        stats = []
        for i, day in enumerate(days):
            summary = day_summary(day, transmissivity)
            stats.append(DayStatistics(
                day=i,
                mean_temp=float(day.temp_out.mean()),
                mean_radiation=float(day.radiation_out.mean()),
                n_day_hours=summary.n_day_hours,
                gamma_day=summary.gamma_day,
                gamma_night=summary.gamma_night,
            ))
        return stats

    def write_synthetic(self, profile: WeatherProfile, path, seed: int = 0, n_days: int = 1) -> Path:
        days = self.synthesize(profile, seed, n_days)
        logger.info(f"Synthesized {n_days} weather day(s) from profile {profile.model_dump()}")
        return self.weather_repository.save_weather(days, path)


# Global weather service instance
weather_service = WeatherService()
