import numpy as np
import pytest

from lettuce_climate_optimizer.models.scenario_schema import ControlBox, NoiseParams, ScenarioConfig, StateGrid
from lettuce_climate_optimizer.models.weather_model import synthesize_weather
from lettuce_climate_optimizer.models.weather_schema import WEATHER_PRESETS, WeatherDay, WeatherProfile
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics


@pytest.fixture
def day79() -> WeatherDay:
    return synthesize_weather(WEATHER_PRESETS["day79"])


@pytest.fixture
def coarse_box() -> ControlBox:
    """5 x 5 lattice: day 10..20 by 2.5, night 5..10 by 1.25"""
    return ControlBox(day_range=(10.0, 20.0), night_range=(5.0, 10.0), day_step=2.5, night_step=1.25)


@pytest.fixture
def small_scenario(coarse_box) -> ScenarioConfig:
    """N = 60, T = 6 nominal scenario started close to the harvest band"""
    return ScenarioConfig(
        weather_preset="day79",
        horizon=6,
        grid=StateGrid(n_cells=60),
        control_box=coarse_box,
        noise=NoiseParams(sigma2=1e-4),
        x0=0.27,
        mc_runs=500,
    )


@pytest.fixture
def small_dynamics(small_scenario) -> ScenarioDynamics:
    return ScenarioDynamics(small_scenario)


@pytest.fixture
def warm_scenario() -> ScenarioConfig:
    """Outdoor air above every setpoint: all candidates realize the same climate at zero cost"""
    profile = WeatherProfile(mean_temp=25.0, peak_radiation=400.0, day_length=14.0)
    return ScenarioConfig(
        weather_profile=profile,
        horizon=3,
        grid=StateGrid(n_cells=40),
        control_box=ControlBox(day_range=(5.0, 10.0), night_range=(5.0, 10.0), day_step=2.5, night_step=2.5),
        x0=0.2,
    )


@pytest.fixture
def frozen_scenario() -> ScenarioConfig:
    """Every setpoint leaves the crop model outside its temperature domain"""
    profile = WeatherProfile(mean_temp=-10.0, peak_radiation=100.0, day_length=8.0)
    return ScenarioConfig(
        weather_profile=profile,
        horizon=2,
        grid=StateGrid(n_cells=20),
        control_box=ControlBox(day_range=(0.0, 2.0), night_range=(0.0, 2.0), day_step=1.0, night_step=1.0),
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
