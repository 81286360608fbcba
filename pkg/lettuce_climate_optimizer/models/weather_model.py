"""Hour classification, day-level averages and the parametric weather surrogate."""
from typing import Tuple

import numpy as np

from lettuce_climate_optimizer.models.weather_schema import (
    DAYLIGHT_THRESHOLD,
    HOURS_PER_DAY,
    DayNightMask,
    DaySummary,
    WeatherDay,
    WeatherProfile,
)

COVER_TRANSMISSIVITY = 0.7


def synthesize_weather(profile: WeatherProfile, seed: int = 0) -> WeatherDay:
    """Build one surrogate day from a profile.

    Radiation is a half-sine of width ``day_length`` centred on hour 12,
    integrated exactly over every hour, so the daily mean equals
    (2/pi) * peak * day_length / 24. Outdoor temperature is a sinusoid
    around ``mean_temp`` peaking at hour 14, plus optional seeded jitter.
    """
    hours = np.arange(HOURS_PER_DAY, dtype=float)

    radiation = np.zeros(HOURS_PER_DAY)
    length = profile.day_length
    if length > 0 and profile.peak_radiation > 0:
        sunrise = 12.0 - length / 2.0
        sunset = 12.0 + length / 2.0
        a = np.clip(hours, sunrise, sunset)
        b = np.clip(hours + 1.0, sunrise, sunset)
        radiation = profile.peak_radiation * (length / np.pi) * (
            np.cos(np.pi * (a - sunrise) / length) - np.cos(np.pi * (b - sunrise) / length)
        )
        radiation = np.maximum(radiation, 0.0)

    temp_out = profile.mean_temp + profile.temp_amplitude * np.sin(2.0 * np.pi * (hours - 8.0) / HOURS_PER_DAY)
    if profile.temp_jitter > 0:
        rng = np.random.default_rng(seed)
        temp_out = temp_out + rng.normal(0.0, profile.temp_jitter, HOURS_PER_DAY)

    temp_sky = temp_out - profile.sky_depression
    wind = np.full(HOURS_PER_DAY, profile.wind_mean)
    return WeatherDay.from_arrays(radiation, temp_out, temp_sky, wind)


def classify_hours(day: WeatherDay) -> DayNightMask:
    """An hour is day when outdoor radiation is at least 20 W m-2 (20 itself counts as day)."""
    is_day = day.radiation_out >= DAYLIGHT_THRESHOLD
    return DayNightMask(is_day=tuple(bool(v) for v in is_day))


def day_summary(day: WeatherDay, transmissivity: float = COVER_TRANSMISSIVITY) -> DaySummary:
    mask = classify_hours(day)
    is_day = mask.as_array()
    indoor = transmissivity * day.radiation_out

    n_day = int(is_day.sum())
    n_night = HOURS_PER_DAY - n_day
    # Empty class: average 0, weighted by a zero hour count downstream
    gamma_day = float(indoor[is_day].mean()) if n_day else 0.0
    gamma_night = float(indoor[~is_day].mean()) if n_night else 0.0

    return DaySummary(
        n_day_hours=n_day,
        n_night_hours=n_night,
        gamma_day=gamma_day,
        gamma_night=gamma_night,
        mask=mask,
    )


def class_temperature(temp_out: np.ndarray, members: np.ndarray, setpoint) -> np.ndarray:
    """Mean of max(outdoor, setpoint) over the member hours, for any array of setpoints."""
    setpoint = np.asarray(setpoint, dtype=float)
    if not members.any():
        return np.zeros_like(setpoint)
    outdoor = temp_out[members]
    return np.maximum(outdoor, setpoint[..., None]).mean(axis=-1)


def realized_temps(day: WeatherDay, mask: DayNightMask, u_day: float, u_night: float) -> Tuple[float, float]:
    """Average indoor day and night temperatures; indoor never drops below outdoor."""
    temp_out = day.temp_out
    is_day = mask.as_array()
    t_day = class_temperature(temp_out, is_day, u_day)
    t_night = class_temperature(temp_out, ~is_day, u_night)
    return float(t_day), float(t_night)
