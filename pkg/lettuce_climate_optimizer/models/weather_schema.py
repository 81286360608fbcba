from typing import Annotated, Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


HOURS_PER_DAY = 24
# Outdoor radiation below this is night [W m-2]
DAYLIGHT_THRESHOLD = 20.0


class HourlyWeather(BaseModel):
    """One hour of exogenous greenhouse inputs"""

    model_config = ConfigDict(frozen=True)

    radiation_out: Annotated[float, Field(..., ge=0, allow_inf_nan=False, description="Outdoor global radiation [W m-2]")]
    temp_out: Annotated[float, Field(..., allow_inf_nan=False, description="Outdoor air temperature [degC]")]
    temp_sky: Annotated[float, Field(..., allow_inf_nan=False, description="Sky temperature [degC]")]
    wind: Annotated[float, Field(..., ge=0, allow_inf_nan=False, description="Wind speed [m s-1]")]

    @model_validator(mode="after")
    def check_sky_band(self) -> "HourlyWeather":
        if abs(self.temp_sky - self.temp_out) > 60.0:
            raise ValueError(
                f"temp_sky {self.temp_sky} outside +-60 degC of temp_out {self.temp_out}"
            )
        return self


class WeatherDay(BaseModel):
    """Twenty-four hourly records of one day, h = 0..23"""

    model_config = ConfigDict(frozen=True)

    hours: Tuple[HourlyWeather, ...]

    @field_validator("hours")
    @classmethod
    def validate_hour_count(cls, v):
        if len(v) != HOURS_PER_DAY:
            raise ValueError(f"a weather day needs exactly {HOURS_PER_DAY} hours, got {len(v)}")
        return v

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(hour, name) for hour in self.hours], dtype=float)

    @property
    def radiation_out(self) -> np.ndarray:
        return self.column("radiation_out")

    @property
    def temp_out(self) -> np.ndarray:
        return self.column("temp_out")

    @property
    def temp_sky(self) -> np.ndarray:
        return self.column("temp_sky")

    @property
    def wind(self) -> np.ndarray:
        return self.column("wind")

    @classmethod
    def from_arrays(cls, radiation_out, temp_out, temp_sky, wind) -> "WeatherDay":
        hours = tuple(
            HourlyWeather(radiation_out=float(r), temp_out=float(t), temp_sky=float(s), wind=float(w))
            for r, t, s, w in zip(radiation_out, temp_out, temp_sky, wind)
        )
        return cls(hours=hours)


class DayNightMask(BaseModel):
    model_config = ConfigDict(frozen=True)

    is_day: Tuple[bool, ...]

    @field_validator("is_day")
    @classmethod
    def validate_length(cls, v):
        if len(v) != HOURS_PER_DAY:
            raise ValueError(f"mask needs {HOURS_PER_DAY} entries, got {len(v)}")
        return v

    def as_array(self) -> np.ndarray:
        return np.array(self.is_day, dtype=bool)


class DaySummary(BaseModel):
    """Day/night hour counts and class-averaged indoor radiation"""

    model_config = ConfigDict(frozen=True)

    n_day_hours: Annotated[int, Field(..., ge=0, le=HOURS_PER_DAY)]
    n_night_hours: Annotated[int, Field(..., ge=0, le=HOURS_PER_DAY)]
    gamma_day: Annotated[float, Field(..., ge=0, description="Mean indoor radiation over day hours [W m-2]")]
    gamma_night: Annotated[float, Field(..., ge=0, description="Mean indoor radiation over night hours [W m-2]")]
    mask: DayNightMask

    @model_validator(mode="after")
    def check_counts(self) -> "DaySummary":
        if self.n_day_hours + self.n_night_hours != HOURS_PER_DAY:
            raise ValueError("day and night hours must add up to 24")
        return self


class WeatherProfile(BaseModel):
    """Parametric surrogate for one day of weather"""

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "mean_temp": 4.6,
                "temp_amplitude": 4.0,
                "peak_radiation": 596.9,
                "day_length": 12.0,
                "sky_depression": 12.0,
                "wind_mean": 3.0,
            }
        },
    )

    mean_temp: Annotated[float, Field(..., allow_inf_nan=False, description="Daily mean outdoor temperature [degC]")]
    temp_amplitude: Annotated[float, Field(0.0, ge=0, description="Half peak-to-peak temperature swing [degC]")]
    peak_radiation: Annotated[float, Field(..., ge=0, description="Radiation at solar noon [W m-2]")]
    day_length: Annotated[float, Field(..., ge=0, le=HOURS_PER_DAY, description="Hours between sunrise and sunset")]
    sky_depression: Annotated[float, Field(10.0, ge=0, le=60, description="temp_out - temp_sky [degC]")]
    wind_mean: Annotated[float, Field(3.0, ge=0, description="Constant wind speed [m s-1]")]
    temp_jitter: Annotated[float, Field(0.0, ge=0, description="Std of seeded hourly temperature noise [degC]")]


def _preset(mean_temp: float, mean_radiation: float, day_length: float, **kwargs) -> WeatherProfile:
    # Invert mean = (2/pi) * peak * day_length / 24
    peak = mean_radiation * HOURS_PER_DAY * np.pi / (2.0 * day_length)
    return WeatherProfile(mean_temp=mean_temp, peak_radiation=float(peak), day_length=day_length, **kwargs)


# Surrogates for the three scenario days (cold/dark, nominal, warm/bright)
WEATHER_PRESETS: Dict[str, WeatherProfile] = {
    "day5": _preset(-4.0, 53.0, 8.5, temp_amplitude=2.0, sky_depression=15.0, wind_mean=4.0),
    "day79": _preset(4.6, 190.0, 12.0, temp_amplitude=4.0, sky_depression=12.0, wind_mean=3.0),
    "day187": _preset(18.0, 330.0, 16.5, temp_amplitude=5.0, sky_depression=8.0, wind_mean=2.5),
}


class DayStatistics(BaseModel):
    """Per-day statistics reported by `weather inspect`"""

    day: int
    mean_temp: float
    mean_radiation: float
    n_day_hours: int
    gamma_day: float
    gamma_night: float
