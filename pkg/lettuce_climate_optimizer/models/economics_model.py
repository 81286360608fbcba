import numpy as np
from typing import Optional

from lettuce_climate_optimizer.models.params_schema import EconParams, RevenueParams
from lettuce_climate_optimizer.models.weather_schema import DayNightMask, HourlyWeather, WeatherDay

KELVIN = 273.15
# Below this setpoint-to-outdoor gap the radiative coefficient is taken at its cap [degC]
SINGULAR_GAP = 1e-9
# Band edges are closed up to rounding of x* +- margin [kg m-2]
BAND_TOLERANCE = 1e-12


class GreenhouseEconomics:
    """Heating cost from the greenhouse energy balance, and harvest revenue"""

    def __init__(self, econ: Optional[EconParams] = None, revenue: Optional[RevenueParams] = None):
        self.econ = econ or EconParams()
        self.revenue_params = revenue or RevenueParams()

    @staticmethod
    def external_coeff(wind):
        """Outside convective heat transfer of a saw-tooth roof [W m-2 K-1]"""
        wind = np.asarray(wind, dtype=float)
        return np.where(wind > 4.0, 2.5 * wind**0.8, 2.8 + 1.2 * wind)

    def radiative_coeff(self, u, temp_out, temp_sky):
        e = self.econ
        u, temp_out, temp_sky = np.broadcast_arrays(
            np.asarray(u, dtype=float), np.asarray(temp_out, dtype=float), np.asarray(temp_sky, dtype=float)
        )
        gap = u - temp_out
        singular = np.abs(gap) < SINGULAR_GAP
        ratio = np.abs(np.divide(u - temp_sky, gap, out=np.zeros_like(gap), where=~singular))
        alpha = 4.0 * e.c_emis * e.c_sigma_SB * (0.5 * u + 0.5 * temp_out + KELVIN) ** 3 * ratio
        return np.where(singular, e.alpha_cap, np.minimum(e.alpha_cap, alpha))

    def heat_loss_arrays(self, u, temp_out, temp_sky, wind, is_day):
        """Specific heat loss Q per kelvin [W m-2 K-1], broadcasting over hours and setpoints."""
        e = self.econ
        is_day = np.asarray(is_day, dtype=bool)
        ventilation = np.where(is_day, 1.0, 0.2) * e.c_navg * e.c_H
        screen = np.where(is_day, 1.0, e.c_Sc)
        outer = self.radiative_coeff(u, temp_out, temp_sky) + self.external_coeff(wind)
        return e.rho_cp * ventilation + e.c_As * screen / (1.0 / e.c_alpha_heat + 1.0 / outer)

    def heat_loss_coeff(self, u: float, hour: HourlyWeather, is_day: bool) -> float:
        return float(self.heat_loss_arrays(u, hour.temp_out, hour.temp_sky, hour.wind, is_day))

    def heating_cost_arrays(self, u_day, u_night, radiation_out, temp_out, temp_sky, wind, is_day):
        """Daily heating cost for arrays of setpoint pairs [EUR m-2 day-1].

        The hourly arrays have length 24; ``u_day``/``u_night`` broadcast
        against each other and gain a trailing hour axis.
        """
        e = self.econ
        u_day, u_night = np.broadcast_arrays(np.asarray(u_day, dtype=float), np.asarray(u_night, dtype=float))
        setpoint = np.where(is_day, u_day[..., None], u_night[..., None])
        q = self.heat_loss_arrays(setpoint, temp_out, temp_sky, wind, is_day)
        solar = radiation_out * e.c_tau_cover * e.c_sens
        demand = np.maximum(q * (setpoint - temp_out) - solar, 0.0)
        return e.c_L * demand.sum(axis=-1)

    def daily_heating_cost(self, u_day: float, u_night: float, day: WeatherDay, mask: DayNightMask) -> float:
        cost = self.heating_cost_arrays(
            u_day, u_night, day.radiation_out, day.temp_out, day.temp_sky, day.wind, mask.as_array()
        )
        return float(cost)

    def revenue(self, x):
        r = self.revenue_params
        x = np.asarray(x, dtype=float)
        return np.where(self.in_band(x), r.c_dryfrac * r.c_price * x, 0.0)

    def in_band(self, x):
        low, high = self.revenue_params.band
        x = np.asarray(x, dtype=float)
        return (x >= low - BAND_TOLERANCE) & (x <= high + BAND_TOLERANCE)
