import numpy as np
from typing import Optional

from lettuce_climate_optimizer.core.exceptions import CropDomainError
from lettuce_climate_optimizer.models.params_schema import CropParams
from lettuce_climate_optimizer.models.weather_model import day_summary, realized_temps
from lettuce_climate_optimizer.models.weather_schema import HOURS_PER_DAY, DaySummary, WeatherDay


class LettuceCropModel:
    """Single-state lettuce dry weight model.

    All rate functions accept numpy arrays and broadcast over their
    arguments; fluxes are in kg m-2 s-1, the daily growth in kg m-2 day-1.
    """

    def __init__(self, params: Optional[CropParams] = None):
        self.params = params or CropParams()

    def co2_compensation(self, temp):
        p = self.params
        return p.c_gamma * p.c_q10 ** (p.c_aresp * (np.asarray(temp, dtype=float) - p.c_reftemp_photo))

    def light_use_efficiency(self, temp):
        p = self.params
        gamma = self.co2_compensation(temp)
        return p.c_lue * (p.c_co2 - gamma) / (p.c_co2 + 2.0 * gamma)

    def carboxylation_conductance(self, temp):
        p = self.params
        temp = np.asarray(temp, dtype=float)
        return p.c_car2 * temp**2 + p.c_car1 * temp + p.c_car0

    def in_domain(self, temp) -> np.ndarray:
        """True where the carboxylation conductance is positive."""
        return self.carboxylation_conductance(temp) > 0

    def co2_conductance(self, temp):
        p = self.params
        sigma_car = self.carboxylation_conductance(temp)
        bad = ~(sigma_car > 0)
        if np.any(bad):
            offending = np.broadcast_to(np.asarray(temp, dtype=float), np.shape(sigma_car))[bad]
            raise CropDomainError(float(offending.flat[0]))
        return 1.0 / (1.0 / p.c_bnd + 1.0 / p.c_stm + 1.0 / sigma_car)

    def phot_max(self, temp, gamma):
        p = self.params
        gamma = np.asarray(gamma, dtype=float)
        sigma = self.co2_conductance(temp)
        light = self.light_use_efficiency(temp) * p.c_par * gamma
        co2 = sigma * (p.c_co2 - self.co2_compensation(temp))
        # light == 0 gives 0 / co2 = 0 exactly
        return light * co2 / (light + co2)

    def interception(self, x):
        return 1.0 - np.exp(-self.params.interception_rate * np.asarray(x, dtype=float))

    def photosynthesis(self, x, temp, gamma):
        return self.phot_max(temp, gamma) * self.interception(x)

    def respiration(self, x, temp):
        p = self.params
        return np.asarray(x, dtype=float) * p.c_resp * p.c_q10 ** (
            p.c_aresp * (np.asarray(temp, dtype=float) - p.c_reftemp_resp)
        )

    def growth_rate(self, x, t_day, t_night, summary: DaySummary):
        """Daily growth from class temperatures; a class without hours contributes nothing."""
        p = self.params
        photo = 0.0
        resp = 0.0
        if summary.n_day_hours:
            photo = photo + summary.n_day_hours * self.photosynthesis(x, t_day, summary.gamma_day)
            resp = resp + summary.n_day_hours * self.respiration(x, t_day)
        if summary.n_night_hours:
            photo = photo + summary.n_night_hours * self.photosynthesis(x, t_night, summary.gamma_night)
            resp = resp + summary.n_night_hours * self.respiration(x, t_night)
        return p.c_day * p.c_beta * (p.c_yield * photo / HOURS_PER_DAY - resp / HOURS_PER_DAY)

    def daily_growth(self, x: float, u_day: float, u_night: float, day: WeatherDay,
                     transmissivity: float = 0.7) -> float:
        summary = day_summary(day, transmissivity)
        t_day, t_night = realized_temps(day, summary.mask, u_day, u_night)
        return float(self.growth_rate(x, t_day, t_night, summary))
