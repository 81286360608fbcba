from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, model_validator


class CropParams(BaseModel):
    """Single-state lettuce growth model constants"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    c_beta: float = 0.80
    c_yield: Annotated[float, Field(0.68, description="Yield factor of assimilates to dry matter [-]")]
    c_day: Annotated[float, Field(86400.0, gt=0, description="Seconds per day")]
    c_k: Annotated[float, Field(0.90, description="Extinction coefficient [-]")]
    c_lars: Annotated[float, Field(62.5, description="Shoot leaf area ratio [m2 kg-1]")]
    c_tau_resp: Annotated[float, Field(0.07, ge=0, le=1, description="Root to total dry weight ratio [-]")]
    c_gamma: Annotated[float, Field(7.32e-5, gt=0, description="CO2 compensation point at 20 degC [kg m-3]")]
    c_q10: float = 2.0
    c_aresp: Annotated[float, Field(0.10, description="Q10 exponent scale [degC-1]")]
    c_reftemp_photo: float = 20.0
    c_reftemp_resp: float = 25.0
    c_co2: Annotated[float, Field(7.20e-4, gt=0, description="CO2 density of air [kg m-3]")]
    c_par: float = 0.50
    c_lue: Annotated[float, Field(17e-9, gt=0, description="Light use efficiency [kg J-1]")]
    c_bnd: Annotated[float, Field(0.004, gt=0, description="Boundary layer conductance [m s-1]")]
    c_stm: Annotated[float, Field(0.007, gt=0, description="Stomatal conductance [m s-1]")]
    c_car2: float = -5.11e-6
    c_car1: float = 2.3e-4
    c_car0: float = -6.29e-4
    c_sresp: Annotated[float, Field(3.47e-7, ge=0, description="Shoot maintenance respiration [s-1]")]
    c_rresp: Annotated[float, Field(1.16e-7, ge=0, description="Root maintenance respiration [s-1]")]

    @property
    def c_resp(self) -> float:
        return self.c_sresp * (1.0 - self.c_tau_resp) + self.c_rresp * self.c_tau_resp

    @property
    def interception_rate(self) -> float:
        """kappa in 1 - exp(-kappa x) [m2 kg-1]"""
        return self.c_k * self.c_lars * (1.0 - self.c_tau_resp)


class EconParams(BaseModel):
    """Greenhouse energy balance and heating price constants"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    c_tau_cover: Annotated[float, Field(0.7, gt=0, le=1, description="Cover transmissivity [-]")]
    c_sens: Annotated[float, Field(0.3, gt=0, le=1, description="Radiation fraction turned into sensible heat [-]")]
    c_pGJ: Annotated[float, Field(11.0, gt=0, description="Gas price [EUR GJ-1]")]
    c_eff: Annotated[float, Field(0.90, gt=0, le=1, description="Water sided heater efficiency [-]")]
    rho_cp: Annotated[float, Field(1206.0, gt=0, description="Volumetric heat capacity of air [J m-3 K-1]")]
    c_As: Annotated[float, Field(1.12, gt=0, description="Specific cladding area [-]")]
    c_Sc: Annotated[float, Field(0.6, gt=0, description="Energy screen factor [-]")]
    c_navg: Annotated[float, Field(0.25 / 3600.0, gt=0, description="Ventilation rate when heated [s-1]")]
    c_H: Annotated[float, Field(6.0, gt=0, description="Mean greenhouse height [m]")]
    c_alpha_heat: Annotated[float, Field(4.9 + 2.98, gt=0, description="Inside heat transfer coefficient [W m-2 K-1]")]
    c_emis: Annotated[float, Field(0.90, gt=0, description="Thermal emissivity of the cover [-]")]
    c_sigma_SB: Annotated[float, Field(5.67e-8, gt=0, description="Stefan-Boltzmann constant")]
    alpha_cap: Annotated[float, Field(100.0, gt=0, description="Cap on the radiative coefficient [W m-2 K-1]")]

    @property
    def c_L(self) -> float:
        """Heating price per W h m-2 of demand [EUR]"""
        return 3.6e-6 * self.c_pGJ / self.c_eff


class RevenueParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    x_target: Annotated[float, Field(0.320, gt=0, description="Target harvest dry weight [kg m-2]")]
    margin: Annotated[float, Field(0.015, gt=0, description="Allowed deviation around the target [kg m-2]")]
    c_dryfrac: Annotated[float, Field(20.0, gt=0, description="Fresh to dry weight ratio [-]")]
    c_price: Annotated[float, Field(1.0, ge=0, description="Price of fresh weight [EUR kg-1]")]

    @model_validator(mode="after")
    def check_band(self) -> "RevenueParams":
        if self.x_target - self.margin <= 0:
            raise ValueError("x_target - margin must be positive")
        return self

    @property
    def band(self):
        return self.x_target - self.margin, self.x_target + self.margin
