import numpy as np
import pytest

from lettuce_climate_optimizer.core.exceptions import CropDomainError
from lettuce_climate_optimizer.models.crop_model import LettuceCropModel
from lettuce_climate_optimizer.models.params_schema import CropParams
from lettuce_climate_optimizer.models.weather_model import classify_hours, day_summary, synthesize_weather
from lettuce_climate_optimizer.models.weather_schema import WEATHER_PRESETS, WeatherDay


@pytest.fixture
def crop():
    return LettuceCropModel()


def test_derived_constants():
    params = CropParams()
    assert params.c_resp == pytest.approx(3.30831e-7, rel=1e-9)
    assert params.interception_rate == pytest.approx(52.3125, rel=1e-12)


@pytest.mark.parametrize("temp", [-5.0, 3.0, 12.5, 20.0, 31.0])
def test_q10_doubling(crop, temp):
    assert crop.respiration(0.1, temp + 10.0) == pytest.approx(2.0 * crop.respiration(0.1, temp), rel=1e-14)
    assert crop.co2_compensation(temp + 10.0) == pytest.approx(2.0 * crop.co2_compensation(temp), rel=1e-14)


def test_no_crop_no_photosynthesis(crop):
    assert crop.photosynthesis(0.0, 18.0, 300.0) == 0.0


def test_no_light_no_photosynthesis(crop):
    assert crop.phot_max(18.0, 0.0) == 0.0


def test_interception_saturates(crop):
    assert crop.interception(1.0) == pytest.approx(1.0, abs=1e-12)
    assert 0.0 < crop.interception(0.01) < crop.interception(0.02) < 1.0


@pytest.mark.parametrize("temp", [0.0, 2.5, 43.0, 50.0])
def test_domain_error_outside_carboxylation_window(crop, temp):
    with pytest.raises(CropDomainError) as info:
        crop.co2_conductance(temp)
    assert info.value.temperature == temp
    assert not crop.in_domain(temp)


def test_domain_error_names_first_offending_temperature(crop):
    with pytest.raises(CropDomainError) as info:
        crop.photosynthesis(0.1, np.array([10.0, 1.0, 45.0]), 100.0)
    assert info.value.temperature == 1.0


def test_daily_growth_is_plausible(crop, day79):
    growth = crop.daily_growth(0.2, 20.0, 15.0, day79)
    # A few g m-2 per day for a closed canopy in early spring
    assert 0.003 < growth < 0.02
    assert crop.daily_growth(0.2, 20.0, 5.0, day79) > crop.daily_growth(0.2, 10.0, 5.0, day79)


def test_small_plants_grow_slower(crop, day79):
    assert 0 < crop.daily_growth(0.005, 15.0, 10.0, day79) < crop.daily_growth(0.1, 15.0, 10.0, day79)


def test_dark_day_only_respires(crop):
    day = WeatherDay.from_arrays(np.zeros(24), np.full(24, 12.0), np.full(24, 0.0), np.full(24, 2.0))
    # The empty day class is skipped, whatever its setpoint
    growth = crop.daily_growth(0.1, -40.0, 12.0, day)
    p = crop.params
    expected = -p.c_day * p.c_beta * float(crop.respiration(0.1, 12.0))
    assert growth == pytest.approx(expected, rel=1e-12)


def test_growth_broadcasts_over_states_and_temperatures(crop, day79):
    summary = day_summary(day79)
    x = np.linspace(0.01, 0.3, 5)
    t_day = np.array([12.0, 16.0, 20.0])[:, None]
    t_night = np.array([8.0, 8.0, 8.0])[:, None]
    table = crop.growth_rate(x[None, :], t_day, t_night, summary)
    assert table.shape == (3, 5)
    assert table[2, 4] == pytest.approx(float(crop.growth_rate(x[4], 20.0, 8.0, summary)), rel=1e-14)


@pytest.mark.parametrize("preset", sorted(WEATHER_PRESETS))
@pytest.mark.parametrize("x", [0.005, 0.1, 0.3])
def test_warmer_nights_above_outdoor_air_never_add_growth(crop, preset, x):
    day = synthesize_weather(WEATHER_PRESETS[preset])
    night_out = day.temp_out[~classify_hours(day).as_array()]
    u_night = np.linspace(np.ceil(night_out.max()), np.ceil(night_out.max()) + 12.0, 25)
    growth = np.array([crop.daily_growth(x, 18.0, u, day) for u in u_night])
    assert (np.diff(growth) <= 1e-15).all()


@pytest.mark.parametrize("scale", [1.5, 3.0])
def test_more_light_never_reduces_growth(crop, day79, scale):
    summary = day_summary(day79)
    brighter = summary.model_copy(update={
        "gamma_day": summary.gamma_day * scale,
        "gamma_night": summary.gamma_night * scale,
    })
    x = np.linspace(0.005, 0.4, 9)
    for t_day, t_night in [(10.0, 5.0), (18.0, 10.0), (25.0, 15.0)]:
        base = crop.growth_rate(x, t_day, t_night, summary)
        assert (crop.growth_rate(x, t_day, t_night, brighter) >= base).all()
