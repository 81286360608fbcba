from typing import Dict, List

from fastapi import APIRouter, Query

from lettuce_climate_optimizer.models.weather_schema import WEATHER_PRESETS, DayStatistics, WeatherProfile
from lettuce_climate_optimizer.services.weather_service import weather_service


# Create router
router = APIRouter()


@router.get("/presets", response_model=Dict[str, WeatherProfile], summary="Get Weather Presets")
async def get_presets():
    return WEATHER_PRESETS


@router.post("/summary", response_model=List[DayStatistics], summary="Summarize Synthetic Weather")
async def summarize_profile(
    profile: WeatherProfile,
    seed: int = Query(0, ge=0),
    days: int = Query(1, ge=1, le=366)
):
    return weather_service.inspect(weather_service.synthesize(profile, seed, days))
