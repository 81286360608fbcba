from fastapi import APIRouter

from lettuce_climate_optimizer.routers.v1.solver import router as solver_router
from lettuce_climate_optimizer.routers.v1.weather import router as weather_router

# Create base router
base_router = APIRouter(prefix='/v1')

# Include all routers with proper tags
base_router.include_router(router=solver_router, prefix="/solver", tags=['solver'])
base_router.include_router(router=weather_router, prefix="/weather", tags=['weather'])
