from fastapi import APIRouter, HTTPException, status

from lettuce_climate_optimizer.core.exceptions import OptimizerError, OptimizerValidationError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.result_schema import ComparisonRecord, SolveSummary
from lettuce_climate_optimizer.models.scenario_schema import ScenarioConfig
from lettuce_climate_optimizer.services.solver_service import solver_service


# Create router
router = APIRouter()


def to_http_error(exc: OptimizerError) -> HTTPException:
    if isinstance(exc, OptimizerValidationError):
        return HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=str(exc))
    return HTTPException(status_code=status.HTTP_500_INTERNAL_SERVER_ERROR, detail=f"Solver failed: {exc}")


@router.post(
    "/solve",
    response_model=SolveSummary,
    status_code=status.HTTP_200_OK,
    summary="Solve Scenario",
    description="Run backward induction for a scenario and return its headline numbers"
)
async def solve(scenario: ScenarioConfig):
    try:
        return await solver_service.solve(scenario)
    except OptimizerError as e:
        logger.error(f"Solve failed: {e}")
        raise to_http_error(e)


@router.post(
    "/compare",
    response_model=ComparisonRecord,
    summary="Compare Controllers",
    description="Design the dynamic stochastic, dynamic deterministic and static controllers and compare them"
)
async def compare(scenario: ScenarioConfig):
    try:
        return await solver_service.compare(scenario)
    except OptimizerError as e:
        logger.error(f"Comparison failed: {e}")
        raise to_http_error(e)


@router.get(
    "/health",
    summary="Health Check",
    description="Check if the service is healthy"
)
async def health_check():
    return {
        "status": "healthy",
        "service": "Lettuce Climate Optimizer"
    }
