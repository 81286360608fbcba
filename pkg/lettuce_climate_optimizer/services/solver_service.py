import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.result_schema import ComparisonRecord, SolveSummary
from lettuce_climate_optimizer.models.scenario_schema import ScenarioConfig
from lettuce_climate_optimizer.models.tables import SolveResult
from lettuce_climate_optimizer.services.controller_service import controller_service, optimal_start
from lettuce_climate_optimizer.services.harness_service import harness_service


class SolverService:
    """Service layer for solver jobs requested over HTTP"""

    def __init__(self):
        self.controller_service = controller_service
        self.harness_service = harness_service
        self._executor: Optional[ThreadPoolExecutor] = None

    @property
    def executor(self) -> ThreadPoolExecutor:
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=1)
        return self._executor

    def solve_and_summarize(self, scenario: ScenarioConfig) -> Tuple[SolveResult, SolveSummary]:
        result = self.controller_service.solve(scenario)
        cell = scenario.grid.nearest_cell(scenario.x0)
        start, value = optimal_start(result.value, cell)
        summary = SolveSummary(
            horizon=scenario.horizon,
            n_cells=scenario.grid.n_cells,
            sigma2=result.sigma2,
            optimal_start=start,
            x0_cell=cell,
            headline_value=value,
            u_day_at_start=float(result.policy.u_day[start, cell]),
            u_night_at_start=float(result.policy.u_night[start, cell]),
        )
        return result, summary

    async def solve(self, scenario: ScenarioConfig) -> SolveSummary:
        logger.info(f"Solve requested: T={scenario.horizon}, N={scenario.grid.n_cells}")
        loop = asyncio.get_running_loop()
        _, summary = await loop.run_in_executor(self.executor, self.solve_and_summarize, scenario)
        return summary

    async def compare(self, scenario: ScenarioConfig) -> ComparisonRecord:
        logger.info(f"Comparison requested: T={scenario.horizon}, N={scenario.grid.n_cells}")
        loop = asyncio.get_running_loop()
        return await loop.run_in_executor(self.executor, self.harness_service.run_comparison, scenario)

    def shutdown(self):
        if self._executor is not None:
            self._executor.shutdown(wait=False)
            self._executor = None


# Global solver service instance
solver_service = SolverService()
