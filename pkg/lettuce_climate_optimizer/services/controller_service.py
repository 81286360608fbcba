from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.scenario_schema import (
    ControllerKind,
    ControllerSpec,
    NoiseParams,
    ScenarioConfig,
    StaticControl,
)
from lettuce_climate_optimizer.models.tables import GrowthTable, Policy, SolveResult, ValueTable
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.mdp_service import ConstantSearch, MDPSolver


def optimal_start(value: ValueTable, cell: int = 0) -> Tuple[int, float]:
    """Planting day with the best value at a cell; the earliest day wins ties.

    Only days 0..T-1 qualify, a round needs at least one day of growth.
    """
    column = value.v[:-1, cell]
    day = int(np.argmax(column))
    return day, float(column[day])


@dataclass
class ControllerTables:
    """Everything a controller needs that does not depend on x0 or the start day"""

    kind: ControllerKind
    design_sigma2: float
    eval_sigma2: float
    dynamics: ScenarioDynamics
    eval_noise: NoiseParams
    solver: MDPSolver
    policy: Optional[Policy] = None
    value: Optional[ValueTable] = None
    growth: Optional[GrowthTable] = None
    search: Optional[ConstantSearch] = None
    _static_values: Dict[int, ValueTable] = field(default_factory=dict)


@dataclass(frozen=True)
class ControllerDesign:
    kind: ControllerKind
    design_sigma2: float
    eval_sigma2: float
    start_day: int
    cell: int
    performance: float
    policy: Policy
    value: ValueTable
    static_control: Optional[StaticControl] = None


class ControllerService:
    """Service layer that designs the controllers and scores them at the truth"""

    def __init__(self, threads: Optional[int] = None):
        self.threads = threads

    def solve(self, scenario: ScenarioConfig, dynamics: Optional[ScenarioDynamics] = None,
              sigma2: Optional[float] = None) -> SolveResult:
        """Dynamic stochastic solve at the scenario's noise, or at sigma2 when given."""
        dynamics = dynamics or ScenarioDynamics(scenario)
        noise = scenario.noise if sigma2 is None else scenario.noise.model_copy(update={"sigma2": sigma2})
        return MDPSolver(dynamics, noise, self.threads).backward_induction()

    def prepare(self, spec: ControllerSpec, scenario: ScenarioConfig,
                dynamics: Optional[ScenarioDynamics] = None) -> ControllerTables:
        design_sigma2, eval_sigma2 = spec.resolve(scenario)
        dynamics = dynamics or ScenarioDynamics(scenario)
        design_noise = scenario.noise.model_copy(update={"sigma2": design_sigma2})
        eval_noise = scenario.noise.model_copy(update={"sigma2": eval_sigma2})
        solver = MDPSolver(dynamics, design_noise, self.threads)
        tables = ControllerTables(
            kind=spec.kind,
            design_sigma2=design_sigma2,
            eval_sigma2=eval_sigma2,
            dynamics=dynamics,
            eval_noise=eval_noise,
            solver=solver,
        )
        logger.info(f"Preparing {spec.kind.value} controller: design sigma2={design_sigma2}, eval sigma2={eval_sigma2}")

        if spec.kind == ControllerKind.STATIC_STOCHASTIC:
            tables.search = solver.best_constant_policy()
            return tables

        result = solver.backward_induction()
        tables.policy = result.policy
        tables.growth = result.growth
        if design_sigma2 == eval_sigma2:
            tables.value = result.value
        else:
            tables.value = solver.evaluate_policy(result.policy, eval_noise)
        return tables

    def design(self, tables: ControllerTables, cell: int, start_day: Optional[int] = None,
               optimize_start: bool = False) -> ControllerDesign:
        """Pick the controller for one initial cell.

        With start_day=None the dynamic controllers start on their best planting
        day. The static controller plays the full T day round from day 0 unless
        optimize_start is set; a fixed start_day k gives it the T-k day round
        ending at the common harvest day.
        """
        if tables.kind != ControllerKind.STATIC_STOCHASTIC:
            if start_day is None:
                start_day, performance = optimal_start(tables.value, cell)
            else:
                performance = tables.value.at(start_day, cell)
            return ControllerDesign(
                kind=tables.kind,
                design_sigma2=tables.design_sigma2,
                eval_sigma2=tables.eval_sigma2,
                start_day=start_day,
                cell=cell,
                performance=performance,
                policy=tables.policy,
                value=tables.value,
            )

        search = tables.search
        if start_day is None:
            start_day = optimal_start(ValueTable(search.value), cell)[0] if optimize_start else 0
        index = int(search.choice[start_day, cell])
        u_day, u_night = (float(u) for u in search.candidates[index])
        horizon = tables.dynamics.horizon
        policy = Policy.constant(u_day, u_night, horizon, len(tables.dynamics.points))
        if index not in tables._static_values:
            tables._static_values[index] = tables.solver.evaluate_policy(policy, tables.eval_noise)
        value = tables._static_values[index]
        performance = value.at(start_day, cell)
        logger.info(f"Static controller for cell {cell}, start day {start_day}: ({u_day}, {u_night}) degC")
        return ControllerDesign(
            kind=tables.kind,
            design_sigma2=tables.design_sigma2,
            eval_sigma2=tables.eval_sigma2,
            start_day=start_day,
            cell=cell,
            performance=performance,
            policy=policy,
            value=value,
            static_control=StaticControl(u_day=u_day, u_night=u_night, start_day=start_day, value=performance),
        )

    def design_dynamic_stochastic(self, scenario: ScenarioConfig, cell: int, start_day: Optional[int] = None,
                                  dynamics: Optional[ScenarioDynamics] = None) -> ControllerDesign:
        tables = self.prepare(ControllerSpec(kind=ControllerKind.DYNAMIC_STOCHASTIC), scenario, dynamics)
        return self.design(tables, cell, start_day)

    def design_dynamic_deterministic(self, scenario: ScenarioConfig, cell: int, start_day: Optional[int] = None,
                                     dynamics: Optional[ScenarioDynamics] = None) -> ControllerDesign:
        tables = self.prepare(ControllerSpec(kind=ControllerKind.DYNAMIC_DETERMINISTIC), scenario, dynamics)
        return self.design(tables, cell, start_day)

    def design_static_stochastic(self, scenario: ScenarioConfig, cell: int, start_day: Optional[int] = None,
                                 dynamics: Optional[ScenarioDynamics] = None,
                                 optimize_start: bool = False) -> ControllerDesign:
        """Best constant setpoint pair for x0 in cell, by default over the full round from day 0."""
        tables = self.prepare(ControllerSpec(kind=ControllerKind.STATIC_STOCHASTIC), scenario, dynamics)
        return self.design(tables, cell, start_day, optimize_start)


# Global controller service instance
controller_service = ControllerService()
