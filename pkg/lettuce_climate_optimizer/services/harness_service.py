from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from lettuce_climate_optimizer.core.exceptions import OptimizerError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.params_schema import RevenueParams
from lettuce_climate_optimizer.models.result_schema import ComparisonRecord, ControllerOutcome, SweepResult, SweepRow
from lettuce_climate_optimizer.models.scenario_schema import (
    ALL_CONTROLLERS,
    ControllerKind,
    ControllerSpec,
    ScenarioConfig,
    StateGrid,
    SweepParameter,
    SweepSpec,
)
from lettuce_climate_optimizer.services.controller_service import ControllerDesign, ControllerService, ControllerTables
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.simulation_service import SimulationService

# Sweep grids in internal units: day-1, kg m-2, day index, kg m-2
DEFAULT_SWEEP_VALUES: Dict[SweepParameter, List[float]] = {
    SweepParameter.SIGMA2: [1e-6, 2e-6, 1e-5, 1e-4, 5e-4, 1e-3],
    SweepParameter.MARGIN: [0.005, 0.015, 0.050, 0.100, 0.200, 0.300],
    SweepParameter.START_DAY: [float(k) for k in range(11)],
    SweepParameter.START_WEIGHT: [0.005, 0.010, 0.020, 0.040, 0.080],
}

DOMINANCE_SLACK = 1e-6

SWEEP_ERRORS = (OptimizerError, ValidationError, ValueError)


def warn_if_clipped(grid: StateGrid, x: float, label: str) -> None:
    if not grid.x_min <= x <= grid.x_max:
        logger.warning(f"{label}={x} lies outside [{grid.x_min}, {grid.x_max}] kg m-2; clipped to the grid boundary")


class HarnessService:
    """Service layer for the controller comparison and the sensitivity sweeps"""

    def __init__(self, threads: Optional[int] = None):
        self.controller_service = ControllerService(threads)
        self.simulation_service = SimulationService()

    def _outcome(self, design: ControllerDesign, tables: ControllerTables) -> ControllerOutcome:
        dynamics = tables.dynamics
        p0 = np.zeros(len(dynamics.points))
        p0[design.cell] = 1.0
        density = self.simulation_service.propagate_density(
            dynamics, design.policy, p0, tables.eval_noise, design.start_day
        )
        return ControllerOutcome(
            kind=design.kind,
            design_sigma2=design.design_sigma2,
            eval_sigma2=design.eval_sigma2,
            start_day=design.start_day,
            performance=design.performance,
            harvest=self.simulation_service.harvest_stats(density, dynamics),
            static_control=design.static_control,
        )

    def run_comparison(self, scenario: ScenarioConfig, x0: Optional[float] = None,
                       start_day: Optional[int] = None,
                       controllers: Sequence[ControllerKind] = ALL_CONTROLLERS) -> ComparisonRecord:
        """Design every controller, score each at the truth from its best planting day, and compare."""
        x0 = scenario.x0 if x0 is None else x0
        warn_if_clipped(scenario.grid, x0, "x0")
        cell = scenario.grid.nearest_cell(x0)
        dynamics = ScenarioDynamics(scenario)
        snap = abs(x0 - float(dynamics.points[cell]))
        logger.info(f"Comparing {[c.value for c in controllers]} from x0={x0} (cell {cell})")

        outcomes = []
        for kind in controllers:
            tables = self.controller_service.prepare(ControllerSpec(kind=kind), scenario, dynamics)
            design = self.controller_service.design(tables, cell, start_day)
            outcomes.append(self._outcome(design, tables))

        value_ratios: Dict[str, float] = {}
        std_ratios: Dict[str, float] = {}
        reference = next((o for o in outcomes if o.kind == ControllerKind.DYNAMIC_STOCHASTIC), None)
        if reference is not None:
            for outcome in outcomes:
                if reference.performance != 0:
                    value_ratios[outcome.kind.value] = outcome.performance / reference.performance
                if reference.harvest.std > 0:
                    std_ratios[outcome.kind.value] = outcome.harvest.std / reference.harvest.std

        return ComparisonRecord(
            x0=x0,
            x0_cell=cell,
            snap_distance=snap,
            outcomes=outcomes,
            value_ratios=value_ratios,
            std_ratios=std_ratios,
        )

    def _sweep_scenario(self, spec: SweepSpec, value: float) -> ScenarioConfig:
        base = spec.scenario
        if spec.parameter == SweepParameter.SIGMA2:
            return base.with_sigma2(value)
        if spec.parameter == SweepParameter.MARGIN:
            revenue = RevenueParams(**{**base.revenue.model_dump(), "margin": value})
            return base.model_copy(update={"revenue": revenue})
        return base

    def _row(self, spec: SweepSpec, value: float, kind: ControllerKind, tables: ControllerTables) -> SweepRow:
        scenario = spec.scenario
        if spec.parameter == SweepParameter.START_DAY:
            cell, start_day = scenario.grid.nearest_cell(scenario.x0), int(value)
        elif spec.parameter == SweepParameter.START_WEIGHT:
            cell, start_day = scenario.grid.nearest_cell(value), scenario.start_day
        else:
            cell, start_day = scenario.grid.nearest_cell(scenario.x0), None
        design = self.controller_service.design(tables, cell, start_day)
        outcome = self._outcome(design, tables)
        return SweepRow(
            parameter_value=value,
            controller=kind,
            performance=outcome.performance,
            harvest_std=outcome.harvest.std,
            p_in_band=outcome.harvest.p_in_band,
            start_day=outcome.start_day,
        )

    def run_sweep(self, spec: SweepSpec) -> SweepResult:
        """One row per (value, controller) in the order given; a failing cell becomes an error row."""
        logger.info(f"Sweeping {spec.parameter.value} over {spec.values}")
        shared_dynamics: Optional[ScenarioDynamics] = None
        # Start day and start weight pick from tables that do not depend on the swept value
        reusable = spec.parameter in (SweepParameter.START_DAY, SweepParameter.START_WEIGHT)
        prepared: Dict[ControllerKind, ControllerTables] = {}

        rows: List[SweepRow] = []
        for value in spec.values:
            try:
                scenario = self._sweep_scenario(spec, value)
                if spec.parameter == SweepParameter.MARGIN:
                    dynamics = ScenarioDynamics(scenario)
                else:
                    shared_dynamics = shared_dynamics or ScenarioDynamics(scenario)
                    dynamics = shared_dynamics
            except SWEEP_ERRORS as exc:
                logger.error(f"Sweep value {value} rejected: {exc}")
                rows.extend(SweepRow(parameter_value=value, controller=kind, error=str(exc)) for kind in spec.controllers)
                continue

            if spec.parameter == SweepParameter.START_WEIGHT:
                warn_if_clipped(scenario.grid, value, "start_weight")

            for kind in spec.controllers:
                try:
                    tables = prepared.get(kind)
                    if tables is None:
                        tables = self.controller_service.prepare(ControllerSpec(kind=kind), scenario, dynamics)
                        if reusable:
                            prepared[kind] = tables
                    rows.append(self._row(spec, value, kind, tables))
                except SWEEP_ERRORS as exc:
                    logger.error(f"Sweep cell ({value}, {kind.value}) failed: {exc}")
                    rows.append(SweepRow(parameter_value=value, controller=kind, error=str(exc)))

        result = SweepResult(parameter=spec.parameter, rows=rows)
        self.check_dominance(result)
        return result

    def check_dominance(self, result: SweepResult) -> List[float]:
        """Values at which some controller beats the dynamic stochastic one; logged, not raised."""
        violations = []
        by_value: Dict[float, Dict[ControllerKind, SweepRow]] = {}
        for row in result.rows:
            by_value.setdefault(row.parameter_value, {})[row.controller] = row
        for value, cells in by_value.items():
            best = cells.get(ControllerKind.DYNAMIC_STOCHASTIC)
            if best is None or best.performance is None:
                continue
            for kind, row in cells.items():
                if row.performance is not None and row.performance > best.performance + DOMINANCE_SLACK:
                    logger.warning(
                        f"{kind.value} beats dynamic_stochastic at {result.parameter.value}={value}: "
                        f"{row.performance} > {best.performance}"
                    )
                    violations.append(value)
        return violations


# Global harness service instance
harness_service = HarnessService()
