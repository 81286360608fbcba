import numpy as np
import pytest

from lettuce_climate_optimizer.models.scenario_schema import ControlBox, ControllerKind, ControllerSpec
from lettuce_climate_optimizer.models.tables import Policy, ValueTable
from lettuce_climate_optimizer.services.controller_service import ControllerService, optimal_start
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.mdp_service import MDPSolver


@pytest.fixture
def service():
    return ControllerService(threads=1)


@pytest.fixture
def cell(small_scenario):
    return small_scenario.grid.nearest_cell(small_scenario.x0)


def test_optimal_start_takes_the_earliest_best_day():
    value = ValueTable(np.array([[1.0, 2.0], [3.0, 2.0], [3.0, 1.0], [9.0, 9.0]]))
    assert optimal_start(value, 0) == (1, 3.0)
    assert optimal_start(value, 1) == (0, 2.0)


def test_optimal_start_of_a_flat_column_is_day_zero():
    assert optimal_start(ValueTable(np.ones((5, 3))), 2) == (0, 1.0)


def test_static_controller_never_beats_dynamic(service, small_scenario, small_dynamics, cell):
    dynamic = service.design_dynamic_stochastic(small_scenario, cell, dynamics=small_dynamics)
    static = service.design_static_stochastic(small_scenario, cell, dynamics=small_dynamics)

    assert static.performance <= dynamic.performance + 1e-9
    assert static.static_control is not None
    assert static.static_control.value == static.performance
    assert small_scenario.control_box.contains(static.static_control.u_day, static.static_control.u_night)
    assert (static.policy.u_day == static.static_control.u_day).all()


def test_deterministic_controller_never_beats_dynamic(service, small_scenario, small_dynamics, cell):
    dynamic = service.design_dynamic_stochastic(small_scenario, cell, dynamics=small_dynamics)
    deterministic = service.design_dynamic_deterministic(small_scenario, cell, dynamics=small_dynamics)

    assert deterministic.design_sigma2 == small_scenario.deterministic_sigma2
    assert deterministic.eval_sigma2 == small_scenario.noise.sigma2
    assert deterministic.performance <= dynamic.performance + 1e-9


def test_deterministic_design_at_the_true_noise_is_the_stochastic_controller(service, small_scenario, cell):
    scenario = small_scenario.model_copy(update={"deterministic_sigma2": small_scenario.noise.sigma2})
    dynamics = ScenarioDynamics(scenario)
    dynamic = service.design_dynamic_stochastic(scenario, cell, dynamics=dynamics)
    deterministic = service.design_dynamic_deterministic(scenario, cell, dynamics=dynamics)

    assert np.array_equal(dynamic.policy.u_day, deterministic.policy.u_day)
    assert np.array_equal(dynamic.policy.u_night, deterministic.policy.u_night)
    assert deterministic.performance == dynamic.performance


def test_fixed_start_day_is_respected(service, small_scenario, small_dynamics, cell):
    tables = service.prepare(ControllerSpec(kind=ControllerKind.DYNAMIC_STOCHASTIC), small_scenario, small_dynamics)
    design = service.design(tables, cell, start_day=2)
    assert design.start_day == 2
    assert design.performance == tables.value.at(2, cell)

    best = service.design(tables, cell)
    assert best.performance >= design.performance


def test_singleton_box_collapses_all_controllers(service, small_scenario, cell):
    box = ControlBox(day_range=(15.0, 15.0), night_range=(10.0, 10.0), day_step=1.0, night_step=1.0)
    scenario = small_scenario.model_copy(update={"control_box": box})
    dynamics = ScenarioDynamics(scenario)

    dynamic = service.design_dynamic_stochastic(scenario, cell, dynamics=dynamics)
    static = service.design_static_stochastic(scenario, cell, dynamics=dynamics)

    assert (dynamic.policy.u_day == 15.0).all()
    assert (dynamic.policy.u_night == 10.0).all()
    assert (static.static_control.u_day, static.static_control.u_night) == (15.0, 10.0)
    assert static.start_day == 0
    assert static.performance == pytest.approx(dynamic.value.at(0, cell), abs=1e-10)


def test_static_controller_is_the_best_constant_pair_from_day_zero(service, small_scenario, small_dynamics, cell):
    solver = MDPSolver(small_dynamics, threads=1)
    horizon, n = small_scenario.horizon, small_scenario.grid.n_cells
    best_pair, best_value = None, -np.inf
    for u_day, u_night in small_scenario.control_box.candidates():
        value = solver.evaluate_policy(Policy.constant(u_day, u_night, horizon, n)).at(0, cell)
        if value > best_value + 1e-12:
            best_pair, best_value = (float(u_day), float(u_night)), value

    static = service.design_static_stochastic(small_scenario, cell, dynamics=small_dynamics)

    assert static.start_day == 0
    assert (static.static_control.u_day, static.static_control.u_night) == best_pair
    assert static.performance == pytest.approx(best_value, abs=1e-10)


def test_static_controller_can_also_choose_its_start_day(service, small_scenario, small_dynamics, cell):
    full_round = service.design_static_stochastic(small_scenario, cell, dynamics=small_dynamics)
    free_start = service.design_static_stochastic(small_scenario, cell, dynamics=small_dynamics, optimize_start=True)
    dynamic = service.design_dynamic_stochastic(small_scenario, cell, dynamics=small_dynamics)

    assert free_start.performance >= full_round.performance - 1e-12
    assert free_start.performance <= dynamic.performance + 1e-9


def test_resolve_noise_levels(small_scenario):
    truth = small_scenario.noise.sigma2
    assert ControllerSpec(kind=ControllerKind.DYNAMIC_STOCHASTIC).resolve(small_scenario) == (truth, truth)
    assert ControllerSpec(kind=ControllerKind.DYNAMIC_DETERMINISTIC).resolve(small_scenario) == (2e-6, truth)
    spec = ControllerSpec(kind=ControllerKind.STATIC_STOCHASTIC, design_sigma2=5e-4, eval_sigma2=1e-3)
    assert spec.resolve(small_scenario) == (5e-4, 1e-3)
