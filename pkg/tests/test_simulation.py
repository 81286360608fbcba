import numpy as np
import pytest
from pydantic import ValidationError

from lettuce_climate_optimizer.core.exceptions import DimensionMismatchError
from lettuce_climate_optimizer.models.result_schema import HarvestStats
from lettuce_climate_optimizer.models.scenario_schema import NoiseParams, StateGrid
from lettuce_climate_optimizer.models.tables import DensityTrajectory, Policy
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.mdp_service import MDPSolver
from lettuce_climate_optimizer.services.simulation_service import SimulationService


@pytest.fixture
def service():
    return SimulationService()


@pytest.fixture
def solved(small_dynamics):
    return MDPSolver(small_dynamics).backward_induction()


def test_density_conserves_probability(service, small_dynamics, solved, small_scenario):
    p0 = service.point_mass(small_dynamics, small_scenario.x0)
    density = service.propagate_density(small_dynamics, solved.policy, p0)
    assert density.p.shape == (small_scenario.horizon + 1, small_scenario.grid.n_cells)
    np.testing.assert_allclose(density.p.sum(axis=1), 1.0, atol=1e-10)
    assert (density.p >= 0).all()


@pytest.mark.parametrize("start_day", [0, 3])
def test_density_net_revenue_equals_the_value_table(service, small_dynamics, solved, small_scenario, start_day):
    cell = small_scenario.grid.nearest_cell(small_scenario.x0)
    p0 = service.point_mass(small_dynamics, small_scenario.x0)
    density = service.propagate_density(small_dynamics, solved.policy, p0, start_day=start_day)
    stats = service.harvest_stats(density, small_dynamics)

    assert density.p.shape[0] == small_scenario.horizon - start_day + 1
    assert stats.expected_net == pytest.approx(solved.value.at(start_day, cell), rel=1e-6, abs=1e-12)


def test_zero_noise_keeps_point_masses(service, small_scenario):
    scenario = small_scenario.with_sigma2(0.0)
    dynamics = ScenarioDynamics(scenario)
    result = MDPSolver(dynamics).backward_induction()

    p0 = service.point_mass(dynamics, scenario.x0)
    density = service.propagate_density(dynamics, result.policy, p0)
    assert (density.p.max(axis=1) == 1.0).all()

    runs = service.simulate_mc(dynamics, result.policy, scenario.x0, n_runs=50, seed=7)
    assert (runs.x == runs.x[0]).all()
    assert runs.clamped == 0


def test_monte_carlo_is_seed_deterministic(service, small_dynamics, solved, small_scenario):
    first = service.simulate_mc(small_dynamics, solved.policy, small_scenario.x0, n_runs=200, seed=11)
    again = service.simulate_mc(small_dynamics, solved.policy, small_scenario.x0, n_runs=200, seed=11)
    other = service.simulate_mc(small_dynamics, solved.policy, small_scenario.x0, n_runs=200, seed=12)

    assert np.array_equal(first.x, again.x)
    assert np.array_equal(first.cost, again.cost)
    assert not np.array_equal(first.x, other.x)
    assert first.x.shape == (200, small_scenario.horizon + 1)
    assert (first.x[:, 0] == small_scenario.x0).all()


@pytest.mark.parametrize("sigma2", [1e-4, 5e-4])
def test_monte_carlo_agrees_with_the_density(service, small_scenario, sigma2):
    scenario = small_scenario.model_copy(
        update={"grid": StateGrid(n_cells=400), "horizon": 10, "x0": 0.2, "noise": NoiseParams(sigma2=sigma2)}
    )
    dynamics = ScenarioDynamics(scenario)
    result = MDPSolver(dynamics).backward_induction()

    density = service.propagate_density(dynamics, result.policy, service.point_mass(dynamics, scenario.x0))
    runs = service.simulate_mc(dynamics, result.policy, scenario.x0, n_runs=10_000, seed=scenario.seed)
    from_density = service.harvest_stats(density, dynamics)
    from_runs = service.harvest_stats(runs, dynamics)

    assert abs(from_density.mean - from_runs.mean) < 0.001
    assert from_runs.std == pytest.approx(from_density.std, rel=0.1)
    assert service.ks_distance(runs, density, dynamics) < 0.03
    assert runs.clamped_fraction < 1e-3


def _point_mass_stats(service, small_scenario, x):
    grid = StateGrid(x_min=0.002, x_max=0.402, n_cells=201)
    dynamics = ScenarioDynamics(small_scenario.model_copy(update={"grid": grid}))
    p = service.point_mass(dynamics, x)
    trajectory = DensityTrajectory(start_day=small_scenario.horizon, p=p[None, :], running_cost=np.zeros(0))
    return service.harvest_stats(trajectory, dynamics)


def test_point_mass_inside_the_band(service, small_scenario):
    stats = _point_mass_stats(service, small_scenario, 0.322)
    assert stats.mean == pytest.approx(0.322, abs=1e-12)
    assert stats.std == pytest.approx(0.0, abs=1e-9)
    assert stats.p_in_band == 1.0
    assert stats.expected_revenue == pytest.approx(20 * 0.322, abs=1e-9)
    assert stats.expected_cost == 0.0


def test_point_mass_outside_the_band_earns_nothing(service, small_scenario):
    stats = _point_mass_stats(service, small_scenario, 0.340)
    assert stats.p_in_band == 0.0
    assert stats.expected_revenue == 0.0


def test_rejects_bad_initial_densities(service, small_dynamics, solved):
    n = len(small_dynamics.points)
    with pytest.raises(DimensionMismatchError):
        service.propagate_density(small_dynamics, solved.policy, np.ones(n + 1) / (n + 1))
    with pytest.raises(ValueError):
        service.propagate_density(small_dynamics, solved.policy, np.full(n, 0.5))
    with pytest.raises(DimensionMismatchError):
        bad = Policy.constant(15.0, 10.0, small_dynamics.horizon - 1, n)
        service.propagate_density(small_dynamics, bad, service.point_mass(small_dynamics, 0.1))
    with pytest.raises(ValueError):
        service.simulate_mc(small_dynamics, solved.policy, 0.1, n_runs=0, seed=0)


def test_harvest_stats_require_consistent_net():
    with pytest.raises(ValidationError):
        HarvestStats(mean=0.3, std=0.01, p_in_band=0.5, expected_revenue=3.0, expected_cost=0.5, expected_net=3.0)
    stats = HarvestStats(mean=0.3, std=0.01, p_in_band=0.5, expected_revenue=3.0, expected_cost=0.5, expected_net=2.5)
    assert stats.display()["mean_g_m2"] == pytest.approx(300.0)
