from typing import Optional, Union

import numpy as np

from lettuce_climate_optimizer.core.exceptions import DimensionMismatchError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.result_schema import HarvestStats
from lettuce_climate_optimizer.models.scenario_schema import NoiseParams
from lettuce_climate_optimizer.models.tables import DensityTrajectory, Policy, TrajectorySet
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.mdp_service import GaussianKernel


class SimulationService:
    """Service layer for forward uncertainty propagation under a fixed policy"""

    def point_mass(self, dynamics: ScenarioDynamics, x0: float) -> np.ndarray:
        p0 = np.zeros(len(dynamics.points))
        p0[dynamics.grid.nearest_cell(x0)] = 1.0
        return p0

    def propagate_density(self, dynamics: ScenarioDynamics, policy: Policy, p0: np.ndarray,
                          noise: Optional[NoiseParams] = None, start_day: int = 0) -> DensityTrajectory:
        """Push a cell distribution through days start_day..T-1 of the policy."""
        n = len(dynamics.points)
        horizon = dynamics.horizon
        policy.check(horizon, n)
        p0 = np.asarray(p0, dtype=float)
        if p0.shape != (n,):
            raise DimensionMismatchError(f"initial density has shape {p0.shape}, expected ({n},)")
        if abs(p0.sum() - 1.0) > 1e-10 or (p0 < 0).any():
            raise ValueError("initial density must be non-negative and sum to 1")

        noise = noise or dynamics.scenario.noise
        kernel = GaussianKernel(dynamics.points, dynamics.grid.cell_width, noise)
        days = horizon - start_day
        p = np.empty((days + 1, n))
        running_cost = np.empty(days)
        p[0] = p0
        for step, k in enumerate(range(start_day, horizon)):
            u_day, u_night = policy.u_day[k], policy.u_night[k]
            drift = dynamics.growth(k, dynamics.points, u_day, u_night)
            cost = dynamics.heating_cost(k, u_day, u_night)
            running_cost[step] = float(p[step] @ cost) * noise.dt
            p[step + 1] = kernel.push(p[step], dynamics.points + drift * noise.dt)

        logger.debug(f"Propagated density over {days} day(s); final mass {p[-1].sum():.15f}")
        return DensityTrajectory(start_day=start_day, p=p, running_cost=running_cost)

    def simulate_mc(self, dynamics: ScenarioDynamics, policy: Policy, x0: float, n_runs: int, seed: int,
                    noise: Optional[NoiseParams] = None, start_day: int = 0) -> TrajectorySet:
        """Euler updates with multiplicative noise; controls taken at the nearest grid cell."""
        if n_runs < 1:
            raise ValueError("n_runs must be at least 1")
        grid = dynamics.grid
        horizon = dynamics.horizon
        policy.check(horizon, len(dynamics.points))
        noise = noise or dynamics.scenario.noise
        days = horizon - start_day

        # One independent stream per run, so results do not depend on batching
        streams = np.random.SeedSequence(seed).spawn(n_runs)
        shocks = np.stack([np.random.default_rng(s).standard_normal(days) for s in streams])
        scale = np.sqrt(noise.sigma2 * noise.dt)

        x = np.empty((n_runs, days + 1))
        cost = np.zeros(n_runs)
        clamped = 0
        x[:, 0] = x0
        for step, k in enumerate(range(start_day, horizon)):
            state = x[:, step]
            cells = grid.nearest_cell(state)
            u_day, u_night = policy.u_day[k, cells], policy.u_night[k, cells]
            drift = dynamics.growth(k, state, u_day, u_night)
            cost += dynamics.heating_cost(k, u_day, u_night) * noise.dt
            proposal = state + drift * noise.dt + state * scale * shocks[:, step]
            outside = (proposal < grid.x_min) | (proposal > grid.x_max)
            clamped += int(outside.sum())
            x[:, step + 1] = np.clip(proposal, grid.x_min, grid.x_max)

        if clamped:
            logger.warning(f"{clamped} of {n_runs * days} Monte Carlo updates clamped to the grid range")
        return TrajectorySet(start_day=start_day, x=x, cost=cost, clamped=clamped, seed=seed)

    def harvest_stats(self, source: Union[DensityTrajectory, TrajectorySet],
                      dynamics: ScenarioDynamics) -> HarvestStats:
        economics = dynamics.economics
        if isinstance(source, DensityTrajectory):
            p = source.final
            points = dynamics.points
            mean = float(p @ points)
            variance = float(p @ (points - mean) ** 2)
            p_in_band = float(p[economics.in_band(points)].sum())
            revenue = float(p @ economics.revenue(points))
            cost = source.expected_cost
        else:
            final = source.final
            mean = float(final.mean())
            variance = float(final.var())
            p_in_band = float(economics.in_band(final).mean())
            revenue = float(economics.revenue(final).mean())
            cost = float(source.cost.mean())
        return HarvestStats(
            mean=mean,
            std=float(np.sqrt(max(variance, 0.0))),
            p_in_band=min(max(p_in_band, 0.0), 1.0),
            expected_revenue=revenue,
            expected_cost=cost,
            expected_net=revenue - cost,
        )

    def ks_distance(self, samples: TrajectorySet, density: DensityTrajectory, dynamics: ScenarioDynamics) -> float:
        """Largest gap between the Monte Carlo harvest ECDF and the density CDF, read at cell midpoints."""
        points = dynamics.points
        edges = points + dynamics.grid.cell_width / 2.0
        final = np.sort(samples.final)
        empirical = np.searchsorted(final, edges, side="right") / len(final)
        return float(np.abs(empirical - np.cumsum(density.final)).max())


# Global simulation service instance
simulation_service = SimulationService()
