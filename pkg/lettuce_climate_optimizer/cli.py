"""Command-line entry point.

Precedence of scenario settings: built-in defaults < ``--config`` JSON <
flags. State-valued outputs are written in g m-2; the JSON config and sweep
``--values`` use the internal units (kg m-2, day-1).
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd
from pydantic import ValidationError

from lettuce_climate_optimizer.core.config import settings
from lettuce_climate_optimizer.core.exceptions import ConfigError, OptimizerError, OptimizerValidationError
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.result_schema import KG_TO_G, ComparisonRecord, SweepResult
from lettuce_climate_optimizer.models.scenario_schema import (
    ALL_CONTROLLERS,
    ControllerKind,
    ControllerSpec,
    ScenarioConfig,
    SweepParameter,
    SweepSpec,
)
from lettuce_climate_optimizer.models.weather_schema import WEATHER_PRESETS, WeatherProfile
from lettuce_climate_optimizer.repositories.artifact_repository import ArtifactRepository
from lettuce_climate_optimizer.services.controller_service import controller_service
from lettuce_climate_optimizer.services.dynamics_service import ScenarioDynamics
from lettuce_climate_optimizer.services.harness_service import DEFAULT_SWEEP_VALUES, harness_service
from lettuce_climate_optimizer.services.simulation_service import simulation_service
from lettuce_climate_optimizer.services.solver_service import solver_service
from lettuce_climate_optimizer.services.weather_service import weather_service

# Sweep parameters whose values are dry weights
WEIGHT_PARAMETERS = {SweepParameter.MARGIN, SweepParameter.START_WEIGHT}


def load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    scenario = ScenarioConfig()
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file {path} not found")
        scenario = ScenarioConfig.model_validate_json(path.read_text())
        logger.info(f"Loaded scenario from {path}")

    overrides: Dict[str, Any] = scenario.model_dump()
    changed = False
    if args.seed is not None:
        overrides["seed"] = args.seed
        changed = True
    if args.grid_n is not None:
        overrides["grid"]["n_cells"] = args.grid_n
        changed = True
    return ScenarioConfig.model_validate(overrides) if changed else scenario


def _repository(args: argparse.Namespace) -> ArtifactRepository:
    return ArtifactRepository(args.out or settings.output_dir)


def cmd_solve(args: argparse.Namespace) -> None:
    scenario = load_scenario(args)
    result, summary = solver_service.solve_and_summarize(scenario)
    repository = _repository(args)
    grid = scenario.grid

    repository.write_matrix("policy_day.csv", result.policy.u_day, grid)
    repository.write_matrix("policy_night.csv", result.policy.u_night, grid)
    repository.write_matrix("growth.csv", result.growth.f_star * KG_TO_G, grid)
    repository.write_matrix("value.csv", result.value.v, grid)

    points = grid.points()
    repository.write_json("meta.json", {
        "summary": summary.model_dump(mode="json"),
        "x0_g_m2": scenario.x0 * KG_TO_G,
        "x0_cell_g_m2": float(points[summary.x0_cell]) * KG_TO_G,
        "snap_distance_g_m2": abs(scenario.x0 - float(points[summary.x0_cell])) * KG_TO_G,
        "units": {"policy": "degC", "growth": "g m-2 day-1", "value": "EUR m-2", "x": "g m-2"},
        "scenario": scenario.model_dump(mode="json"),
    })
    logger.info(
        f"Optimal start day {summary.optimal_start}, expected net revenue {summary.headline_value:.6g} EUR m-2; "
        f"wrote {repository.out_dir}"
    )


def cmd_simulate(args: argparse.Namespace) -> None:
    scenario = load_scenario(args)
    dynamics = ScenarioDynamics(scenario)
    cell = scenario.grid.nearest_cell(scenario.x0)
    tables = controller_service.prepare(ControllerSpec(kind=ControllerKind(args.controller)), scenario, dynamics)
    design = controller_service.design(tables, cell, scenario.start_day)

    p0 = simulation_service.point_mass(dynamics, scenario.x0)
    density = simulation_service.propagate_density(dynamics, design.policy, p0, tables.eval_noise, design.start_day)
    runs = args.mc_runs or scenario.mc_runs
    samples = simulation_service.simulate_mc(
        dynamics, design.policy, scenario.x0, runs, scenario.seed, tables.eval_noise, design.start_day
    )

    x0_cell = float(scenario.grid.points()[cell])
    repository = _repository(args)
    repository.write_density("density.csv", density, scenario.grid)
    repository.write_histogram("mc_histogram.csv", samples.final, scenario.grid)
    repository.write_json("harvest_stats.json", {
        "controller": design.kind.value,
        "start_day": design.start_day,
        "x0_g_m2": scenario.x0 * KG_TO_G,
        "x0_cell_g_m2": x0_cell * KG_TO_G,
        "snap_distance_g_m2": abs(scenario.x0 - x0_cell) * KG_TO_G,
        "performance": design.performance,
        "density": simulation_service.harvest_stats(density, dynamics).display(),
        "monte_carlo": simulation_service.harvest_stats(samples, dynamics).display(),
        "mc_runs": runs,
        "seed": scenario.seed,
        "ks_distance": simulation_service.ks_distance(samples, density, dynamics),
        "clamped_fraction": samples.clamped_fraction,
    })
    logger.info(f"Simulated {design.kind.value} from day {design.start_day}; wrote {repository.out_dir}")


def comparison_rows(record: ComparisonRecord) -> List[Dict[str, Any]]:
    rows = []
    for outcome in record.outcomes:
        row = {
            "controller": outcome.kind.value,
            "design_sigma2": outcome.design_sigma2,
            "eval_sigma2": outcome.eval_sigma2,
            "start_day": outcome.start_day,
            "performance": outcome.performance,
            **outcome.harvest.display(),
            "u_day": outcome.static_control.u_day if outcome.static_control else None,
            "u_night": outcome.static_control.u_night if outcome.static_control else None,
            "value_ratio": record.value_ratios.get(outcome.kind.value),
            "std_ratio": record.std_ratios.get(outcome.kind.value),
        }
        rows.append(row)
    return rows


COMPARISON_COLUMNS = [
    "controller", "design_sigma2", "eval_sigma2", "start_day", "performance",
    "mean_g_m2", "std_g_m2", "p_in_band", "expected_revenue", "expected_cost", "expected_net",
    "u_day", "u_night", "value_ratio", "std_ratio",
]


def cmd_compare(args: argparse.Namespace) -> None:
    scenario = load_scenario(args)
    record = harness_service.run_comparison(scenario)
    repository = _repository(args)
    rows = comparison_rows(record)
    repository.write_table("comparison.csv", rows, COMPARISON_COLUMNS)
    repository.write_json("comparison.json", {
        "x0_g_m2": record.x0 * KG_TO_G,
        "x0_cell": record.x0_cell,
        "snap_distance_g_m2": record.snap_distance * KG_TO_G,
        "controllers": rows,
    })
    for row in rows:
        logger.info(f"{row['controller']}: {row['performance']:.6g} EUR m-2, harvest std {row['std_g_m2']:.4g} g m-2")


def sweep_rows(result: SweepResult) -> List[Dict[str, Any]]:
    scale = KG_TO_G if result.parameter in WEIGHT_PARAMETERS else 1.0
    rows = []
    for row in result.rows:
        rows.append({
            "parameter": result.parameter.value,
            "parameter_value": row.parameter_value * scale,
            "controller": row.controller.value,
            "performance": row.performance,
            "harvest_std_g_m2": None if row.harvest_std is None else row.harvest_std * KG_TO_G,
            "p_in_band": row.p_in_band,
            "start_day": row.start_day,
            "error": row.error,
        })
    return rows


SWEEP_COLUMNS = [
    "parameter", "parameter_value", "controller", "performance", "harvest_std_g_m2", "p_in_band", "start_day", "error",
]


def cmd_sweep(args: argparse.Namespace) -> None:
    scenario = load_scenario(args)
    parameter = SweepParameter(args.parameter)
    values = args.values or DEFAULT_SWEEP_VALUES[parameter]
    controllers = [ControllerKind(c) for c in args.controllers] if args.controllers else list(ALL_CONTROLLERS)
    spec = SweepSpec(parameter=parameter, values=values, controllers=controllers, scenario=scenario)

    result = harness_service.run_sweep(spec)
    repository = _repository(args)
    rows = sweep_rows(result)
    repository.write_table("sweep.csv", rows, SWEEP_COLUMNS)
    repository.write_json("sweep.json", {
        "parameter": parameter.value,
        "value_unit": "g m-2" if parameter in WEIGHT_PARAMETERS else ("day" if parameter == SweepParameter.START_DAY else "day-1"),
        "rows": rows,
        "failed_cells": sum(1 for row in rows if row["error"]),
    })
    logger.info(f"Sweep over {parameter.value}: {len(rows)} rows; wrote {repository.out_dir}")


def cmd_weather_inspect(args: argparse.Namespace) -> None:
    days = weather_service.load_weather(args.file)
    stats = weather_service.inspect(days)
    frame = pd.DataFrame([s.model_dump() for s in stats])
    print(frame.to_string(index=False))


def cmd_weather_synth(args: argparse.Namespace) -> None:
    if args.profile:
        profile = WeatherProfile.model_validate_json(Path(args.profile).read_text())
    else:
        profile = WEATHER_PRESETS[args.preset]
    out_dir = Path(args.out or settings.output_dir)
    path = weather_service.write_synthetic(profile, out_dir / args.name, args.seed or 0, args.days)
    logger.info(f"Wrote {args.days} synthetic weather day(s) to {path}")


def cmd_serve(args: argparse.Namespace) -> None:
    import uvicorn

    uvicorn.run("main:app", host=args.host or settings.app_host, port=args.port or settings.app_port, log_level="info")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON document")
    common.add_argument("--out", help=f"output directory (default {settings.output_dir})")
    common.add_argument("--seed", type=int, help="random seed for weather jitter and Monte Carlo")
    common.add_argument("--threads", type=int, help="worker cap for candidate batches")
    common.add_argument("--grid-n", dest="grid_n", type=int, help="number of state grid cells")

    parser = argparse.ArgumentParser(
        prog="lettuce-climate-optimizer",
        description="Stochastic dynamic programming of greenhouse temperature setpoints for lettuce.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="solve the dynamic stochastic controller")
    solve.set_defaults(handler=cmd_solve)

    simulate = sub.add_parser("simulate", parents=[common], help="propagate density and Monte Carlo under a controller")
    simulate.add_argument("--controller", choices=[c.value for c in ControllerKind],
                          default=ControllerKind.DYNAMIC_STOCHASTIC.value)
    simulate.add_argument("--mc-runs", dest="mc_runs", type=int)
    simulate.set_defaults(handler=cmd_simulate)

    compare = sub.add_parser("compare", parents=[common], help="compare the three controllers")
    compare.set_defaults(handler=cmd_compare)

    sweep = sub.add_parser("sweep", parents=[common], help="one-parameter sensitivity sweep")
    sweep.add_argument("--parameter", choices=[p.value for p in SweepParameter], required=True)
    sweep.add_argument("--values", type=float, nargs="+", help="sweep values in internal units")
    sweep.add_argument("--controllers", nargs="+", choices=[c.value for c in ControllerKind])
    sweep.set_defaults(handler=cmd_sweep)

    weather = sub.add_parser("weather", help="inspect or synthesize weather files")
    weather_sub = weather.add_subparsers(dest="action", required=True)
    inspect = weather_sub.add_parser("inspect", parents=[common], help="per-day statistics of a weather CSV")
    inspect.add_argument("file")
    inspect.set_defaults(handler=cmd_weather_inspect)
    synth = weather_sub.add_parser("synth", parents=[common], help="write a synthetic weather CSV")
    source = synth.add_mutually_exclusive_group()
    source.add_argument("--preset", choices=sorted(WEATHER_PRESETS), default="day79")
    source.add_argument("--profile", help="WeatherProfile JSON document")
    synth.add_argument("--days", type=int, default=1)
    synth.add_argument("--name", default="weather.csv")
    synth.set_defaults(handler=cmd_weather_synth)

    serve = sub.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.set_defaults(handler=cmd_serve, threads=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None):
        settings.threads = args.threads
    try:
        args.handler(args)
        return 0
    except (OptimizerValidationError, ValidationError) as e:
        logger.error(f"Invalid input: {e}")
        return 1
    except OptimizerError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O failed: {e}")
        return 2
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
