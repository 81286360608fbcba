import json

import numpy as np
import pandas as pd
import pytest

from lettuce_climate_optimizer.cli import main
from lettuce_climate_optimizer.core.config import settings
from lettuce_climate_optimizer.models.economics_model import GreenhouseEconomics


@pytest.fixture(autouse=True)
def restore_threads(monkeypatch):
    monkeypatch.setattr(settings, "threads", settings.threads)


@pytest.fixture
def config(tmp_path, small_scenario):
    path = tmp_path / "scenario.json"
    path.write_text(small_scenario.model_dump_json())
    return path


def test_solve_writes_tables(tmp_path, config, small_scenario):
    out = tmp_path / "solve"
    assert main(["solve", "--config", str(config), "--out", str(out)]) == 0

    horizon = small_scenario.horizon
    policy = pd.read_csv(out / "policy_day.csv", index_col="x_g_m2")
    value = pd.read_csv(out / "value.csv", index_col="x_g_m2")
    assert policy.shape == (small_scenario.grid.n_cells, horizon)
    assert value.shape == (small_scenario.grid.n_cells, horizon + 1)

    revenue = GreenhouseEconomics().revenue(small_scenario.grid.points())
    np.testing.assert_allclose(value[f"day_{horizon}"].to_numpy(), revenue, atol=1e-12)

    meta = json.loads((out / "meta.json").read_text())
    assert meta["summary"]["horizon"] == horizon
    assert meta["x0_g_m2"] == pytest.approx(270.0)


def test_solve_output_does_not_depend_on_threads(tmp_path, config):
    assert main(["solve", "--config", str(config), "--out", str(tmp_path / "a"), "--threads", "1"]) == 0
    assert main(["solve", "--config", str(config), "--out", str(tmp_path / "b"), "--threads", "4"]) == 0
    for name in ("policy_day.csv", "policy_night.csv", "value.csv", "growth.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_flags_override_the_config(tmp_path, config):
    out = tmp_path / "solve"
    assert main(["solve", "--config", str(config), "--out", str(out), "--grid-n", "30", "--seed", "3"]) == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["scenario"]["grid"]["n_cells"] == 30
    assert meta["scenario"]["seed"] == 3


def test_invalid_config_exits_with_one(tmp_path, small_scenario):
    payload = json.loads(small_scenario.model_dump_json())
    payload["bogus"] = 1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    assert main(["solve", "--config", str(path), "--out", str(tmp_path)]) == 1
    assert main(["solve", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 1


def test_runtime_failure_exits_with_two(tmp_path, frozen_scenario):
    path = tmp_path / "frozen.json"
    path.write_text(frozen_scenario.model_dump_json())
    assert main(["solve", "--config", str(path), "--out", str(tmp_path / "out")]) == 2


def test_simulate_writes_density_and_histogram(tmp_path, config, small_scenario):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(config), "--out", str(out), "--mc-runs", "300"]) == 0

    density = pd.read_csv(out / "density.csv")
    assert len(density) == small_scenario.horizon - small_scenario.start_day + 1
    np.testing.assert_allclose(density.drop(columns="day").sum(axis=1), 1.0, atol=1e-10)

    histogram = pd.read_csv(out / "mc_histogram.csv")
    assert histogram["count"].sum() == 300

    stats = json.loads((out / "harvest_stats.json").read_text())
    assert stats["controller"] == "dynamic_stochastic"
    assert 0.0 <= stats["ks_distance"] <= 1.0
    assert stats["density"]["expected_net"] == pytest.approx(stats["performance"], rel=1e-6)


def test_simulate_reports_the_snap_to_the_grid(tmp_path, config, small_scenario):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(config), "--out", str(out), "--mc-runs", "50"]) == 0

    stats = json.loads((out / "harvest_stats.json").read_text())
    grid = small_scenario.grid
    snapped = grid.points()[grid.nearest_cell(small_scenario.x0)]
    assert stats["x0_g_m2"] == pytest.approx(270.0)
    assert stats["x0_cell_g_m2"] == pytest.approx(snapped * 1000.0)
    assert stats["snap_distance_g_m2"] == pytest.approx(abs(small_scenario.x0 - snapped) * 1000.0)
    assert stats["snap_distance_g_m2"] <= grid.cell_width * 500.0 + 1e-9


def test_simulate_static_controller(tmp_path, config):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", str(config), "--out", str(out), "--controller", "static_stochastic",
                 "--mc-runs", "100"]) == 0
    assert json.loads((out / "harvest_stats.json").read_text())["controller"] == "static_stochastic"


def test_compare_writes_one_row_per_controller(tmp_path, config):
    out = tmp_path / "compare"
    assert main(["compare", "--config", str(config), "--out", str(out)]) == 0
    table = pd.read_csv(out / "comparison.csv")
    assert list(table["controller"]) == ["dynamic_stochastic", "dynamic_deterministic", "static_stochastic"]
    best = table.loc[table["controller"] == "dynamic_stochastic", "performance"].item()
    assert (table["performance"] <= best + 1e-9).all()
    assert table.loc[table["controller"] == "static_stochastic", "u_day"].notna().all()


def test_sweep_writes_rows_in_grams(tmp_path, config):
    out = tmp_path / "sweep"
    argv = ["sweep", "--config", str(config), "--out", str(out), "--parameter", "margin",
            "--values", "0.015", "0.05", "--controllers", "dynamic_stochastic"]
    assert main(argv) == 0
    table = pd.read_csv(out / "sweep.csv")
    assert list(table["parameter_value"]) == pytest.approx([15.0, 50.0])
    assert table["error"].isna().all()
    assert json.loads((out / "sweep.json").read_text())["value_unit"] == "g m-2"


@pytest.mark.parametrize("parameter, values", [
    ("sigma2", ["1e-4", "5e-4"]),
    ("start_weight", ["0.22", "0.27"]),
])
def test_sweep_reruns_are_byte_identical(tmp_path, config, parameter, values):
    for name, threads in (("a", "1"), ("b", "1"), ("c", "4")):
        argv = ["sweep", "--config", str(config), "--out", str(tmp_path / name), "--parameter", parameter,
                "--values", *values, "--threads", threads]
        assert main(argv) == 0
    for name in ("sweep.csv", "sweep.json"):
        first = (tmp_path / "a" / name).read_bytes()
        assert (tmp_path / "b" / name).read_bytes() == first
        assert (tmp_path / "c" / name).read_bytes() == first


def test_weather_synth_and_inspect(tmp_path, capsys):
    assert main(["weather", "synth", "--preset", "day5", "--days", "3", "--out", str(tmp_path)]) == 0
    path = tmp_path / "weather.csv"
    assert path.is_file()

    assert main(["weather", "inspect", str(path)]) == 0
    printed = capsys.readouterr().out
    assert "mean_temp" in printed
    assert len(printed.strip().splitlines()) == 4


def test_inspect_of_a_missing_file_fails(tmp_path):
    assert main(["weather", "inspect", str(tmp_path / "nothing.csv")]) in (1, 2)
