import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.result_schema import KG_TO_G
from lettuce_climate_optimizer.models.scenario_schema import StateGrid
from lettuce_climate_optimizer.models.tables import DensityTrajectory

FLOAT_FORMAT = "%.17g"
STATE_COLUMN = "x_g_m2"


class ArtifactRepository:
    """Flat-file store for solver and simulation artifacts.

    Matrices are written cell-major: one row per grid cell, labelled with
    the cell's dry weight in g m-2, one column per day.
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)

    def _path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_matrix(self, name: str, matrix: np.ndarray, grid: StateGrid, first_day: int = 0) -> Path:
        """Write a (days, N) table as an N x days CSV."""
        matrix = np.asarray(matrix, dtype=float)
        columns = [f"day_{first_day + k}" for k in range(matrix.shape[0])]
        frame = pd.DataFrame(matrix.T, columns=columns)
        frame.insert(0, STATE_COLUMN, grid.points() * KG_TO_G)
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"Wrote {path} with shape {frame.shape}")
        return path

    def read_matrix(self, name: str) -> pd.DataFrame:
        return pd.read_csv(self.out_dir / name, index_col=STATE_COLUMN)

    def write_density(self, name: str, trajectory: DensityTrajectory, grid: StateGrid) -> Path:
        """One row per day, one column per grid cell."""
        columns = [f"{x:.17g}" for x in grid.points() * KG_TO_G]
        frame = pd.DataFrame(trajectory.p, columns=columns)
        frame.insert(0, "day", np.arange(trajectory.start_day, trajectory.start_day + len(trajectory.p)))
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_histogram(self, name: str, samples: np.ndarray, grid: StateGrid) -> Path:
        """Counts of samples per grid cell, bins bounded at the cell midpoints."""
        points = grid.points()
        half = grid.cell_width / 2.0
        edges = np.concatenate([[points[0] - half], points + half])
        counts, _ = np.histogram(samples, bins=edges)
        frame = pd.DataFrame({
            "bin_low_g_m2": edges[:-1] * KG_TO_G,
            "bin_high_g_m2": edges[1:] * KG_TO_G,
            "count": counts,
        })
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_table(self, name: str, records: Sequence[Dict[str, Any]], columns: List[str]) -> Path:
        frame = pd.DataFrame(list(records), columns=columns)
        path = self._path(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._path(name)
        # json writes floats with repr, which round-trips exactly
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path

    def read_json(self, name: str) -> Dict[str, Any]:
        return json.loads((self.out_dir / name).read_text())
