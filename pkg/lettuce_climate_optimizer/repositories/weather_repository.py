import re
from pathlib import Path
from typing import List, Sequence

import numpy as np
import pandas as pd

from lettuce_climate_optimizer.core.exceptions import (
    ConfigError,
    WeatherParseError,
    WeatherStructureError,
    WeatherValidationError,
)
from lettuce_climate_optimizer.core.logger import logger
from lettuce_climate_optimizer.models.weather_schema import HOURS_PER_DAY, WeatherDay

WEATHER_COLUMNS = ["hour", "radiation_out", "temp_out", "temp_sky", "wind"]
FLOAT_FORMAT = "%.17g"


class WeatherRepository:
    """Reads and writes the hourly weather CSV format"""

    def load_weather(self, path) -> List[WeatherDay]:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"Weather file not found: {path}")

        logger.info(f"Loading weather from: {path}")
        try:
            raw = pd.read_csv(path, dtype=str, skipinitialspace=True, keep_default_na=False)
        except pd.errors.EmptyDataError:
            raise WeatherStructureError(f"{path} is empty")
        except pd.errors.ParserError as e:
            match = re.search(r"line (\d+)", str(e))
            raise WeatherParseError(str(e), line=int(match.group(1)) if match else None) from e

        if list(raw.columns) != WEATHER_COLUMNS:
            raise WeatherParseError(
                f"header must be {','.join(WEATHER_COLUMNS)}, got {','.join(map(str, raw.columns))}", line=1
            )
        if len(raw) == 0 or len(raw) % HOURS_PER_DAY:
            raise WeatherStructureError(f"{path} has {len(raw)} rows, not a positive multiple of {HOURS_PER_DAY}")

        numeric = raw.apply(pd.to_numeric, errors="coerce")
        bad = ~np.isfinite(numeric.to_numpy(dtype=float)).all(axis=1)
        if bad.any():
            row = int(np.argmax(bad))
            # +1 for the header, +1 for 1-based lines
            raise WeatherParseError(f"cannot parse row {raw.iloc[row].tolist()}", line=row + 2)

        self._validate(numeric)

        days = []
        for start in range(0, len(numeric), HOURS_PER_DAY):
            block = numeric.iloc[start:start + HOURS_PER_DAY]
            days.append(
                WeatherDay.from_arrays(
                    block["radiation_out"], block["temp_out"], block["temp_sky"], block["wind"]
                )
            )
        logger.info(f"Loaded {len(days)} weather days")
        return days

    def _validate(self, frame: pd.DataFrame) -> None:
        expected_hour = np.arange(len(frame)) % HOURS_PER_DAY
        wrong_hour = frame["hour"].to_numpy() != expected_hour
        if wrong_hour.any():
            row = int(np.argmax(wrong_hour))
            raise WeatherStructureError(f"line {row + 2}: hour {frame['hour'].iloc[row]:g}, expected {expected_hour[row]}")

        checks = [
            (frame["radiation_out"] < 0, "negative radiation_out"),
            (frame["wind"] < 0, "negative wind"),
            ((frame["temp_sky"] - frame["temp_out"]).abs() > 60.0, "temp_sky more than 60 degC from temp_out"),
        ]
        for violated, message in checks:
            if violated.any():
                row = int(np.argmax(violated.to_numpy()))
                raise WeatherValidationError(f"line {row + 2}: {message}")

    def save_weather(self, days: Sequence[WeatherDay], path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame({
            "hour": np.tile(np.arange(HOURS_PER_DAY), len(days)),
            "radiation_out": np.concatenate([d.radiation_out for d in days]),
            "temp_out": np.concatenate([d.temp_out for d in days]),
            "temp_sky": np.concatenate([d.temp_sky for d in days]),
            "wind": np.concatenate([d.wind for d in days]),
        })
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(days)} weather days to {path}")
        return path


# Global weather repository instance
weather_repository = WeatherRepository()
