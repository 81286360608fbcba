import hashlib
import threading
from collections import OrderedDict
from typing import Any, Hashable, Optional

import numpy as np

from lettuce_climate_optimizer.models.weather_schema import WeatherDay


class SimpleCache:
    """Thread-safe in-memory LRU cache"""

    def __init__(self, maxsize: int = 16):
        self._cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self._maxsize = maxsize
        self._lock = threading.Lock()

    def get(self, key: Hashable) -> Optional[Any]:
        """Get value from cache"""
        with self._lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]
        return None

    def set(self, key: Hashable, value: Any):
        """Set value in cache"""
        with self._lock:
            self._cache[key] = value
            self._cache.move_to_end(key)
            while len(self._cache) > self._maxsize:
                self._cache.popitem(last=False)

    def clear(self):
        """Clear cache"""
        with self._lock:
            self._cache.clear()

    def __len__(self) -> int:
        return len(self._cache)


def weather_day_key(day: WeatherDay) -> str:
    """Content hash of a weather day; identical days share cache entries."""
    digest = hashlib.sha1()
    for column in ("radiation_out", "temp_out", "temp_sky", "wind"):
        digest.update(np.ascontiguousarray(day.column(column)).tobytes())
    return digest.hexdigest()


def model_key(*parts) -> str:
    """Content hash of the pydantic parameter models the cached tables depend on."""
    digest = hashlib.sha1()
    for part in parts:
        digest.update(part.model_dump_json().encode())
    return digest.hexdigest()
