"""Unit conventions: lengths in km, times in s, rates in Hz, speeds in m/s."""
from __future__ import annotations

METRES_PER_KM = 1_000.0
SECONDS_PER_YEAR = 365.25 * 24 * 3600


def km_to_m(length_km: float) -> float:
    return length_km * METRES_PER_KM


def travel_time(length_km: float, c: float) -> float:
    """Seconds for light at speed ``c`` (m/s) to cover ``length_km``."""
    return km_to_m(length_km) / c


def travel_distance_km(duration: float, c: float) -> float:
    """Kilometres covered by light at speed ``c`` (m/s) in ``duration`` seconds."""
    return duration * c / METRES_PER_KM


def seconds_to_years(seconds: float) -> float:
    return seconds / SECONDS_PER_YEAR
