"""Per-trip feature aggregation: statistical summaries plus temporal features.

Each trip becomes one 47-value row: mean/min/max/std of the 11 sensor
channels, mean local hour of day, mean day of week, and the driver type.
"""

import numpy as np

from .core import (
    BASE_CHANNELS,
    CANONICAL_FEATURE_NAMES,
    LabeledDataset,
    TripFeatureVector,
    TripRecord,
)
from .errors import EmptyCorpus
from .ingest import DEFAULT_UTC_OFFSET_MINUTES
from ._features_io import read_features_csv, write_features_csv  # noqa: F401

__all__ = [
    "aggregate_trip",
    "build_dataset",
    "decompose_timestamps",
    "read_features_csv",
    "write_features_csv",
]


def decompose_timestamps(ticks: np.ndarray, utc_offset_minutes: int):
    """Vectorized (hour_of_day, day_of_week), identical to the scalar op."""
    if not -840 <= utc_offset_minutes <= 840:
        raise ValueError(f"utc_offset_minutes {utc_offset_minutes} out of range")
    local = ticks.astype(np.int64) + utc_offset_minutes * 60
    days, seconds_of_day = np.divmod(local, 86400)
    hours, rem = np.divmod(seconds_of_day, 3600)
    minutes, seconds = np.divmod(rem, 60)
    hour_of_day = hours + minutes / 60 + seconds / 3600
    day_of_week = (days + 3) % 7
    return hour_of_day, day_of_week


def _channel_stats(values: np.ndarray, population_std: bool) -> tuple[float, float, float, float]:
    # Summation over the sorted values makes the statistics exactly
    # independent of point order within the trip.
    values = np.sort(values)
    vmin = float(values[0])
    vmax = float(values[-1])
    # Clamp: pairwise float summation can push the mean of equal values an
    # ulp outside [min, max].
    mean = min(max(float(values.mean()), vmin), vmax)
    if vmin == vmax or (len(values) == 1 and not population_std):
        std = 0.0
    else:
        std = float(values.std(ddof=0 if population_std else 1))
    return mean, vmin, vmax, std


def aggregate_trip(
    trip: TripRecord,
    utc_offset_minutes: int = DEFAULT_UTC_OFFSET_MINUTES,
    population_std: bool = False,
) -> TripFeatureVector:
    """Aggregate one trip into its canonical feature vector.

    Standard deviations are sample std (divisor n-1, zero for single-point
    trips) unless population_std is set. Statistics are order-free, so the
    result does not depend on point ordering within the trip.
    """
    n = len(trip.points)
    channels = {name: np.empty(n) for name in BASE_CHANNELS}
    for i, point in enumerate(trip.points):
        for name in BASE_CHANNELS:
            channels[name][i] = getattr(point, name)

    values: list[float] = []
    for name in BASE_CHANNELS:
        values.extend(_channel_stats(channels[name], population_std))

    ticks = np.array([p.tick_timestamp for p in trip.points], dtype=np.int64)
    hours, days = decompose_timestamps(ticks, utc_offset_minutes)
    values.append(float(np.sort(hours).mean()))
    values.append(float(np.sort(days).mean()))
    values.append(float(trip.driver_type))
    return TripFeatureVector(values=tuple(values))


def build_dataset(
    trips,
    utc_offset_minutes: int = DEFAULT_UTC_OFFSET_MINUTES,
    population_std: bool = False,
) -> LabeledDataset:
    """One feature row per trip, in input order, with canonical names."""
    trips = list(trips)
    if not trips:
        raise EmptyCorpus("no trips to aggregate")
    rows = np.empty((len(trips), len(CANONICAL_FEATURE_NAMES)))
    for i, trip in enumerate(trips):
        rows[i] = aggregate_trip(trip, utc_offset_minutes, population_std).values
    return LabeledDataset(
        features=rows,
        labels=np.array([t.influence for t in trips], dtype=np.int64),
        feature_names=CANONICAL_FEATURE_NAMES,
        trip_ids=tuple(t.trip_id for t in trips),
    )
