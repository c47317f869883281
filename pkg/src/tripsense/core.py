"""Shared domain types and the canonical per-trip feature ordering.

All types are immutable after construction and safe to share across threads.
"""

import math
from dataclasses import dataclass

import numpy as np

# Base sensor channels aggregated per trip, in canonical order. Each channel
# contributes mean/min/max/std; three extra features follow.
BASE_CHANNELS = (
    "latitude",
    "longitude",
    "speed",
    "mid_speed",
    "acc_x",
    "acc_y",
    "acc_z",
    "course",
    "height",
    "total_meters",
    "tick_timestamp",
)
CHANNEL_STATS = ("mean", "min", "max", "std")
EXTRA_FEATURES = ("hour_of_day_mean", "day_of_week_mean", "driver_type")

N_FEATURES = len(BASE_CHANNELS) * len(CHANNEL_STATS) + len(EXTRA_FEATURES)

DRIVER_TYPE_PRIVATE = 0
DRIVER_TYPE_PUBLIC = 1


def canonical_feature_names() -> list[str]:
    """Fixed feature order used by every dataset, model, and file format.

    44 channel statistics ("<channel>_<stat>") followed by hour_of_day_mean,
    day_of_week_mean, driver_type. Pure function; stable across runs.
    """
    names = [f"{channel}_{stat}" for channel in BASE_CHANNELS for stat in CHANNEL_STATS]
    names.extend(EXTRA_FEATURES)
    return names


@dataclass(frozen=True, slots=True)
class RawRecord:
    """One 1 Hz sensor row as read from a log file."""

    trip_id: str
    driver_id: str
    driver_type_raw: str
    tick_timestamp: int
    latitude: float
    longitude: float
    speed: float
    mid_speed: float
    acc_x: float
    acc_y: float
    acc_z: float
    course: float
    height: float
    total_meters: float
    influence_raw: str | None = None
    point_date: str | None = None

    def __post_init__(self):
        if self.tick_timestamp <= 0:
            raise ValueError("tick_timestamp must be strictly positive")
        for name in ("latitude", "longitude", "speed", "mid_speed", "acc_x", "acc_y",
                     "acc_z", "course", "height", "total_meters"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} out of range")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude {self.longitude} out of range")
        if not 0.0 <= self.course < 360.0:
            raise ValueError(f"course {self.course} out of range")
        for name in ("speed", "mid_speed", "total_meters"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True, slots=True)
class TripRecord:
    """All points of one trip plus its encoded influence label.

    driver_type is stored once per trip (0 private, 1 public); it is constant
    within a trip. Points are ordered by non-decreasing tick_timestamp.
    """

    trip_id: str
    driver_type: int
    points: tuple[RawRecord, ...]
    influence: int

    def __post_init__(self):
        if not self.points:
            raise ValueError("trip has no points")
        if self.driver_type not in (0, 1):
            raise ValueError("driver_type must be 0 or 1")
        if self.influence not in (0, 1):
            raise ValueError("influence must be 0 or 1")
        last = None
        for p in self.points:
            if p.trip_id != self.trip_id:
                raise ValueError("point trip_id differs from trip")
            if last is not None and p.tick_timestamp < last:
                raise ValueError("points not sorted by tick_timestamp")
            last = p.tick_timestamp


@dataclass(frozen=True, slots=True)
class TripFeatureVector:
    """Fixed-order aggregate feature row for one trip (47 values)."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != N_FEATURES:
            raise ValueError(f"expected {N_FEATURES} values, got {len(self.values)}")
        for c, channel in enumerate(BASE_CHANNELS):
            mean, vmin, vmax, std = self.values[4 * c : 4 * c + 4]
            if not vmin <= mean <= vmax:
                raise ValueError(f"{channel}: mean {mean} outside [{vmin}, {vmax}]")
            if std < 0.0:
                raise ValueError(f"{channel}: negative std {std}")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(canonical_feature_names(), self.values))


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with binary labels, feature names, and trip ids.

    Pipeline-built datasets always carry the 47 canonical feature names;
    the container itself accepts any consistent width so that column
    subsets can be scored during selection.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]
    trip_ids: tuple[str, ...]

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "trip_ids", tuple(self.trip_ids))
        if feats.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        n, width = feats.shape
        if labels.shape != (n,):
            raise ValueError("labels length differs from feature rows")
        if len(self.trip_ids) != n:
            raise ValueError("trip_ids length differs from feature rows")
        if len(self.feature_names) != width:
            raise ValueError("feature_names length differs from feature width")
        if n and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be binary")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> tuple[int, int]:
        n1 = int(self.labels.sum())
        return self.n_rows - n1, n1

    def subset(self, row_indices) -> "LabeledDataset":
        idx = np.asarray(row_indices, dtype=np.int64)
        return LabeledDataset(
            features=self.features[idx],
            labels=self.labels[idx],
            feature_names=self.feature_names,
            trip_ids=tuple(self.trip_ids[i] for i in idx),
        )


# Convenience singleton; callers should treat it as read-only.
CANONICAL_FEATURE_NAMES = tuple(canonical_feature_names())
