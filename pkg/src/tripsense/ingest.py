"""Sensor log ingestion: CSV parsing, cleaning rules, label encoding, grouping.

Input files are UTF-8 CSV with a header row. Required columns: tripId,
driverId, driverType, tickTimestamp, latitude, longitude, speed, midSpeed,
accX, accY, accZ, course, height, totalMeters, influence. pointDate is
optional; any other column (lateral, yaw, gyroscope channels, ...) is
ignored at parse time.
"""

import csv
import enum
import io
import json
from dataclasses import dataclass, asdict
from pathlib import Path

from .core import RawRecord, TripRecord, DRIVER_TYPE_PUBLIC, DRIVER_TYPE_PRIVATE
from .errors import ConflictingInfluence, MalformedRow, MissingColumn

# West Africa Time: temporal features are computed in local time.
DEFAULT_UTC_OFFSET_MINUTES = 60

REQUIRED_COLUMNS = (
    "tripId",
    "driverId",
    "driverType",
    "tickTimestamp",
    "latitude",
    "longitude",
    "speed",
    "midSpeed",
    "accX",
    "accY",
    "accZ",
    "course",
    "height",
    "totalMeters",
    "influence",
)
OPTIONAL_COLUMNS = ("pointDate",)

_FLOAT_FIELDS = {
    "latitude": "latitude",
    "longitude": "longitude",
    "speed": "speed",
    "midSpeed": "mid_speed",
    "accX": "acc_x",
    "accY": "acc_y",
    "accZ": "acc_z",
    "course": "course",
    "height": "height",
    "totalMeters": "total_meters",
}

_INFLUENCE_EXTRA_CHARS = set(" ,-_")


class Influence(enum.Enum):
    """Outcome of encoding a driver-reported influence string."""

    OTHER = 0
    ALCOHOL = 1
    MISSING = "missing"
    INVALID = "invalid"


@dataclass(frozen=True)
class CleaningReport:
    """Tallies of the trip/point filtering performed by clean_and_group."""

    trips_in: int
    trips_kept: int
    trips_dropped_no_report: int
    trips_dropped_invalid_influence: int
    points_in: int
    points_kept: int

    def __post_init__(self):
        dropped = self.trips_dropped_no_report + self.trips_dropped_invalid_influence
        if self.trips_kept + dropped != self.trips_in:
            raise ValueError("trip tallies do not add up")
        if self.points_kept > self.points_in:
            raise ValueError("points_kept exceeds points_in")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def encode_influence(influence_raw: str | None) -> Influence:
    """Binary-encode a reported influence: alcohol maps to 1, all else to 0.

    Absent or empty strings are MISSING. Strings containing characters other
    than letters, digits, spaces, commas, hyphens, or underscores are
    INVALID. Otherwise the value is ALCOHOL when the lowercased text
    contains "alcohol" (so phrases like "alcohol intake" count), else OTHER.
    """
    if influence_raw is None or influence_raw == "":
        return Influence.MISSING
    for ch in influence_raw:
        if not (ch.isalnum() or ch in _INFLUENCE_EXTRA_CHARS):
            return Influence.INVALID
    if "alcohol" in influence_raw.lower():
        return Influence.ALCOHOL
    return Influence.OTHER


def _open_text(source):
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def parse_sensor_csv(source) -> list[RawRecord]:
    """Parse a sensor log into RawRecords, one per data row, in file order.

    `source` may be a path, a text stream, or a binary stream. Raises
    MissingColumn if a required header is absent and MalformedRow(line_no)
    for rows whose required fields do not parse or violate the record
    schema (ranges, signs, finiteness).
    """
    stream, owned = _open_text(source)
    try:
        reader = csv.DictReader(stream)
        header = reader.fieldnames
        if header is None:
            raise MissingColumn(REQUIRED_COLUMNS[0])
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise MissingColumn(column)
        has_point_date = "pointDate" in header

        records = []
        for row in reader:
            line_no = reader.line_num
            try:
                kwargs = {
                    "trip_id": row["tripId"],
                    "driver_id": row["driverId"],
                    "driver_type_raw": _parse_driver_type(row["driverType"]),
                    "tick_timestamp": int(row["tickTimestamp"]),
                }
                for column, field in _FLOAT_FIELDS.items():
                    kwargs[field] = float(row[column])
                influence = row["influence"]
                kwargs["influence_raw"] = influence if influence else None
                if has_point_date:
                    point_date = row["pointDate"]
                    kwargs["point_date"] = point_date if point_date else None
                records.append(RawRecord(**kwargs))
            except (TypeError, ValueError) as exc:
                raise MalformedRow(line_no, str(exc)) from exc
        return records
    finally:
        if owned:
            stream.close()


def _parse_driver_type(value: str) -> str:
    if value is None or value.lower() not in ("public", "private"):
        raise ValueError(f"driverType must be 'public' or 'private', got {value!r}")
    return value


def write_sensor_csv(records, sink) -> None:
    """Write RawRecords in the ingestion CSV schema.

    Floats are written with repr so a parse round-trip reproduces every
    record exactly.
    """
    stream, owned = _open_sink(sink)
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(list(REQUIRED_COLUMNS) + list(OPTIONAL_COLUMNS))
        for r in records:
            writer.writerow([
                r.trip_id,
                r.driver_id,
                r.driver_type_raw,
                r.tick_timestamp,
                repr(r.latitude),
                repr(r.longitude),
                repr(r.speed),
                repr(r.mid_speed),
                repr(r.acc_x),
                repr(r.acc_y),
                repr(r.acc_z),
                repr(r.course),
                repr(r.height),
                repr(r.total_meters),
                r.influence_raw if r.influence_raw is not None else "",
                r.point_date if r.point_date is not None else "",
            ])
    finally:
        if owned:
            stream.close()


def _open_sink(sink):
    if isinstance(sink, (str, Path)):
        return open(sink, "w", encoding="utf-8", newline=""), True
    return sink, False


def clean_and_group(records) -> tuple[list[TripRecord], CleaningReport]:
    """Group points into trips, drop unlabeled/invalid trips, encode labels.

    Points are grouped by trip_id (first-appearance order) and sorted by
    tick_timestamp. A trip whose influence resolves to MISSING or INVALID is
    dropped entirely; a trip carrying two different non-missing influence
    strings raises ConflictingInfluence.
    """
    groups: dict[str, list[RawRecord]] = {}
    for record in records:
        groups.setdefault(record.trip_id, []).append(record)

    trips: list[TripRecord] = []
    dropped_no_report = 0
    dropped_invalid = 0
    points_kept = 0
    for trip_id, points in groups.items():
        raw_values = {p.influence_raw for p in points if p.influence_raw}
        if len(raw_values) > 1:
            raise ConflictingInfluence(trip_id, tuple(raw_values))
        outcome = encode_influence(next(iter(raw_values)) if raw_values else None)
        if outcome is Influence.MISSING:
            dropped_no_report += 1
            continue
        if outcome is Influence.INVALID:
            dropped_invalid += 1
            continue
        ordered = sorted(points, key=lambda p: p.tick_timestamp)
        driver_type = (
            DRIVER_TYPE_PUBLIC
            if ordered[0].driver_type_raw.lower() == "public"
            else DRIVER_TYPE_PRIVATE
        )
        trips.append(
            TripRecord(
                trip_id=trip_id,
                driver_type=driver_type,
                points=tuple(ordered),
                influence=outcome.value,
            )
        )
        points_kept += len(ordered)

    report = CleaningReport(
        trips_in=len(groups),
        trips_kept=len(trips),
        trips_dropped_no_report=dropped_no_report,
        trips_dropped_invalid_influence=dropped_invalid,
        points_in=len(records),
        points_kept=points_kept,
    )
    return trips, report


def decompose_timestamp(tick_timestamp: int, utc_offset_minutes: int) -> tuple[float, int]:
    """Split an epoch timestamp into (hour_of_day, day_of_week) local time.

    hour_of_day is fractional in [0, 24); day_of_week is 0..6 with Monday=0.
    Plain epoch arithmetic matches the Gregorian weekday cycle for any
    timestamp, negative ones included.
    """
    if not -840 <= utc_offset_minutes <= 840:
        raise ValueError(f"utc_offset_minutes {utc_offset_minutes} out of range")
    local = int(tick_timestamp) + utc_offset_minutes * 60
    days, seconds_of_day = divmod(local, 86400)
    hours, rem = divmod(seconds_of_day, 3600)
    minutes, seconds = divmod(rem, 60)
    hour_of_day = hours + minutes / 60 + seconds / 3600
    day_of_week = (days + 3) % 7  # epoch day zero was a Thursday
    return hour_of_day, day_of_week
