"""Synthetic 1 Hz sensor corpus with ground-truth alcohol labels.

Sober trips follow a smooth mean-reverting speed profile and a near-constant
course with gentle turns, starting at spread-out times of the week. Impaired
trips amplify speed noise, course noise, and lateral-acceleration noise by
(1 + signature_strength) and start predominantly on Friday-to-Sunday nights.
At signature_strength 0 both classes are drawn from identical distributions,
so the labels carry no learnable signal.

GPS integrates heading x speed from a jittered origin near Abuja; trips are
generated from per-trip seeds, so output is byte-stable for a fixed seed.
"""

import calendar
import csv
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .core import RawRecord
from .errors import InvalidConfig
from .seeds import rng_for

SOBER_INFLUENCES = ("fatigue", "none", "traffic", "phone use")

# Monday 2024-03-04 00:00 UTC; trip start times are laid out relative to
# this anchor in local wall time.
EPOCH_ANCHOR = calendar.timegm((2024, 3, 4, 0, 0, 0))

_METERS_PER_DEG_LAT = 111320.0


@dataclass(frozen=True)
class GenConfig:
    n_trips: int = 108
    n_positive: int = 14
    n_drivers: int = 21
    n_private_drivers: int = 5
    min_points: int = 300
    max_points: int = 3000
    seed: int = 42
    signature_strength: float = 1.0
    utc_offset_minutes: int = 60

    def __post_init__(self):
        if self.n_trips < 1:
            raise InvalidConfig("n_trips must be >= 1")
        if not 0 <= self.n_positive <= self.n_trips:
            raise InvalidConfig("n_positive must be in [0, n_trips]")
        if self.n_drivers < 1 or not 0 <= self.n_private_drivers <= self.n_drivers:
            raise InvalidConfig("driver counts invalid")
        if not 1 <= self.min_points <= self.max_points:
            raise InvalidConfig("points_per_trip range invalid")
        if self.signature_strength < 0:
            raise InvalidConfig("signature_strength must be >= 0")
        if not -840 <= self.utc_offset_minutes <= 840:
            raise InvalidConfig("utc_offset_minutes out of range")


def _start_local_seconds(rng, impaired: bool, strength: float) -> int:
    """Trip start within a 13-week window, local wall-clock seconds."""
    u_mix = rng.random()
    week = int(rng.integers(0, 13))
    base_day = int(rng.integers(0, 7))
    base_hour = float(rng.uniform(5.0, 23.0))
    party_day = int(rng.integers(4, 7))  # Fri, Sat, Sun
    party_hour = float(rng.uniform(20.0, 26.0))  # 20:00 through 02:00 next day

    party_weight = min(0.9, 0.8 * strength) if impaired else 0.0
    if u_mix < party_weight:
        day = (party_day + (1 if party_hour >= 24.0 else 0)) % 7
        hour = party_hour % 24.0
    else:
        day, hour = base_day, base_hour
    return week * 604800 + day * 86400 + int(hour * 3600)


def _simulate_trip(trip_id, driver_id, driver_type, impaired, config, rng) -> list[RawRecord]:
    strength = config.signature_strength
    start_local = _start_local_seconds(rng, impaired, strength)
    ts0 = EPOCH_ANCHOR - config.utc_offset_minutes * 60 + start_local

    n = int(rng.integers(config.min_points, config.max_points + 1))
    v_target = float(rng.uniform(25.0, 75.0))
    v = max(0.0, v_target + float(rng.uniform(-5.0, 5.0)))
    speed_noise = float(rng.uniform(0.7, 1.3))
    course_noise = float(rng.uniform(1.0, 2.0))
    accy_noise = float(rng.uniform(0.10, 0.22))
    turn_amp = float(rng.uniform(2.0, 12.0))  # degrees of gentle-turn excursion
    turn_period = float(rng.uniform(180.0, 900.0))
    turn_phase = float(rng.uniform(0.0, 2 * math.pi))
    base_heading = float(rng.uniform(0.0, 360.0))
    lat = 9.06 + float(rng.uniform(-0.5, 0.5))
    lon = 7.49 + float(rng.uniform(-0.5, 0.5))
    alt = float(rng.uniform(200.0, 500.0))
    influence = "alcohol" if impaired else SOBER_INFLUENCES[int(rng.integers(0, 4))]

    mult = 1.0 + strength if impaired else 1.0
    eta_v = rng.normal(0.0, speed_noise * mult, n).tolist()
    eta_c = rng.normal(0.0, course_noise * mult, n).tolist()
    eta_ay = rng.normal(0.0, accy_noise * mult, n).tolist()
    eta_az = rng.normal(0.0, 0.05, n).tolist()
    eta_alt = rng.normal(0.0, 0.2, n).tolist()

    tz = timezone.utc
    offset_s = config.utc_offset_minutes * 60
    total = 0.0
    deviation = 0.0  # AR(1) heading wobble around the gentle-turn baseline
    raw_course = base_heading + turn_amp * math.sin(turn_phase)
    course = raw_course % 360.0
    records = []
    for i in range(n):
        prev_v = v
        if i > 0:
            v = v + 0.05 * (v_target - v) + eta_v[i]
            v = min(max(v, 0.0), 120.0)
            deviation = 0.9 * deviation + eta_c[i]
            new_raw = (
                base_heading
                + turn_amp * math.sin(2 * math.pi * i / turn_period + turn_phase)
                + deviation
            )
            dcourse = new_raw - raw_course
            raw_course = new_raw
            course = raw_course % 360.0
            v_ms = v / 3.6
            rad = math.radians(course)
            lat += v_ms * math.cos(rad) / _METERS_PER_DEG_LAT
            lon += v_ms * math.sin(rad) / (_METERS_PER_DEG_LAT * math.cos(math.radians(lat)))
            total += v_ms
            alt += eta_alt[i]
            acc_x = (v - prev_v) / 3.6
            acc_y = v_ms * math.radians(dcourse) + eta_ay[i]
            mid = (v + prev_v) / 2.0
        else:
            acc_x = 0.0
            acc_y = eta_ay[i]
            mid = v

        ts = ts0 + i
        records.append(
            RawRecord(
                trip_id=trip_id,
                driver_id=driver_id,
                driver_type_raw=driver_type,
                tick_timestamp=ts,
                latitude=round(lat, 7),
                longitude=round(lon, 7),
                speed=round(v, 3),
                mid_speed=round(mid, 3),
                acc_x=round(acc_x, 4),
                acc_y=round(acc_y, 4),
                acc_z=round(9.81 + eta_az[i], 4),
                course=round(course, 3) % 360.0,
                height=round(alt, 2),
                total_meters=round(total, 3),
                influence_raw=influence if i == n - 1 else None,
                point_date=datetime.fromtimestamp(ts + offset_s, tz).strftime(
                    "%Y-%m-%d %H:%M:%S"
                ),
            )
        )
    return records


def generate_corpus(config: GenConfig) -> tuple[list[RawRecord], dict[str, int]]:
    """Generate all trips plus a trip_id -> label ground-truth map."""
    layout = rng_for(config.seed, "layout")
    positive = set(layout.choice(config.n_trips, size=config.n_positive, replace=False).tolist())
    drivers = layout.integers(0, config.n_drivers, size=config.n_trips)
    n_public = config.n_drivers - config.n_private_drivers

    records: list[RawRecord] = []
    truth: dict[str, int] = {}
    for t in range(config.n_trips):
        trip_id = f"trip-{t:04d}"
        d = int(drivers[t])
        driver_type = "public" if d < n_public else "private"
        impaired = t in positive
        records.extend(
            _simulate_trip(
                trip_id,
                f"driver-{d + 1:02d}",
                driver_type,
                impaired,
                config,
                rng_for(config.seed, t),
            )
        )
        truth[trip_id] = 1 if impaired else 0
    return records, truth


def write_truth_csv(truth: dict[str, int], sink) -> None:
    close = False
    if isinstance(sink, (str, Path)):
        sink = open(sink, "w", encoding="utf-8", newline="")
        close = True
    try:
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["trip_id", "label"])
        for trip_id, label in truth.items():
            writer.writerow([trip_id, label])
    finally:
        if close:
            sink.close()
