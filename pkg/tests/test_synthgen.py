import io
import math

import numpy as np
import pytest

from tripsense.aggregate import build_dataset
from tripsense.core import canonical_feature_names
from tripsense.errors import InvalidConfig
from tripsense.ingest import clean_and_group, parse_sensor_csv, write_sensor_csv
from tripsense.synthgen import GenConfig, generate_corpus, write_truth_csv

SMALL = GenConfig(n_trips=12, n_positive=3, min_points=50, max_points=90, seed=5)


def haversine_m(lat1, lon1, lat2, lon2) -> float:
    r = 6371000.0
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * r * math.asin(math.sqrt(a))


def by_trip(records):
    trips = {}
    for r in records:
        trips.setdefault(r.trip_id, []).append(r)
    return trips


class TestGenerateCorpus:
    def test_default_config_counts(self, default_corpus):
        records, truth = default_corpus["records"], default_corpus["truth"]
        assert len(truth) == 108
        assert sum(truth.values()) == 14
        alcohol_trips = {r.trip_id for r in records if r.influence_raw == "alcohol"}
        assert len(alcohol_trips) == 14
        assert alcohol_trips == {t for t, v in truth.items() if v == 1}

    def test_small_config_counts(self):
        records, truth = generate_corpus(SMALL)
        assert len(truth) == 12
        assert sum(truth.values()) == 3
        sizes = [len(v) for v in by_trip(records).values()]
        assert all(50 <= s <= 90 for s in sizes)

    def test_parses_cleanly_with_zero_drops(self, default_corpus):
        records = parse_sensor_csv(default_corpus["dir"] / "corpus.csv")
        trips, report = clean_and_group(records)
        assert report.trips_in == 108
        assert report.trips_kept == 108
        assert report.trips_dropped_no_report == 0
        assert report.trips_dropped_invalid_influence == 0
        labels = {t.trip_id: t.influence for t in trips}
        assert labels == default_corpus["truth"]

    def test_total_meters_non_decreasing(self):
        records, _ = generate_corpus(SMALL)
        for points in by_trip(records).values():
            meters = [p.total_meters for p in points]
            assert all(b >= a for a, b in zip(meters, meters[1:]))

    def test_gps_displacement_matches_speed(self):
        records, _ = generate_corpus(SMALL)
        for points in by_trip(records).values():
            for prev, cur in zip(points, points[1:]):
                moved = haversine_m(
                    prev.latitude, prev.longitude, cur.latitude, cur.longitude
                )
                expected = cur.speed / 3.6
                assert abs(moved - expected) <= 0.2 * expected + 0.05

    def test_timestamps_are_one_hertz(self):
        records, _ = generate_corpus(SMALL)
        for points in by_trip(records).values():
            stamps = [p.tick_timestamp for p in points]
            assert all(b - a == 1 for a, b in zip(stamps, stamps[1:]))

    def test_byte_identical_for_same_seed(self):
        out1, out2 = io.StringIO(), io.StringIO()
        records1, truth1 = generate_corpus(SMALL)
        records2, truth2 = generate_corpus(SMALL)
        write_sensor_csv(records1, out1)
        write_sensor_csv(records2, out2)
        assert out1.getvalue() == out2.getvalue()
        assert truth1 == truth2

    def test_different_seed_differs(self):
        a, _ = generate_corpus(SMALL)
        b, _ = generate_corpus(GenConfig(
            n_trips=12, n_positive=3, min_points=50, max_points=90, seed=6
        ))
        assert [r.speed for r in a[:50]] != [r.speed for r in b[:50]]

    def test_influence_written_on_last_row_only(self):
        records, _ = generate_corpus(SMALL)
        for points in by_trip(records).values():
            assert all(p.influence_raw is None for p in points[:-1])
            assert points[-1].influence_raw is not None

    def test_impaired_speed_std_exceeds_sober(self, default_corpus):
        records, truth = default_corpus["records"], default_corpus["truth"]
        trips, _ = clean_and_group(records)
        dataset = build_dataset(trips, 60)
        idx = canonical_feature_names().index("speed_std")
        values = dataset.features[:, idx]
        impaired = values[dataset.labels == 1]
        sober = values[dataset.labels == 0]
        assert impaired.mean() > sober.mean()

    def test_zero_strength_classes_look_alike(self):
        config = GenConfig(
            n_trips=30, n_positive=10, min_points=100, max_points=150,
            seed=5, signature_strength=0.0,
        )
        records, _ = generate_corpus(config)
        trips, _ = clean_and_group(records)
        dataset = build_dataset(trips, 60)
        idx = canonical_feature_names().index("speed_std")
        impaired = dataset.features[dataset.labels == 1, idx]
        sober = dataset.features[dataset.labels == 0, idx]
        ratio = impaired.mean() / sober.mean()
        assert 0.7 < ratio < 1.4

    def test_party_window_start_times(self, default_corpus):
        # impaired trips cluster on Fri/Sat/Sun nights at strength 1.0
        records, truth = default_corpus["records"], default_corpus["truth"]
        trips, _ = clean_and_group(records)
        dataset = build_dataset(trips, 60)
        names = canonical_feature_names()
        dow = dataset.features[:, names.index("day_of_week_mean")]
        impaired_weekend = np.mean(dow[dataset.labels == 1] >= 4)
        sober_weekend = np.mean(dow[dataset.labels == 0] >= 4)
        assert impaired_weekend > sober_weekend

    def test_truth_csv_round_trip(self, tmp_path):
        _, truth = generate_corpus(SMALL)
        path = tmp_path / "truth.csv"
        write_truth_csv(truth, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "trip_id,label"
        parsed = dict(line.split(",") for line in lines[1:])
        assert {k: int(v) for k, v in parsed.items()} == truth


class TestGenConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_trips": 0},
            {"n_positive": 20, "n_trips": 10},
            {"min_points": 100, "max_points": 50},
            {"min_points": 0},
            {"signature_strength": -1.0},
            {"n_private_drivers": 30},
            {"utc_offset_minutes": 2000},
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        with pytest.raises(InvalidConfig):
            GenConfig(**kwargs)
