import io
from datetime import datetime, timedelta, timezone

import pytest

from tripsense.errors import ConflictingInfluence, MalformedRow, MissingColumn
from tripsense.ingest import (
    Influence,
    clean_and_group,
    decompose_timestamp,
    encode_influence,
    parse_sensor_csv,
    write_sensor_csv,
)

from conftest import make_record

HEADER = (
    "tripId,driverId,driverType,tickTimestamp,latitude,longitude,speed,midSpeed,"
    "accX,accY,accZ,course,height,totalMeters,influence,pointDate"
)


def row(trip="t1", ts=1700000000, speed="40.0", influence="", extra=""):
    return (
        f"{trip},d1,public,{ts},9.0,7.5,{speed},39.0,0.1,-0.2,9.8,180.0,300.0,"
        f"100.0,{influence},{extra}"
    )


def parse_text(text: str):
    return parse_sensor_csv(io.StringIO(text))


class TestParseSensorCsv:
    def test_minimal_parse(self):
        records = parse_text(HEADER + "\n" + row())
        assert len(records) == 1
        assert records[0].trip_id == "t1"
        assert records[0].speed == 40.0
        assert records[0].influence_raw is None

    def test_malformed_speed_names_line(self):
        text = HEADER + "\n" + row() + "\n" + row(speed="abc")
        with pytest.raises(MalformedRow) as exc:
            parse_text(text)
        assert exc.value.line_no == 3

    def test_lateral_and_yaw_columns_ignored(self):
        header = HEADER + ",lateral,yaw"
        text = header + "\n" + row(extra="") + ",0.5,0.1"
        records = parse_text(text)
        assert len(records) == 1
        assert not hasattr(records[0], "lateral")

    def test_missing_column_reported(self):
        text = HEADER.replace(",course", "") + "\n"
        with pytest.raises(MissingColumn) as exc:
            parse_text(text)
        assert exc.value.name == "course"

    def test_influence_cell_preserved(self):
        records = parse_text(HEADER + "\n" + row(influence="fatigue"))
        assert records[0].influence_raw == "fatigue"

    def test_out_of_range_value_is_malformed(self):
        line = row().replace("9.0,7.5", "95.0,7.5")
        with pytest.raises(MalformedRow):
            parse_text(HEADER + "\n" + line)

    def test_bad_driver_type_is_malformed(self):
        with pytest.raises(MalformedRow):
            parse_text(HEADER + "\n" + row().replace(",public,", ",bus,"))

    def test_parses_binary_stream(self):
        data = (HEADER + "\n" + row()).encode("utf-8")
        records = parse_sensor_csv(io.BytesIO(data))
        assert len(records) == 1

    def test_file_order_preserved(self):
        text = HEADER + "\n" + row(ts=1700000002) + "\n" + row(ts=1700000001)
        records = parse_text(text)
        assert [r.tick_timestamp for r in records] == [1700000002, 1700000001]


class TestEncodeInfluence:
    def test_alcohol_is_one(self):
        assert encode_influence("alcohol") is Influence.ALCOHOL
        assert Influence.ALCOHOL.value == 1

    def test_other_influences_are_zero(self):
        assert encode_influence("fatigue") is Influence.OTHER
        assert Influence.OTHER.value == 0

    def test_empty_and_none_are_missing(self):
        assert encode_influence("") is Influence.MISSING
        assert encode_influence(None) is Influence.MISSING

    def test_invalid_characters(self):
        assert encode_influence("über#fast") is Influence.INVALID

    def test_allowed_punctuation(self):
        assert encode_influence("phone use") is Influence.OTHER
        assert encode_influence("over-loading, heavy") is Influence.OTHER
        assert encode_influence("road_rage") is Influence.OTHER

    def test_alcohol_phrases_match(self):
        assert encode_influence("Alcohol intake") is Influence.ALCOHOL
        assert encode_influence("had ALCOHOL earlier") is Influence.ALCOHOL

    def test_case_insensitive(self):
        assert encode_influence("ALCOHOL") is Influence.ALCOHOL


class TestCleanAndGroup:
    def _records(self):
        recs = []
        for trip, influence in (("a", "alcohol"), ("b", "fatigue"), ("c", "")):
            for k in range(3):
                recs.append(
                    make_record(
                        trip_id=trip,
                        tick_timestamp=1700000000 + k,
                        influence_raw=influence if k == 2 else None,
                    )
                )
        return recs

    def test_missing_report_trip_dropped(self):
        trips, report = clean_and_group(self._records())
        assert [t.trip_id for t in trips] == ["a", "b"]
        assert report.trips_in == 3
        assert report.trips_kept == 2
        assert report.trips_dropped_no_report == 1
        assert report.trips_dropped_invalid_influence == 0
        assert report.points_in == 9
        assert report.points_kept == 6

    def test_influence_encoding(self):
        trips, _ = clean_and_group(self._records())
        assert trips[0].influence == 1
        assert trips[1].influence == 0

    def test_invalid_characters_trip_dropped(self):
        recs = [make_record(influence_raw="über#fast")]
        trips, report = clean_and_group(recs)
        assert trips == []
        assert report.trips_dropped_invalid_influence == 1

    def test_points_sorted_by_timestamp(self):
        recs = [
            make_record(tick_timestamp=1700000002, influence_raw="alcohol"),
            make_record(tick_timestamp=1700000000),
            make_record(tick_timestamp=1700000001),
        ]
        trips, _ = clean_and_group(recs)
        stamps = [p.tick_timestamp for p in trips[0].points]
        assert stamps == sorted(stamps)

    def test_conflicting_influence_raises(self):
        recs = [
            make_record(tick_timestamp=1700000000, influence_raw="alcohol"),
            make_record(tick_timestamp=1700000001, influence_raw="fatigue"),
        ]
        with pytest.raises(ConflictingInfluence):
            clean_and_group(recs)

    def test_repeated_identical_influence_ok(self):
        recs = [
            make_record(tick_timestamp=1700000000, influence_raw="alcohol"),
            make_record(tick_timestamp=1700000001, influence_raw="alcohol"),
        ]
        trips, _ = clean_and_group(recs)
        assert trips[0].influence == 1

    def test_driver_type_encoding(self):
        recs = [
            make_record(trip_id="pub", driver_type_raw="public", influence_raw="none"),
            make_record(trip_id="priv", driver_type_raw="private", influence_raw="none"),
        ]
        trips, _ = clean_and_group(recs)
        by_id = {t.trip_id: t for t in trips}
        assert by_id["pub"].driver_type == 1
        assert by_id["priv"].driver_type == 0

    def test_never_emits_nonbinary_influence(self):
        trips, _ = clean_and_group(self._records())
        assert all(t.influence in (0, 1) for t in trips)


class TestDecomposeTimestamp:
    def test_epoch_with_offset(self):
        assert decompose_timestamp(0, 60) == (1.0, 3)  # Thu 1970-01-01 01:00 local

    def test_epoch_origin(self):
        assert decompose_timestamp(0, 0) == (0.0, 3)

    def test_last_second_of_day(self):
        hour, dow = decompose_timestamp(86399, 0)
        assert dow == 3
        assert hour == pytest.approx(23 + 59 / 60 + 59 / 3600, abs=1e-12)

    def test_matches_datetime_oracle(self, rng):
        for _ in range(300):
            ts = int(rng.integers(1, 2_000_000_000))
            offset = int(rng.integers(-840, 841))
            hour, dow = decompose_timestamp(ts, offset)
            dt = datetime.fromtimestamp(
                ts, tz=timezone(timedelta(minutes=offset))
            )
            assert dow == dt.weekday()
            expected = dt.hour + dt.minute / 60 + dt.second / 3600
            assert hour == pytest.approx(expected, abs=1e-9)

    def test_day_shift_property(self, rng):
        for _ in range(200):
            ts = int(rng.integers(1, 2_000_000_000))
            offset = int(rng.integers(-840, 841))
            k = int(rng.integers(-1000, 1000))
            hour0, dow0 = decompose_timestamp(ts, offset)
            hour1, dow1 = decompose_timestamp(ts + 86400 * k, offset)
            assert hour1 == hour0
            assert dow1 == (dow0 + k) % 7

    def test_offset_out_of_range(self):
        with pytest.raises(ValueError):
            decompose_timestamp(0, 900)


class TestRoundTrip:
    def test_write_then_parse_is_identity(self):
        records = [
            make_record(
                tick_timestamp=1700000000 + k,
                latitude=9.0 + 0.1 * k,
                speed=40.0 + k / 3.0,
                acc_y=-0.123456789 * k,
                influence_raw="alcohol" if k == 2 else None,
                point_date="2023-11-14 22:13:20" if k == 0 else None,
            )
            for k in range(3)
        ]
        buffer = io.StringIO()
        write_sensor_csv(records, buffer)
        reparsed = parse_sensor_csv(io.StringIO(buffer.getvalue()))
        assert reparsed == records
