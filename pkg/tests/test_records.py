import math
from datetime import timedelta

import numpy as np
import pytest

from aerostack.errors import (
    BadTimestampError,
    EmptyInputError,
    MissingFileError,
    MixedSensorsError,
    SchemaMismatchError,
)
from aerostack.records import (
    INDOOR_COLUMNS,
    SensorReading,
    OutdoorObservation,
    hourly_aggregate,
    join_hourly,
    parse_indoor_csv,
    parse_outdoor_csv,
    summary_stats,
    write_indoor_csv,
    write_outdoor_csv,
)
from conftest import UTC, hour_at

HEADER = ",".join(INDOOR_COLUMNS)


def write(tmp_path, text, name="indoor.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestParseIndoor:
    def test_two_row_identity(self, tmp_path):
        path = write(tmp_path, (
            f"{HEADER}\n"
            "2020-03-16T14:00:00Z,S1,B1,-37.5,144.9,5.25,8.5,120.0,22.5,45.0\n"
            "2020-03-16T15:00:00Z,S1,B1,-37.5,144.9,6.75,9.5,121.0,22.6,46.0\n"
        ))
        readings = parse_indoor_csv(path)
        assert len(readings) == 2
        first = readings[0]
        assert first.timestamp == hour_at(14)
        assert first.sensor_id == "S1" and first.building_id == "B1"
        assert (first.lat, first.lon) == (-37.5, 144.9)
        assert (first.pm25, first.pm10, first.tvoc) == (5.25, 8.5, 120.0)
        assert (first.temp_c, first.rh_pct) == (22.5, 45.0)
        assert readings[1].pm25 == 6.75

    def test_header_only_gives_empty_list(self, tmp_path):
        assert parse_indoor_csv(write(tmp_path, HEADER + "\n")) == []

    def test_na_cell_is_missing(self, tmp_path):
        path = write(tmp_path, (
            f"{HEADER}\n"
            "2020-03-16T14:00:00Z,S1,B1,-37.5,144.9,NA,8.5,120.0,22.5,45.0\n"
        ))
        reading = parse_indoor_csv(path)[0]
        assert reading.pm25 is None
        assert reading.pm10 == 8.5

    def test_unparsable_numeric_is_missing(self, tmp_path):
        path = write(tmp_path, (
            f"{HEADER}\n"
            "2020-03-16T14:00:00Z,S1,B1,-37.5,144.9,oops,,120.0,22.5,45.0\n"
        ))
        reading = parse_indoor_csv(path)[0]
        assert reading.pm25 is None and reading.pm10 is None
        assert reading.tvoc == 120.0

    def test_out_of_range_value_is_missing(self, tmp_path):
        path = write(tmp_path, (
            f"{HEADER}\n"
            "2020-03-16T14:00:00Z,S1,B1,-37.5,144.9,-3.0,8.5,120.0,22.5,145.0\n"
        ))
        reading = parse_indoor_csv(path)[0]
        assert reading.pm25 is None  # negative concentration rejected
        assert reading.rh_pct is None  # 145% rejected

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            parse_indoor_csv(tmp_path / "nope.csv")

    def test_schema_mismatch_lists_missing_columns(self, tmp_path):
        path = write(tmp_path, "timestamp,sensor_id,building_id,lat,lon,pm25\nx\n")
        with pytest.raises(SchemaMismatchError) as err:
            parse_indoor_csv(path)
        assert set(err.value.missing_columns) == {"pm10", "tvoc", "temp_c", "rh_pct"}

    def test_bad_timestamp_reports_row(self, tmp_path):
        path = write(tmp_path, (
            f"{HEADER}\n"
            "2020-03-16T14:00:00Z,S1,B1,,,1,,,,\n"
            "16/03/2020 15:00,S1,B1,,,1,,,,\n"
        ))
        with pytest.raises(BadTimestampError) as err:
            parse_indoor_csv(path)
        assert err.value.row == 2

    def test_naive_timestamp_rejected(self, tmp_path):
        path = write(tmp_path, f"{HEADER}\n2020-03-16T14:00:00,S1,B1,,,1,,,,\n")
        with pytest.raises(BadTimestampError):
            parse_indoor_csv(path)


class TestParseOutdoor:
    def test_hour_alignment_enforced(self, tmp_path):
        path = write(tmp_path, (
            "timestamp,building_id,pm25_out,t2m_c,d2m_c,wind10m_ms,sp_pa,ssrd_wm2,tp_mm\n"
            "2020-03-16T14:30:00Z,B1,4.0,15.0,10.0,3.0,101300,200,0\n"
        ), name="outdoor.csv")
        with pytest.raises(BadTimestampError):
            parse_outdoor_csv(path)


def reading(offset_minutes, pm25=None, sensor="S1", **kwargs):
    return SensorReading(
        timestamp=hour_at(0) + timedelta(minutes=offset_minutes),
        sensor_id=sensor,
        building_id="B1",
        pm25=pm25,
        **kwargs,
    )


class TestHourlyAggregate:
    def test_mean_of_two_readings(self):
        records = hourly_aggregate([reading(10 * 60 + 5, 5.0), reading(10 * 60 + 40, 7.0)])
        assert len(records) == 1
        assert records[0].timestamp == hour_at(10)
        assert records[0].pm25 == 6.0

    def test_gap_hours_are_absent(self):
        records = hourly_aggregate([reading(10 * 60, 1.0), reading(12 * 60, 2.0)])
        assert [r.timestamp for r in records] == [hour_at(10), hour_at(12)]

    def test_three_value_mean(self):
        records = hourly_aggregate([reading(5, 1.0), reading(25, 2.0), reading(45, 4.0)])
        # hand oracle: (1 + 2 + 4) / 3
        assert abs(records[0].pm25 - 7.0 / 3.0) < 1e-12

    def test_missing_values_ignored_in_mean(self):
        records = hourly_aggregate([reading(5, 3.0, pm10=2.0), reading(25, None, pm10=4.0)])
        assert records[0].pm25 == 3.0
        assert records[0].pm10 == 3.0

    def test_mixed_sensors_rejected(self):
        with pytest.raises(MixedSensorsError):
            hourly_aggregate([reading(0, 1.0, sensor="S1"), reading(5, 1.0, sensor="S2")])

    def test_output_sorted_and_hour_aligned(self):
        rng = np.random.default_rng(11)
        readings = [reading(int(m), float(rng.uniform(0, 10))) for m in rng.integers(0, 96 * 60, 200)]
        records = hourly_aggregate(readings)
        stamps = [r.timestamp for r in records]
        assert all(a < b for a, b in zip(stamps, stamps[1:]))
        assert all(t.minute == 0 and t.second == 0 for t in stamps)


def outdoor(offset_hours, pm25_out=4.0, building="B1"):
    return OutdoorObservation(
        timestamp=hour_at(offset_hours), building_id=building, pm25_out=pm25_out
    )


class TestJoinHourly:
    def test_full_match(self):
        indoor = hourly_aggregate([reading(h * 60, 1.0) for h in range(3)])
        joined = join_hourly(indoor, [outdoor(h) for h in range(3)])
        assert len(joined) == 3
        assert all(rec.pm25_out == 4.0 for rec in joined)

    def test_unmatched_indoor_keeps_missing_outdoor(self):
        indoor = hourly_aggregate([reading(0, 1.0)])
        joined = join_hourly(indoor, [outdoor(5)])
        assert len(joined) == 1
        assert joined[0].pm25_out is None

    def test_outdoor_without_indoor_dropped(self):
        indoor = hourly_aggregate([reading(0, 1.0)])
        joined = join_hourly(indoor, [outdoor(0), outdoor(1), outdoor(2)])
        assert len(joined) == 1  # left join: indoor drives cardinality

    def test_left_join_cardinality_random(self):
        rng = np.random.default_rng(5)
        indoor = hourly_aggregate(
            [reading(int(h) * 60, 1.0) for h in np.unique(rng.integers(0, 200, 80))]
        )
        observations = [outdoor(int(h)) for h in np.unique(rng.integers(0, 200, 50))]
        assert len(join_hourly(indoor, observations)) == len(indoor)


class TestSummaryStats:
    def test_constant_series(self):
        s = summary_stats([2.0] * 5)
        assert (s.min, s.max, s.median, s.mean) == (2.0, 2.0, 2.0, 2.0)
        assert s.iqr == 0.0 and s.sd == 0.0 and s.n == 5

    def test_interpolated_quantiles_and_sample_sd(self):
        s = summary_stats([1.0, 2.0, 3.0, 4.0])
        # hand oracle: h = (n-1)p -> Q1 at 0.75 between 1 and 2, Q3 at 2.25
        assert abs(s.median - 2.5) < 1e-12
        assert abs(s.mean - 2.5) < 1e-12
        assert abs(s.iqr - (3.25 - 1.75)) < 1e-12
        assert abs(s.sd - math.sqrt(5.0 / 3.0)) < 1e-12

    def test_missing_removed_before_stats(self):
        s = summary_stats([None, 1.0, None, 3.0])
        assert s.n == 2 and s.mean == 2.0

    def test_empty_after_missing_removal(self):
        with pytest.raises(EmptyInputError):
            summary_stats([None, None])

    def test_quantile_ordering_property(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            values = rng.normal(size=rng.integers(1, 40)).tolist()
            s = summary_stats(values)
            q1, q3 = np.quantile(values, [0.25, 0.75], method="linear")
            assert s.min <= q1 <= s.median <= q3 <= s.max
            assert s.iqr == q3 - q1
            assert s.sd >= 0.0


class TestRoundTrip:
    def test_indoor_write_parse_round_trip(self, tmp_path):
        rng = np.random.default_rng(23)
        original = []
        for h in range(48):
            original.append(SensorReading(
                timestamp=hour_at(h),
                sensor_id="S1",
                building_id="B1",
                lat=-37.5,
                lon=144.9,
                pm25=float(rng.gamma(2.0, 1.5)) if rng.random() > 0.1 else None,
                pm10=float(rng.gamma(2.0, 2.5)),
                tvoc=float(rng.uniform(50, 400)),
                temp_c=float(rng.normal(22, 2)),
                rh_pct=float(rng.uniform(20, 90)),
            ))
        path = tmp_path / "round.csv"
        write_indoor_csv(path, original)
        parsed = parse_indoor_csv(path)
        assert len(parsed) == len(original)
        for a, b in zip(original, parsed):
            for name in ("pm25", "pm10", "tvoc", "temp_c", "rh_pct", "lat", "lon"):
                va, vb = getattr(a, name), getattr(b, name)
                if va is None:
                    assert vb is None
                else:
                    assert abs(va - vb) <= 1e-9 * abs(va)

    def test_outdoor_write_parse_round_trip(self, tmp_path):
        observations = [
            OutdoorObservation(
                timestamp=hour_at(h), building_id="B1",
                pm25_out=4.0 + h / 7.0, t2m_c=15.0, d2m_c=9.0,
                wind10m_ms=3.0, sp_pa=101325.0, ssrd_wm2=0.0, tp_mm=0.0,
            )
            for h in range(24)
        ]
        path = tmp_path / "out.csv"
        write_outdoor_csv(path, observations)
        parsed = parse_outdoor_csv(path)
        assert [o.pm25_out for o in parsed] == [o.pm25_out for o in observations]
