"""Sensor/outdoor data model: CSV ingestion, hourly aggregation, joining,
and descriptive statistics.

All timestamps are timezone-aware UTC. Missing numeric values are None.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadTimestampError,
    EmptyInputError,
    MissingFileError,
    MixedSensorsError,
    SchemaMismatchError,
)

INDOOR_COLUMNS = (
    "timestamp", "sensor_id", "building_id", "lat", "lon",
    "pm25", "pm10", "tvoc", "temp_c", "rh_pct",
)
OUTDOOR_COLUMNS = (
    "timestamp", "building_id", "pm25_out", "t2m_c", "d2m_c",
    "wind10m_ms", "sp_pa", "ssrd_wm2", "tp_mm",
)

# numeric range rules; values outside become missing at parse time
_INDOOR_RANGES = {
    "lat": (-90.0, 90.0),
    "lon": (-180.0, 180.0),
    "pm25": (0.0, math.inf),
    "pm10": (0.0, math.inf),
    "rh_pct": (0.0, 100.0),
}
_OUTDOOR_RANGES = {
    "pm25_out": (0.0, math.inf),
    "wind10m_ms": (0.0, math.inf),
    "tp_mm": (0.0, math.inf),
}

_MISSING_TOKEN = "na"


@dataclass(frozen=True, slots=True)
class SensorReading:
    """One raw indoor sensor sample."""

    timestamp: datetime
    sensor_id: str
    building_id: str
    lat: Optional[float] = None
    lon: Optional[float] = None
    pm25: Optional[float] = None
    pm10: Optional[float] = None
    tvoc: Optional[float] = None
    temp_c: Optional[float] = None
    rh_pct: Optional[float] = None


@dataclass(frozen=True, slots=True)
class OutdoorObservation:
    """One hour of outdoor covariates linked to a building."""

    timestamp: datetime
    building_id: str
    pm25_out: Optional[float] = None
    t2m_c: Optional[float] = None
    d2m_c: Optional[float] = None
    wind10m_ms: Optional[float] = None
    sp_pa: Optional[float] = None
    ssrd_wm2: Optional[float] = None
    tp_mm: Optional[float] = None


#: indoor numeric fields averaged by hourly_aggregate
INDOOR_VALUE_FIELDS = ("lat", "lon", "pm25", "pm10", "tvoc", "temp_c", "rh_pct")
#: outdoor numeric fields carried over by join_hourly
OUTDOOR_VALUE_FIELDS = ("pm25_out", "t2m_c", "d2m_c", "wind10m_ms", "sp_pa", "ssrd_wm2", "tp_mm")


@dataclass(frozen=True, slots=True)
class HourlyRecord:
    """One sensor-hour: hour-mean indoor fields joined with outdoor covariates."""

    timestamp: datetime
    sensor_id: str
    building_id: str
    lat: Optional[float] = None
    lon: Optional[float] = None
    pm25: Optional[float] = None
    pm10: Optional[float] = None
    tvoc: Optional[float] = None
    temp_c: Optional[float] = None
    rh_pct: Optional[float] = None
    pm25_out: Optional[float] = None
    t2m_c: Optional[float] = None
    d2m_c: Optional[float] = None
    wind10m_ms: Optional[float] = None
    sp_pa: Optional[float] = None
    ssrd_wm2: Optional[float] = None
    tp_mm: Optional[float] = None


@dataclass(frozen=True, slots=True)
class SummaryStats:
    n: int
    min: float
    max: float
    median: float
    iqr: float
    mean: float
    sd: float


def parse_timestamp(text: str, row: Optional[int] = None) -> datetime:
    """Parse an ISO-8601 UTC instant like ``2020-03-16T14:00:00Z``.

    Raises BadTimestampError (with the offending 1-based data row when given)
    for anything unparsable or lacking a UTC designator.
    """
    raw = text.strip()
    candidate = raw[:-1] + "+00:00" if raw.endswith(("Z", "z")) else raw
    try:
        ts = datetime.fromisoformat(candidate)
    except ValueError:
        raise BadTimestampError(f"malformed timestamp {raw!r} (row {row})", row=row) from None
    if ts.tzinfo is None:
        raise BadTimestampError(f"timestamp {raw!r} has no UTC offset (row {row})", row=row)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_cell(text: str, bounds) -> Optional[float]:
    """Numeric cell -> float, or None for empty/NA/unparsable/out-of-range."""
    raw = text.strip()
    if not raw or raw.lower() == _MISSING_TOKEN:
        return None
    try:
        value = float(raw)
    except ValueError:
        return None
    if not math.isfinite(value):
        return None
    if bounds is not None and not (bounds[0] <= value <= bounds[1]):
        return None
    return value


def _check_header(found, expected, path):
    found = [c.strip().lstrip("﻿") for c in found]
    if found == list(expected):
        return
    missing = [c for c in expected if c not in found]
    extra = [c for c in found if c not in expected]
    parts = [f"{path}: header does not match expected schema"]
    if missing:
        parts.append(f"missing columns: {', '.join(missing)}")
    if extra:
        parts.append(f"unexpected columns: {', '.join(extra)}")
    raise SchemaMismatchError("; ".join(parts), missing_columns=missing)


def _iter_rows(path, expected_columns):
    if not os.path.exists(path):
        raise MissingFileError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(
                f"{path}: empty file, expected header {','.join(expected_columns)}",
                missing_columns=expected_columns,
            ) from None
        _check_header(header, expected_columns, path)
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            # tolerate ragged data rows; absent cells are missing
            padded = row + [""] * (len(expected_columns) - len(row))
            yield row_number, padded


def parse_indoor_csv(path) -> list[SensorReading]:
    """Read an indoor sensor CSV into readings, in file order."""
    readings = []
    for row_number, row in _iter_rows(path, INDOOR_COLUMNS):
        ts = parse_timestamp(row[0], row=row_number)
        readings.append(SensorReading(
            timestamp=ts,
            sensor_id=row[1].strip(),
            building_id=row[2].strip(),
            **{
                name: _parse_cell(row[i], _INDOOR_RANGES.get(name))
                for i, name in enumerate(INDOOR_COLUMNS[3:], start=3)
            },
        ))
    return readings


def parse_outdoor_csv(path) -> list[OutdoorObservation]:
    """Read an outdoor covariate CSV; timestamps must be hour-aligned."""
    observations = []
    for row_number, row in _iter_rows(path, OUTDOOR_COLUMNS):
        ts = parse_timestamp(row[0], row=row_number)
        if ts.minute or ts.second or ts.microsecond:
            raise BadTimestampError(
                f"outdoor timestamp {row[0].strip()!r} is not hour-aligned (row {row_number})",
                row=row_number,
            )
        observations.append(OutdoorObservation(
            timestamp=ts,
            building_id=row[1].strip(),
            **{
                name: _parse_cell(row[i], _OUTDOOR_RANGES.get(name))
                for i, name in enumerate(OUTDOOR_COLUMNS[2:], start=2)
            },
        ))
    return observations


def _format_cell(value: Optional[float]) -> str:
    if value is None:
        return ""
    return repr(float(value))


def write_indoor_csv(path, readings: Sequence[SensorReading]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(INDOOR_COLUMNS)
        for r in readings:
            writer.writerow(
                [format_timestamp(r.timestamp), r.sensor_id, r.building_id]
                + [_format_cell(getattr(r, name)) for name in INDOOR_COLUMNS[3:]]
            )


def write_outdoor_csv(path, observations: Sequence[OutdoorObservation]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(OUTDOOR_COLUMNS)
        for o in observations:
            writer.writerow(
                [format_timestamp(o.timestamp), o.building_id]
                + [_format_cell(getattr(o, name)) for name in OUTDOOR_COLUMNS[2:]]
            )


def floor_to_hour(ts: datetime) -> datetime:
    return ts.replace(minute=0, second=0, microsecond=0)


def hourly_aggregate(readings: Sequence[SensorReading]) -> list[HourlyRecord]:
    """Average raw readings into one record per (sensor, hour).

    Every numeric field becomes the arithmetic mean of its present values in
    that hour; hours with no readings stay absent. Input must come from a
    single sensor.
    """
    if not readings:
        return []
    sensor_ids = {r.sensor_id for r in readings}
    if len(sensor_ids) > 1:
        raise MixedSensorsError(
            f"hourly_aggregate expects one sensor, got: {', '.join(sorted(sensor_ids))}"
        )
    buckets: dict[datetime, list[SensorReading]] = {}
    for r in readings:
        buckets.setdefault(floor_to_hour(r.timestamp), []).append(r)

    records = []
    for hour in sorted(buckets):
        group = buckets[hour]
        values = {}
        for name in INDOOR_VALUE_FIELDS:
            present = [getattr(r, name) for r in group if getattr(r, name) is not None]
            values[name] = sum(present) / len(present) if present else None
        records.append(HourlyRecord(
            timestamp=hour,
            sensor_id=group[0].sensor_id,
            building_id=group[0].building_id,
            **values,
        ))
    return records


def join_hourly(
    indoor: Sequence[HourlyRecord], outdoor: Sequence[OutdoorObservation]
) -> list[HourlyRecord]:
    """Left-join outdoor covariates onto indoor hours by (building_id, hour).

    Every indoor record appears exactly once; unmatched hours keep their
    outdoor fields missing. Duplicate outdoor keys: first wins.
    """
    lookup: dict[tuple[str, datetime], OutdoorObservation] = {}
    for o in outdoor:
        lookup.setdefault((o.building_id, o.timestamp), o)
    joined = []
    for rec in indoor:
        match = lookup.get((rec.building_id, rec.timestamp))
        if match is None:
            joined.append(rec)
        else:
            joined.append(replace(
                rec, **{name: getattr(match, name) for name in OUTDOOR_VALUE_FIELDS}
            ))
    return joined


def summary_stats(values: Sequence[Optional[float]]) -> SummaryStats:
    """Descriptive statistics with type-7 (linear interpolation) quantiles
    and sample SD; missing values are dropped first."""
    clean = np.array(
        [v for v in values if v is not None and math.isfinite(v)], dtype=np.float64
    )
    if clean.size == 0:
        raise EmptyInputError("summary_stats: no values left after removing missing")
    q1, median, q3 = np.quantile(clean, [0.25, 0.5, 0.75], method="linear")
    sd = float(np.std(clean, ddof=1)) if clean.size > 1 else 0.0
    return SummaryStats(
        n=int(clean.size),
        min=float(clean.min()),
        max=float(clean.max()),
        median=float(median),
        iqr=float(q3 - q1),
        mean=float(clean.mean()),
        sd=sd,
    )


def record_as_dict(record) -> dict:
    """Dataclass -> plain dict (timestamps untouched)."""
    return {f.name: getattr(record, f.name) for f in fields(record)}


def building_hourly_records(
    readings: Sequence[SensorReading],
    observations: Sequence[OutdoorObservation] = (),
) -> dict[str, list[HourlyRecord]]:
    """Per building: sensor-hour means averaged across sensors, joined with
    the building's outdoor series. The merged records carry an empty
    sensor_id to mark the building level."""
    by_building: dict[str, dict[str, list[SensorReading]]] = {}
    for r in readings:
        by_building.setdefault(r.building_id, {}).setdefault(r.sensor_id, []).append(r)

    result = {}
    for building_id in sorted(by_building):
        per_hour: dict[datetime, list[HourlyRecord]] = {}
        for sensor_readings in by_building[building_id].values():
            for rec in hourly_aggregate(sensor_readings):
                per_hour.setdefault(rec.timestamp, []).append(rec)
        merged = []
        for hour in sorted(per_hour):
            group = per_hour[hour]
            values = {}
            for name in INDOOR_VALUE_FIELDS:
                present = [getattr(rec, name) for rec in group if getattr(rec, name) is not None]
                values[name] = sum(present) / len(present) if present else None
            merged.append(HourlyRecord(
                timestamp=hour, sensor_id="", building_id=building_id, **values
            ))
        result[building_id] = join_hourly(merged, observations)
    return result
