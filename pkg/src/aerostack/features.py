"""Feature engineering: lagged targets, calendar fields, coordinates, and
previous-hour covariates, plus column standardization for linear learners."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, EmptyInputError, EmptySchemaError, InputError, UnknownColumnError
from .records import HourlyRecord

DEFAULT_LAGS = (1, 2, 3, 4, 5, 6, 24)
DEFAULT_COVARIATES = (
    "pm10", "tvoc", "temp_c", "rh_pct",
    "pm25_out", "t2m_c", "d2m_c", "wind10m_ms", "sp_pa", "ssrd_wm2", "tp_mm",
)
CALENDAR_FEATURES = ("year", "month", "day", "day_of_week", "hour", "season")
COORDINATE_FEATURES = ("lat", "lon")

# Southern-Hemisphere seasons, encoded 1-4
_SEASON_BY_MONTH = {12: 1, 1: 1, 2: 1,   # summer (DJF)
                    3: 2, 4: 2, 5: 2,    # autumn (MAM)
                    6: 3, 7: 3, 8: 3,    # winter (JJA)
                    9: 4, 10: 4, 11: 4}  # spring (SON)


def season_of(ts: datetime) -> int:
    return _SEASON_BY_MONTH[ts.month]


@dataclass(frozen=True)
class FeatureSchema:
    """Declares which columns the model consumes, in a fixed order:
    lag features, calendar fields, coordinates, then covariates.

    Lagged targets are the indoor PM2.5 k hours before the target hour;
    covariates enter at one hour before the target hour (nothing except
    calendar fields and coordinates may read the target's own hour).
    """

    lags: tuple[int, ...] = DEFAULT_LAGS
    calendar: bool = True
    covariates: tuple[str, ...] = DEFAULT_COVARIATES
    coordinates: bool = True

    def __post_init__(self):
        object.__setattr__(self, "lags", tuple(int(k) for k in self.lags))
        object.__setattr__(self, "covariates", tuple(self.covariates))
        if any(k < 1 for k in self.lags):
            raise ConfigError(f"lags must all be >= 1, got {self.lags}")
        if len(set(self.lags)) != len(self.lags):
            raise ConfigError(f"duplicate lags in {self.lags}")
        names = self.feature_names
        if len(set(names)) != len(names):
            raise ConfigError("feature names are not unique")

    @property
    def feature_names(self) -> tuple[str, ...]:
        names = [f"lag_{k}" for k in self.lags]
        if self.calendar:
            names.extend(CALENDAR_FEATURES)
        if self.coordinates:
            names.extend(COORDINATE_FEATURES)
        names.extend(self.covariates)
        return tuple(names)

    def to_json_dict(self) -> dict:
        return {"lags": list(self.lags), "calendar": self.calendar,
                "covariates": list(self.covariates), "coordinates": self.coordinates}

    @classmethod
    def from_json_dict(cls, data: dict) -> "FeatureSchema":
        unknown = set(data) - {"lags", "calendar", "covariates", "coordinates"}
        if unknown:
            raise ConfigError(f"unknown keys in features config: {sorted(unknown)}")
        kwargs = {}
        if "lags" in data:
            kwargs["lags"] = tuple(data["lags"])
        for flag in ("calendar", "coordinates"):
            if flag in data:
                if not isinstance(data[flag], bool):
                    raise ConfigError(f"features.{flag} must be a boolean")
                kwargs[flag] = data[flag]
        if "covariates" in data:
            kwargs["covariates"] = tuple(data["covariates"])
        return cls(**kwargs)


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense feature rows with aligned timestamps and target values.

    Rows never contain missing cells; construction drops any incomplete row.
    Arrays are read-only after construction.
    """

    schema: FeatureSchema
    X: np.ndarray
    timestamps: tuple[datetime, ...]
    y: np.ndarray

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "timestamps", tuple(self.timestamps))
        if X.ndim != 2 or X.shape[1] != len(self.schema.feature_names):
            raise InputError(
                f"feature matrix has {X.shape[1] if X.ndim == 2 else '?'} columns, "
                f"schema declares {len(self.schema.feature_names)}"
            )
        if len(self.timestamps) != X.shape[0] or y.shape != (X.shape[0],):
            raise InputError("rows, timestamps and target lengths disagree")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.schema.feature_names

    def column_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise UnknownColumnError(f"no feature column named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.column_index(name)]

    def take_rows(self, indices) -> "FeatureMatrix":
        indices = np.asarray(indices)
        return FeatureMatrix(
            schema=self.schema,
            X=self.X[indices],
            timestamps=tuple(self.timestamps[i] for i in indices),
            y=self.y[indices],
        )

    def with_X(self, X: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(schema=self.schema, X=X, timestamps=self.timestamps, y=self.y)


def build_feature_matrix(
    records: Sequence[HourlyRecord], schema: FeatureSchema
) -> FeatureMatrix:
    """Turn one sensor's joined hourly series into model rows.

    A timestamp t becomes a row only when the target and every schema
    feature is available: all lag hours t-k must exist with pm25 present,
    covariates are read from the record at t-1, and coordinates from t
    itself. Gaps simply produce fewer rows; an empty result is legal.
    """
    names = schema.feature_names
    if not names:
        raise EmptySchemaError("feature schema declares no columns")
    if len({r.sensor_id for r in records}) > 1:
        raise InputError("build_feature_matrix expects records from one sensor")
    for prev, cur in zip(records, records[1:]):
        if cur.timestamp <= prev.timestamp:
            raise InputError("records must be sorted by strictly increasing timestamp")
    for r in records:
        if r.timestamp.minute or r.timestamp.second or r.timestamp.microsecond:
            raise InputError(f"record at {r.timestamp} is not hour-aligned")

    by_hour = {r.timestamp: r for r in records}
    hour = timedelta(hours=1)

    rows = []
    timestamps = []
    targets = []
    for rec in records:
        if rec.pm25 is None:
            continue
        row = _feature_row(rec, by_hour, schema, hour)
        if row is None:
            continue
        rows.append(row)
        timestamps.append(rec.timestamp)
        targets.append(rec.pm25)

    X = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(names)))
    y = np.array(targets, dtype=np.float64)
    return FeatureMatrix(schema=schema, X=X, timestamps=tuple(timestamps), y=y)


def _feature_row(rec, by_hour, schema, hour):
    t = rec.timestamp
    row = []
    for k in schema.lags:
        lagged = by_hour.get(t - k * hour)
        if lagged is None or lagged.pm25 is None:
            return None
        row.append(lagged.pm25)
    if schema.calendar:
        row.extend([
            float(t.year), float(t.month), float(t.day),
            float(t.weekday()), float(t.hour), float(season_of(t)),
        ])
    if schema.coordinates:
        if rec.lat is None or rec.lon is None:
            return None
        row.extend([rec.lat, rec.lon])
    if schema.covariates:
        prev = by_hour.get(t - hour)
        if prev is None:
            return None
        for name in schema.covariates:
            value = getattr(prev, name)
            if value is None:
                return None
            row.append(value)
    return row


@dataclass(frozen=True)
class Standardizer:
    """Per-column (x - mean) / sd transform learned from training rows.

    Constant columns store sd = 1 so they pass through as zeros.
    """

    columns: tuple[str, ...]
    means: np.ndarray = field(repr=False)
    sds: np.ndarray = field(repr=False)


def fit_standardizer(
    matrix: FeatureMatrix, columns: Optional[Sequence[str]] = None
) -> Standardizer:
    """Learn column means and sample SDs; ``columns`` defaults to all."""
    if matrix.n_rows == 0:
        raise EmptyInputError("cannot fit a standardizer on an empty matrix")
    names = tuple(columns) if columns is not None else matrix.feature_names
    idx = [matrix.column_index(c) for c in names]
    sub = matrix.X[:, idx]
    means = sub.mean(axis=0)
    sds = sub.std(axis=0, ddof=1) if matrix.n_rows > 1 else np.zeros(len(idx))
    sds = np.where(sds > 0.0, sds, 1.0)
    return Standardizer(columns=names, means=means, sds=sds)


def apply_standardizer(std: Standardizer, matrix: FeatureMatrix) -> FeatureMatrix:
    X = matrix.X.copy()
    for j, name in enumerate(std.columns):
        col = matrix.column_index(name)
        X[:, col] = (X[:, col] - std.means[j]) / std.sds[j]
    return matrix.with_X(X)


def invert_standardizer(std: Standardizer, matrix: FeatureMatrix) -> FeatureMatrix:
    X = matrix.X.copy()
    for j, name in enumerate(std.columns):
        col = matrix.column_index(name)
        X[:, col] = X[:, col] * std.sds[j] + std.means[j]
    return matrix.with_X(X)
