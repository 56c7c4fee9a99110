from datetime import datetime, timezone

import numpy as np
import pytest

from aerostack.errors import ConfigError, EmptySchemaError, InputError, UnknownColumnError
from aerostack.features import (
    FeatureSchema,
    apply_standardizer,
    build_feature_matrix,
    fit_standardizer,
    invert_standardizer,
    season_of,
)
from aerostack.records import HourlyRecord
from conftest import hour_at, toy_matrix


def make_records(n_hours, pm25=None, skip=(), **covariate_series):
    """Consecutive hourly records for one sensor; ``skip`` drops hours."""
    records = []
    for h in range(n_hours):
        if h in skip:
            continue
        fields = {name: series[h] for name, series in covariate_series.items()}
        records.append(HourlyRecord(
            timestamp=hour_at(h),
            sensor_id="S1",
            building_id="B1",
            lat=-35.3,
            lon=149.1,
            pm25=float(pm25[h]) if pm25 is not None else float(h),
            **fields,
        ))
    return records


SIMPLE = FeatureSchema(lags=(1, 2, 3, 4, 5, 6, 24), calendar=True, covariates=())


class TestBuildFeatureMatrix:
    def test_row_count_with_day_lag(self):
        matrix = build_feature_matrix(make_records(30), SIMPLE)
        # only t = 24..29 have their t-24 lag available
        assert matrix.n_rows == 30 - 24

    def test_lag_one_is_previous_target(self):
        rng = np.random.default_rng(2)
        pm25 = rng.uniform(1, 9, 40)
        matrix = build_feature_matrix(make_records(40, pm25=pm25), SIMPLE)
        lag1 = matrix.column("lag_1")
        for row, ts in enumerate(matrix.timestamps):
            t = int((ts - hour_at(0)).total_seconds() // 3600)
            assert lag1[row] == pm25[t - 1]
            assert matrix.y[row] == pm25[t]

    def test_southern_hemisphere_seasons(self):
        utc = timezone.utc
        assert season_of(datetime(2020, 1, 15, 3, tzinfo=utc)) == 1  # DJF = summer
        assert season_of(datetime(2020, 4, 1, tzinfo=utc)) == 2
        assert season_of(datetime(2020, 7, 1, tzinfo=utc)) == 3
        assert season_of(datetime(2020, 10, 1, tzinfo=utc)) == 4
        # records start 2020-03-16 (March -> autumn -> 2)
        matrix = build_feature_matrix(
            make_records(26), FeatureSchema(lags=(1,), calendar=True, covariates=())
        )
        assert set(matrix.column("season")) == {2.0}
        assert set(matrix.column("lat")) == {-35.3}

    def test_covariates_come_from_previous_hour(self):
        n = 30
        sentinel_hour = 27
        pm10 = [float(h) for h in range(n)]
        pm10[sentinel_hour] = 999.0
        schema = FeatureSchema(lags=(1,), calendar=False, covariates=("pm10",))
        matrix = build_feature_matrix(make_records(n, pm10=pm10), schema)
        col = matrix.column("pm10")
        for row, ts in enumerate(matrix.timestamps):
            t = int((ts - hour_at(0)).total_seconds() // 3600)
            assert col[row] == pm10[t - 1]
        # the sentinel shows up only in the row one hour later
        rows_with_sentinel = [
            int((ts - hour_at(0)).total_seconds() // 3600)
            for row, ts in enumerate(matrix.timestamps) if col[row] == 999.0
        ]
        assert rows_with_sentinel == [sentinel_hour + 1]

    def test_row_count_matches_brute_force_on_gappy_series(self):
        rng = np.random.default_rng(9)
        n = 120
        skip = set(int(h) for h in rng.choice(n, size=25, replace=False))
        records = make_records(n, skip=skip)
        schema = FeatureSchema(lags=(1, 2, 24), calendar=True, covariates=())
        matrix = build_feature_matrix(records, schema)

        present = {int((r.timestamp - hour_at(0)).total_seconds() // 3600) for r in records}
        expected = sum(
            1 for t in sorted(present)
            if all(t - k in present for k in schema.lags)
        )
        assert matrix.n_rows == expected

    def test_rows_with_missing_covariate_dropped(self):
        pm10 = [float(h) for h in range(30)]
        pm10[10] = None
        schema = FeatureSchema(lags=(1,), calendar=False, covariates=("pm10",))
        matrix = build_feature_matrix(make_records(30, pm10=pm10), schema)
        # the row needing pm10 at hour 10 (target hour 11) is gone
        assert hour_at(11) not in matrix.timestamps
        assert matrix.n_rows == 28  # 29 candidate rows minus the dropped hour 11

    def test_empty_matrix_when_no_row_qualifies(self):
        matrix = build_feature_matrix(
            make_records(10), FeatureSchema(lags=(48,), calendar=False, covariates=())
        )
        assert matrix.n_rows == 0

    def test_empty_schema_rejected(self):
        schema = FeatureSchema(lags=(), calendar=False, covariates=(), coordinates=False)
        with pytest.raises(EmptySchemaError):
            build_feature_matrix(make_records(5), schema)

    def test_unsorted_records_rejected(self):
        records = make_records(5)
        with pytest.raises(InputError):
            build_feature_matrix(list(reversed(records)), SIMPLE)

    def test_bad_lags_rejected(self):
        with pytest.raises(ConfigError):
            FeatureSchema(lags=(0, 1))
        with pytest.raises(ConfigError):
            FeatureSchema(lags=(1, 1))


class TestStandardizer:
    def test_hand_z_scores(self):
        matrix = toy_matrix(np.array([[1.0], [2.0], [3.0]]), np.zeros(3))
        std = fit_standardizer(matrix, ["x0"])
        out = apply_standardizer(std, matrix)
        np.testing.assert_allclose(out.X[:, 0], [-1.0, 0.0, 1.0], atol=1e-15)

    def test_constant_column_passes_through_as_zero(self):
        matrix = toy_matrix(np.full((4, 1), 7.0), np.zeros(4))
        out = apply_standardizer(fit_standardizer(matrix), matrix)
        assert np.all(out.X == 0.0)

    def test_train_statistics_reused_on_identical_rows(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(10, 3))
        train = toy_matrix(X, np.zeros(10))
        test = toy_matrix(X.copy(), np.zeros(10))
        std = fit_standardizer(train)
        np.testing.assert_array_equal(
            apply_standardizer(std, train).X, apply_standardizer(std, test).X
        )

    def test_invert_recovers_values(self):
        rng = np.random.default_rng(1)
        matrix = toy_matrix(rng.normal(loc=5.0, scale=3.0, size=(20, 4)), np.zeros(20))
        std = fit_standardizer(matrix)
        back = invert_standardizer(std, apply_standardizer(std, matrix))
        np.testing.assert_allclose(back.X, matrix.X, rtol=1e-9)

    def test_unknown_column(self):
        matrix = toy_matrix(np.zeros((3, 1)), np.zeros(3))
        with pytest.raises(UnknownColumnError):
            fit_standardizer(matrix, ["bogus"])
        std = fit_standardizer(matrix, ["x0"])
        other = toy_matrix(np.zeros((3, 1)), np.zeros(3), names=("different",))
        with pytest.raises(UnknownColumnError):
            apply_standardizer(std, other)
