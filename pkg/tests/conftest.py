from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from aerostack.ensemble import ArrayMatrix
from aerostack.features import FeatureSchema, build_feature_matrix
from aerostack.records import hourly_aggregate, join_hourly
from aerostack.synth import SynthConfig, generate

UTC = timezone.utc
T0 = datetime(2020, 3, 16, 0, 0, tzinfo=UTC)


def hour_at(offset: int) -> datetime:
    return T0 + timedelta(hours=offset)


def toy_matrix(X, y, names=None) -> ArrayMatrix:
    """Bare named matrix for learner-level tests."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if names is None:
        names = tuple(f"x{j}" for j in range(X.shape[1]))
    timestamps = tuple(hour_at(i) for i in range(X.shape[0]))
    return ArrayMatrix(names=tuple(names), X=X, timestamps=timestamps, y=np.asarray(y, float))


def synthetic_matrix(n_days=10, seed=3, alpha=0.6, schema=None, bushfire=None):
    cfg = SynthConfig(seed=seed, n_days=n_days, outdoor_coupling=alpha, bushfire=bushfire)
    readings, observations = generate(cfg)
    joined = join_hourly(hourly_aggregate(readings), observations)
    return build_feature_matrix(joined, schema or FeatureSchema())


@pytest.fixture(scope="session")
def small_matrix():
    """10 synthetic days, default schema; shared by model-level tests."""
    return synthetic_matrix()
