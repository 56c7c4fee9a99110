"""Expanding rolling-window backtest.

The test partition is the last ceil(test_fraction * distinct_days) UTC
calendar days. Fixed-width forecast windows advance day by day from the
first test timestamp; each configured model refits on everything strictly
before the window start (so already-predicted windows rejoin the training
data) and predicts the window's rows. Metrics are pooled over the
concatenation of all window predictions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Mapping, Optional

import numpy as np

from . import learners
from .ensemble import StackConfig, fit_deml
from .errors import ComputeError, ConfigError, EmptyTestError, InputError
from .features import FeatureMatrix
from .learners import RegressorSpec
from .metrics import r_squared, rmse
from .records import format_timestamp

EVALUATABLE_MODELS = ("rf", "gbt", "svr", "glm", "deml")
DEFAULT_MODELS = ("rf", "gbt", "svr", "deml")


@dataclass(frozen=True)
class BacktestConfig:
    horizon_hours: int = 24
    step_days: int = 1
    test_fraction: float = 0.10
    models: tuple[str, ...] = DEFAULT_MODELS

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if self.horizon_hours < 1:
            raise ConfigError("backtest.horizon_hours must be >= 1")
        if self.step_days < 1:
            raise ConfigError("backtest.step_days must be >= 1")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError("backtest.test_fraction must be in (0, 1)")
        if not self.models:
            raise ConfigError("backtest.models must not be empty")
        unknown = [m for m in self.models if m not in EVALUATABLE_MODELS]
        if unknown:
            raise ConfigError(f"unknown backtest models {unknown}, expected {EVALUATABLE_MODELS}")


@dataclass(frozen=True)
class WindowPrediction:
    start: datetime
    row_indices: np.ndarray
    pred: np.ndarray
    obs: np.ndarray


@dataclass(frozen=True)
class ModelReport:
    model: str
    windows: tuple[WindowPrediction, ...]
    rmse: float
    r2: float

    def pooled(self) -> tuple[np.ndarray, np.ndarray]:
        pred = np.concatenate([w.pred for w in self.windows])
        obs = np.concatenate([w.obs for w in self.windows])
        return pred, obs


@dataclass(frozen=True)
class BacktestReport:
    models: tuple[ModelReport, ...]
    n_test_rows: int
    window_starts: tuple[datetime, ...]

    def model(self, name: str) -> ModelReport:
        for m in self.models:
            if m.model == name:
                return m
        raise KeyError(name)

    def to_json_obj(self) -> list[dict]:
        return [
            {
                "model": m.model,
                "windows": [
                    {
                        "start": format_timestamp(w.start),
                        "pred": [float(v) for v in w.pred],
                        "obs": [float(v) for v in w.obs],
                    }
                    for w in m.windows
                ],
                "rmse": m.rmse,
                "r2": m.r2,
            }
            for m in self.models
        ]


def first_test_row(timestamps, test_fraction: float) -> int:
    """Index of the first test row: rows on the last
    ceil(test_fraction * distinct_days) calendar days."""
    days = sorted({ts.date() for ts in timestamps})
    n_test_days = math.ceil(test_fraction * len(days))
    cutoff = days[len(days) - n_test_days]
    for i, ts in enumerate(timestamps):
        if ts.date() >= cutoff:
            return i
    raise EmptyTestError("no rows fall in the test day range")


def _spec_for_kind(kind: str, stack: StackConfig) -> RegressorSpec:
    for spec in stack.base_specs:
        if spec.kind == kind:
            return spec
    return RegressorSpec(kind, seed=stack.seed)


def rolling_backtest(
    data: FeatureMatrix,
    stack: StackConfig,
    cfg: BacktestConfig,
    model_fitters: Optional[Mapping[str, Callable]] = None,
) -> BacktestReport:
    """Evaluate every configured model over the expanding-window scheme.

    ``model_fitters`` may map a model name to ``fit(train) -> predictor``
    to splice in reference models for verification.
    """
    n = data.n_rows
    if n == 0:
        raise EmptyTestError("empty feature matrix")
    first_test = first_test_row(data.timestamps, cfg.test_fraction)
    if first_test == 0:
        raise InputError("test split leaves no training rows")

    fitters: dict[str, Callable] = {}
    for name in cfg.models:
        if model_fitters is not None and name in model_fitters:
            fitters[name] = model_fitters[name]
        elif name == "deml":
            fitters[name] = lambda train: fit_deml(stack, train)
        else:
            spec = _spec_for_kind(name, stack)
            fitters[name] = lambda train, s=spec: learners.fit(s, train)

    seconds = np.array([ts.timestamp() for ts in data.timestamps])
    t0 = data.timestamps[first_test]
    horizon = timedelta(hours=cfg.horizon_hours)
    step = timedelta(days=cfg.step_days)
    last = data.timestamps[-1]

    window_spans = []
    start = t0
    while start <= last:
        lo = int(np.searchsorted(seconds, start.timestamp(), side="left"))
        hi = int(np.searchsorted(seconds, (start + horizon).timestamp(), side="left"))
        if hi > lo:
            window_spans.append((start, lo, hi))
        start = start + step

    if not window_spans:
        raise EmptyTestError("no test rows fall inside any forecast window")

    predicted_rows = np.concatenate([np.arange(lo, hi) for _, lo, hi in window_spans])
    if cfg.horizon_hours == 24 * cfg.step_days:
        expected = np.arange(first_test, n)
        if not np.array_equal(np.sort(predicted_rows), expected):
            raise ComputeError("window bookkeeping failed to cover each test row exactly once")

    windows_by_model: dict[str, list[WindowPrediction]] = {name: [] for name in cfg.models}
    for start, lo, hi in window_spans:
        train = data.take_rows(np.arange(0, lo))
        window = data.take_rows(np.arange(lo, hi))
        for name in cfg.models:
            model = fitters[name](train)
            pred = np.asarray(model.predict(window), dtype=np.float64)
            windows_by_model[name].append(WindowPrediction(
                start=start,
                row_indices=np.arange(lo, hi),
                pred=pred,
                obs=window.y.copy(),
            ))

    reports = []
    for name in cfg.models:
        windows = windows_by_model[name]
        pooled_pred = np.concatenate([w.pred for w in windows])
        pooled_obs = np.concatenate([w.obs for w in windows])
        reports.append(ModelReport(
            model=name,
            windows=tuple(windows),
            rmse=rmse(pooled_pred, pooled_obs),
            r2=r_squared(pooled_pred, pooled_obs),
        ))

    return BacktestReport(
        models=tuple(reports),
        n_test_rows=int(n - first_test),
        window_starts=tuple(s for s, _, _ in window_spans),
    )
