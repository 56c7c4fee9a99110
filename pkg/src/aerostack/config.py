"""JSON run configuration: feature schema, model parameters, stack layout,
backtest settings, and report threshold bands. Unknown keys are rejected
before any computation starts."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .backtest import BacktestConfig
from .ensemble import StackConfig
from .errors import ConfigError, MissingFileError
from .features import FeatureSchema
from .learners import KINDS, Params, RegressorSpec, default_params, params_from_json_dict

TOP_LEVEL_KEYS = ("features", "models", "stack", "backtest", "thresholds")
THRESHOLD_PARAMETERS = ("pm25", "pm10", "tvoc", "temp_c", "rh_pct", "sp_pa")

# artifact defaults, not regulatory claims; override via the config file
DEFAULT_THRESHOLDS = {
    "pm25": (12.0, 35.0),
    "pm10": (54.0, 154.0),
    "tvoc": (220.0, 660.0),
    "temp_c": (26.0, 30.0),
    "rh_pct": (60.0, 70.0),
    "sp_pa": (102000.0, 103500.0),
}
BAND_NAMES = ("good", "moderate", "poor")


@dataclass(frozen=True)
class ThresholdBands:
    """Two strictly increasing breakpoints per parameter define the
    good / moderate / poor bands."""

    breakpoints: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_THRESHOLDS)
    )

    def __post_init__(self):
        for name, points in self.breakpoints.items():
            if name not in THRESHOLD_PARAMETERS:
                raise ConfigError(
                    f"unknown threshold parameter {name!r}, expected one of {THRESHOLD_PARAMETERS}"
                )
            if len(points) != 2 or not points[0] < points[1]:
                raise ConfigError(
                    f"thresholds.{name} needs two strictly increasing breakpoints, got {points}"
                )

    def band(self, parameter: str, value: float) -> str:
        lo, hi = self.breakpoints[parameter]
        if value < lo:
            return "good"
        if value <= hi:
            return "moderate"
        return "poor"


@dataclass(frozen=True)
class RunConfig:
    features: FeatureSchema
    model_params: dict[str, Params]
    stack: StackConfig
    backtest: BacktestConfig
    thresholds: ThresholdBands

    def spec_for(self, kind: str) -> RegressorSpec:
        for spec in self.stack.base_specs + self.stack.meta_specs:
            if spec.kind == kind:
                return spec
        return RegressorSpec(kind, params=self.model_params[kind], seed=self.stack.seed)


def _check_keys(data: dict, allowed, context: str):
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")


def _build_stack(stack_raw: dict, model_params: dict, seed_override: Optional[int]) -> StackConfig:
    _check_keys(stack_raw, ("base", "meta", "oof_folds", "seed"), "stack config")
    seed = stack_raw.get("seed", 42)
    if seed_override is not None:
        seed = seed_override
    base_kinds = tuple(stack_raw.get("base", ("rf", "gbt", "svr")))
    meta_kinds = tuple(stack_raw.get("meta", ("rf", "glm")))
    for kind in base_kinds + meta_kinds:
        if kind not in KINDS:
            raise ConfigError(f"unknown learner kind {kind!r} in stack config")
    if not base_kinds or not meta_kinds:
        raise ConfigError("stack needs at least one base and one meta model")
    return StackConfig(
        base_specs=tuple(
            RegressorSpec(kind, params=model_params[kind], seed=seed + i)
            for i, kind in enumerate(base_kinds)
        ),
        meta_specs=tuple(
            RegressorSpec(kind, params=model_params[kind], seed=seed + 100 + i)
            for i, kind in enumerate(meta_kinds)
        ),
        oof_folds=int(stack_raw.get("oof_folds", 5)),
        seed=seed,
    )


def load_config(path: Optional[str] = None, seed_override: Optional[int] = None) -> RunConfig:
    """Read and validate a config file; ``path=None`` gives pure defaults.
    A seed override (the CLI --seed flag) replaces the stack seed."""
    raw = {}
    if path is not None:
        if not os.path.exists(path):
            raise MissingFileError(f"no such config file: {path}")
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"{path} must contain a JSON object")
    _check_keys(raw, TOP_LEVEL_KEYS, "config")

    features = FeatureSchema.from_json_dict(raw.get("features", {}))

    models_raw = raw.get("models", {})
    _check_keys(models_raw, KINDS, "models config")
    model_params = {
        kind: params_from_json_dict(kind, models_raw[kind]) if kind in models_raw
        else default_params(kind)
        for kind in KINDS
    }

    stack = _build_stack(raw.get("stack", {}), model_params, seed_override)

    backtest_raw = raw.get("backtest", {})
    _check_keys(
        backtest_raw, ("horizon_hours", "step_days", "test_fraction", "models"), "backtest config"
    )
    backtest_kwargs = dict(backtest_raw)
    if "models" in backtest_kwargs:
        backtest_kwargs["models"] = tuple(backtest_kwargs["models"])
    backtest = BacktestConfig(**backtest_kwargs)

    thresholds_raw = raw.get("thresholds", {})
    if not isinstance(thresholds_raw, dict):
        raise ConfigError("thresholds config must be an object")
    breakpoints = dict(DEFAULT_THRESHOLDS)
    for name, points in thresholds_raw.items():
        breakpoints[name] = tuple(float(v) for v in points)
    thresholds = ThresholdBands(breakpoints=breakpoints)

    return RunConfig(
        features=features,
        model_params=model_params,
        stack=stack,
        backtest=backtest,
        thresholds=thresholds,
    )
