"""Four regressors behind one fit/predict contract: random forest,
gradient-boosted trees, linear epsilon-insensitive SVR, and ridge GLM.

Fitting is deterministic given (spec, data): tree learners use per-tree
seeded PRNG streams and the linear learners are seed-free closed-form or
deterministic coordinate descent. Fitted models are immutable and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional, Union

import numpy as np

from ..errors import ConfigError, EmptyInputError, NonFiniteError, SchemaMismatchError
from ..features import FeatureMatrix
from .boosting import fit_boosted_trees
from .forest import fit_forest
from .glm import fit_glm
from .svr import fit_svr

KINDS = ("rf", "gbt", "svr", "glm")


@dataclass(frozen=True)
class RfParams:
    n_trees: int = 100
    mtry: Optional[int] = None  # None -> ceil(p / 3) at fit time
    min_leaf: int = 2
    max_depth: Optional[int] = None  # None -> unlimited
    bootstrap: bool = True

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError("rf.n_trees must be >= 1")
        if self.mtry is not None and self.mtry < 1:
            raise ConfigError("rf.mtry must be >= 1")
        if self.min_leaf < 1:
            raise ConfigError("rf.min_leaf must be >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ConfigError("rf.max_depth must be >= 0")


@dataclass(frozen=True)
class GbtParams:
    n_rounds: int = 200
    learning_rate: float = 0.05
    max_depth: int = 3
    min_leaf: int = 5
    l2_leaf: float = 1.0

    def __post_init__(self):
        if self.n_rounds < 0:
            raise ConfigError("gbt.n_rounds must be >= 0")
        if self.learning_rate < 0:
            raise ConfigError("gbt.learning_rate must be >= 0")
        if self.max_depth < 0:
            raise ConfigError("gbt.max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ConfigError("gbt.min_leaf must be >= 1")
        if self.l2_leaf < 0:
            raise ConfigError("gbt.l2_leaf must be >= 0")


@dataclass(frozen=True)
class SvrParams:
    c: float = 1.0
    epsilon: float = 0.1
    max_epochs: int = 500
    tol: float = 1e-5

    def __post_init__(self):
        if self.c <= 0:
            raise ConfigError("svr.c must be > 0")
        if self.epsilon < 0:
            raise ConfigError("svr.epsilon must be >= 0")
        if self.max_epochs < 1:
            raise ConfigError("svr.max_epochs must be >= 1")
        if self.tol <= 0:
            raise ConfigError("svr.tol must be > 0")


@dataclass(frozen=True)
class GlmParams:
    ridge_lambda: float = 1e-6

    def __post_init__(self):
        if self.ridge_lambda < 0:
            raise ConfigError("glm.ridge_lambda must be >= 0")


Params = Union[RfParams, GbtParams, SvrParams, GlmParams]

_PARAM_TYPES = {"rf": RfParams, "gbt": GbtParams, "svr": SvrParams, "glm": GlmParams}
_FITTERS = {"rf": fit_forest, "gbt": fit_boosted_trees, "svr": fit_svr, "glm": fit_glm}


def default_params(kind: str) -> Params:
    if kind not in _PARAM_TYPES:
        raise ConfigError(f"unknown model kind {kind!r}, expected one of {KINDS}")
    return _PARAM_TYPES[kind]()


def params_from_json_dict(kind: str, data: dict) -> Params:
    cls = _PARAM_TYPES.get(kind)
    if cls is None:
        raise ConfigError(f"unknown model kind {kind!r}, expected one of {KINDS}")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in models.{kind} config: {sorted(unknown)}")
    return cls(**data)


@dataclass(frozen=True)
class RegressorSpec:
    kind: str
    params: Optional[Params] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}, expected one of {KINDS}")
        if self.params is None:
            object.__setattr__(self, "params", default_params(self.kind))
        elif not isinstance(self.params, _PARAM_TYPES[self.kind]):
            raise ConfigError(
                f"params of type {type(self.params).__name__} do not match kind {self.kind!r}"
            )


@dataclass(frozen=True)
class FittedRegressor:
    """A trained model plus the metadata needed to apply it safely."""

    kind: str
    feature_names: tuple[str, ...]
    y_min: float
    y_max: float
    inner: object = field(repr=False)

    def predict(self, matrix: FeatureMatrix) -> np.ndarray:
        if tuple(matrix.feature_names) != self.feature_names:
            raise SchemaMismatchError(
                f"matrix schema {matrix.feature_names} does not match the "
                f"training schema {self.feature_names}"
            )
        out = self.inner.predict_array(matrix.X)
        if not np.all(np.isfinite(out)):
            raise NonFiniteError(f"{self.kind} produced non-finite predictions")
        return out


def fit(spec: RegressorSpec, matrix: FeatureMatrix) -> FittedRegressor:
    if matrix.n_rows == 0:
        raise EmptyInputError("cannot fit on an empty feature matrix")
    if not np.all(np.isfinite(matrix.X)) or not np.all(np.isfinite(matrix.y)):
        raise NonFiniteError("training data contains non-finite values")
    inner = _FITTERS[spec.kind](spec.params, matrix.X, matrix.y, spec.seed)
    return FittedRegressor(
        kind=spec.kind,
        feature_names=tuple(matrix.feature_names),
        y_min=float(matrix.y.min()),
        y_max=float(matrix.y.max()),
        inner=inner,
    )


def predict(model: FittedRegressor, matrix: FeatureMatrix) -> np.ndarray:
    return model.predict(matrix)


def params_to_json_dict(params: Params) -> dict:
    return asdict(params)
