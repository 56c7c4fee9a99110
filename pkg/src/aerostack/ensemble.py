"""Three-stage stacked ensemble.

Stage 1 fits the base regressors and collects leakage-free out-of-fold
(OOF) predictions over contiguous time blocks; stage 2 fits meta
regressors whose only features are those base predictions; stage 3 solves
a nonnegative least squares problem on the meta models' own OOF
predictions to weight them. The final prediction is the plain weighted sum
of meta outputs, with no intercept and no renormalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, Optional, Sequence

import numpy as np

from . import learners
from .errors import ConfigError, LeakageError, TooFewRowsError, UnknownColumnError
from .features import FeatureMatrix
from .learners import RegressorSpec
from .nnls import nnls

DEFAULT_BASE_KINDS = ("rf", "gbt", "svr")
DEFAULT_META_KINDS = ("rf", "glm")


@dataclass(frozen=True)
class ArrayMatrix:
    """Named numeric columns with the same row protocol as FeatureMatrix;
    used for stacking stages whose features are model predictions."""

    names: tuple[str, ...]
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
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "timestamps", tuple(self.timestamps))

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.names

    def column_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownColumnError(f"no column named {name!r}") from None

    def take_rows(self, indices) -> "ArrayMatrix":
        indices = np.asarray(indices)
        return ArrayMatrix(
            names=self.names,
            X=self.X[indices],
            timestamps=tuple(self.timestamps[i] for i in indices),
            y=self.y[indices],
        )

    def with_X(self, X: np.ndarray) -> "ArrayMatrix":
        return ArrayMatrix(names=self.names, X=X, timestamps=self.timestamps, y=self.y)


@dataclass(frozen=True)
class StackConfig:
    base_specs: tuple[RegressorSpec, ...] = ()
    meta_specs: tuple[RegressorSpec, ...] = ()
    oof_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not self.base_specs:
            object.__setattr__(self, "base_specs", tuple(
                RegressorSpec(kind, seed=self.seed + i)
                for i, kind in enumerate(DEFAULT_BASE_KINDS)
            ))
        if not self.meta_specs:
            object.__setattr__(self, "meta_specs", tuple(
                RegressorSpec(kind, seed=self.seed + 100 + i)
                for i, kind in enumerate(DEFAULT_META_KINDS)
            ))
        object.__setattr__(self, "base_specs", tuple(self.base_specs))
        object.__setattr__(self, "meta_specs", tuple(self.meta_specs))
        if self.oof_folds < 2:
            raise ConfigError("stack.oof_folds must be >= 2")


def block_partition(n_rows: int, folds: int) -> list[np.ndarray]:
    """Split row indices 0..n-1 into contiguous near-equal blocks;
    earlier blocks take the remainder."""
    if folds < 2:
        raise ConfigError("need at least 2 folds")
    if n_rows < folds:
        raise TooFewRowsError(f"{n_rows} rows cannot form {folds} folds")
    base, rem = divmod(n_rows, folds)
    blocks = []
    start = 0
    for i in range(folds):
        size = base + (1 if i < rem else 0)
        blocks.append(np.arange(start, start + size))
        start += size
    return blocks


@dataclass(frozen=True)
class OofColumn:
    predictions: np.ndarray
    fold_of_row: np.ndarray
    train_rows: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class OofMatrix:
    """Out-of-fold base predictions aligned to training rows, plus the
    bookkeeping proving which rows each fold's model was trained on."""

    column_names: tuple[str, ...]
    predictions: np.ndarray
    fold_of_row: np.ndarray
    train_rows: tuple[np.ndarray, ...]


def verify_no_leakage(fold_of_row: np.ndarray, train_rows: Sequence[np.ndarray]) -> None:
    """Raise LeakageError unless every row is absent from its own fold's
    training set."""
    for fold, rows in enumerate(train_rows):
        own = np.flatnonzero(fold_of_row == fold)
        overlap = np.intersect1d(own, rows)
        if overlap.size:
            raise LeakageError(
                f"fold {fold} was trained on its own rows {overlap[:5].tolist()}"
            )


def _oof_column(fit_fn, matrix, blocks) -> OofColumn:
    n = matrix.n_rows
    predictions = np.empty(n)
    fold_of_row = np.empty(n, dtype=np.int64)
    train_rows = []
    for fold, block in enumerate(blocks):
        rest = np.concatenate([b for j, b in enumerate(blocks) if j != fold])
        model = fit_fn(matrix.take_rows(rest))
        predictions[block] = model.predict(matrix.take_rows(block))
        fold_of_row[block] = fold
        train_rows.append(rest)
    return OofColumn(predictions, fold_of_row, tuple(train_rows))


def oof_predictions(spec: RegressorSpec, matrix: FeatureMatrix, folds: int) -> OofColumn:
    """Out-of-fold predictions for one spec over contiguous time blocks."""
    blocks = block_partition(matrix.n_rows, folds)
    column = _oof_column(lambda m: learners.fit(spec, m), matrix, blocks)
    verify_no_leakage(column.fold_of_row, column.train_rows)
    return column


@dataclass(frozen=True)
class DemlModel:
    """Fitted three-stage stack: full-data base models, meta models trained
    on OOF base predictions, and the nonnegative meta weight vector."""

    config: StackConfig
    base_names: tuple[str, ...]
    base_models: tuple
    meta_names: tuple[str, ...]
    meta_models: tuple
    weights: np.ndarray
    oof: OofMatrix = field(repr=False)

    def predict(self, matrix) -> np.ndarray:
        base_preds = np.column_stack([m.predict(matrix) for m in self.base_models])
        meta_in = ArrayMatrix(
            names=self.base_names,
            X=base_preds,
            timestamps=matrix.timestamps,
            y=np.zeros(matrix.n_rows),
        )
        meta_preds = np.column_stack([m.predict(meta_in) for m in self.meta_models])
        return meta_preds @ self.weights


def fit_deml(
    config: StackConfig,
    matrix: FeatureMatrix,
    fit_fn: Optional[Callable] = None,
) -> DemlModel:
    """Fit the full stack on one training matrix.

    ``fit_fn(spec, matrix) -> model`` overrides the learner factory (used
    by tests to splice in reference learners); the default is learners.fit.
    """
    if fit_fn is None:
        fit_fn = learners.fit
    n = matrix.n_rows
    if n < 2 * config.oof_folds:
        raise TooFewRowsError(
            f"need at least {2 * config.oof_folds} rows for {config.oof_folds} folds, got {n}"
        )
    blocks = block_partition(n, config.oof_folds)

    base_names = tuple(
        f"base{i}_{spec.kind}" for i, spec in enumerate(config.base_specs)
    )
    base_columns = [
        _oof_column(lambda m, s=spec: fit_fn(s, m), matrix, blocks)
        for spec in config.base_specs
    ]
    oof = OofMatrix(
        column_names=base_names,
        predictions=np.column_stack([c.predictions for c in base_columns]),
        fold_of_row=base_columns[0].fold_of_row,
        train_rows=base_columns[0].train_rows,
    )
    for column in base_columns:
        verify_no_leakage(column.fold_of_row, column.train_rows)

    base_models = tuple(fit_fn(spec, matrix) for spec in config.base_specs)

    meta_matrix = ArrayMatrix(
        names=base_names, X=oof.predictions, timestamps=matrix.timestamps, y=matrix.y
    )
    meta_names = tuple(
        f"meta{i}_{spec.kind}" for i, spec in enumerate(config.meta_specs)
    )
    meta_models = tuple(fit_fn(spec, meta_matrix) for spec in config.meta_specs)

    meta_columns = [
        _oof_column(lambda m, s=spec: fit_fn(s, m), meta_matrix, blocks)
        for spec in config.meta_specs
    ]
    for column in meta_columns:
        verify_no_leakage(column.fold_of_row, column.train_rows)
    meta_oof = np.column_stack([c.predictions for c in meta_columns])

    weights = nnls(meta_oof, matrix.y)
    return DemlModel(
        config=config,
        base_names=base_names,
        base_models=base_models,
        meta_names=meta_names,
        meta_models=meta_models,
        weights=weights,
        oof=oof,
    )


def predict_deml(model: DemlModel, matrix) -> np.ndarray:
    return model.predict(matrix)
