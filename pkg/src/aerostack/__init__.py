"""aerostack: hourly indoor PM2.5 forecasting with a three-stage stacked
ensemble, expanding rolling-window backtests, indoor/outdoor correlation,
and permutation-importance analysis."""

from .backtest import BacktestConfig, BacktestReport, rolling_backtest
from .ensemble import (
    DemlModel,
    OofMatrix,
    StackConfig,
    fit_deml,
    oof_predictions,
    predict_deml,
)
from .errors import AerostackError
from .features import (
    FeatureMatrix,
    FeatureSchema,
    Standardizer,
    apply_standardizer,
    build_feature_matrix,
    fit_standardizer,
    invert_standardizer,
)
from .importance import ImportanceEntry, permutation_importance
from .learners import (
    FittedRegressor,
    GbtParams,
    GlmParams,
    RegressorSpec,
    RfParams,
    SvrParams,
    fit,
    predict,
)
from .metrics import r_squared, rmse, spearman
from .nnls import nnls
from .records import (
    HourlyRecord,
    OutdoorObservation,
    SensorReading,
    SummaryStats,
    hourly_aggregate,
    join_hourly,
    parse_indoor_csv,
    parse_outdoor_csv,
    summary_stats,
)
from .smoothing import loess_smooth
from .synth import BushfireEpisode, SynthConfig, generate

__version__ = "0.1.0"

__all__ = [
    "AerostackError",
    "BacktestConfig",
    "BacktestReport",
    "BushfireEpisode",
    "DemlModel",
    "FeatureMatrix",
    "FeatureSchema",
    "FittedRegressor",
    "GbtParams",
    "GlmParams",
    "HourlyRecord",
    "ImportanceEntry",
    "OofMatrix",
    "OutdoorObservation",
    "RegressorSpec",
    "RfParams",
    "SensorReading",
    "StackConfig",
    "Standardizer",
    "SummaryStats",
    "SvrParams",
    "apply_standardizer",
    "build_feature_matrix",
    "fit",
    "fit_deml",
    "fit_standardizer",
    "generate",
    "hourly_aggregate",
    "invert_standardizer",
    "join_hourly",
    "loess_smooth",
    "nnls",
    "oof_predictions",
    "parse_indoor_csv",
    "parse_outdoor_csv",
    "permutation_importance",
    "predict",
    "predict_deml",
    "r_squared",
    "rmse",
    "rolling_backtest",
    "spearman",
    "summary_stats",
]
