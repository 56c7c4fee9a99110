"""Deterministic synthetic indoor/outdoor air-quality dataset.

Outdoor PM2.5 is a diurnal sine plus an AR(1) process around a fixed
baseline, optionally with a bushfire spike; indoor PM2.5 mixes an
independent indoor AR(1) with the previous hour's outdoor value through a
coupling factor, so the lag features and the outdoor covariate carry real
signal. Every series is seeded; identical configs produce byte-identical
CSV files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Optional

import numpy as np

from .errors import ConfigError
from .records import OutdoorObservation, SensorReading

START_TIME = datetime(2020, 1, 1, tzinfo=timezone.utc)
BUILDING_ID = "B001"
SENSOR_ID = "S001"
LAT, LON = -37.8136, 144.9631
OUTDOOR_BASELINE = 5.0
INDOOR_BASELINE = 2.0


@dataclass(frozen=True)
class BushfireEpisode:
    start_day: int
    length_days: int
    outdoor_spike: float

    def __post_init__(self):
        if self.start_day < 0 or self.length_days < 1 or self.outdoor_spike <= 0:
            raise ConfigError(f"invalid bushfire episode {self}")


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 0
    n_days: int = 60
    outdoor_coupling: float = 0.6
    diurnal_amplitude: float = 2.0
    ar_coefficient: float = 0.8
    noise_sd: float = 0.5
    bushfire: Optional[BushfireEpisode] = None

    def __post_init__(self):
        if self.n_days < 2:
            raise ConfigError("synth.n_days must be >= 2")
        if not 0.0 <= self.outdoor_coupling <= 1.0:
            raise ConfigError("synth.outdoor_coupling must be in [0, 1]")
        if not abs(self.ar_coefficient) < 1.0:
            raise ConfigError("synth.ar_coefficient must satisfy |phi| < 1")
        if self.noise_sd < 0.0:
            raise ConfigError("synth.noise_sd must be >= 0")
        if self.diurnal_amplitude < 0.0:
            raise ConfigError("synth.diurnal_amplitude must be >= 0")


def _ar1(rng, n, phi, sd):
    noise = rng.normal(0.0, sd, n)
    series = np.empty(n)
    series[0] = noise[0]
    for t in range(1, n):
        series[t] = phi * series[t - 1] + noise[t]
    return series


def generate(cfg: SynthConfig) -> tuple[list[SensorReading], list[OutdoorObservation]]:
    """Build one building's hourly indoor readings and outdoor covariates."""
    n = cfg.n_days * 24
    streams = np.random.SeedSequence(cfg.seed).spawn(8)
    rng_out, rng_base, rng_mix, rng_pm10, rng_tvoc, rng_climate, rng_wx, rng_rain = (
        np.random.default_rng(s) for s in streams
    )

    hours = np.arange(n)
    hour_of_day = hours % 24
    day = hours // 24

    diurnal = cfg.diurnal_amplitude * np.sin(2.0 * math.pi * (hour_of_day - 6) / 24.0)
    outdoor = OUTDOOR_BASELINE + diurnal + _ar1(rng_out, n, cfg.ar_coefficient, cfg.noise_sd)
    if cfg.bushfire is not None:
        span = (day >= cfg.bushfire.start_day) & (
            day < cfg.bushfire.start_day + cfg.bushfire.length_days
        )
        outdoor = outdoor + np.where(span, cfg.bushfire.outdoor_spike, 0.0)
    outdoor = np.maximum(outdoor, 0.0)

    indoor_base = INDOOR_BASELINE + _ar1(rng_base, n, cfg.ar_coefficient, cfg.noise_sd)
    outdoor_prev = np.concatenate([[outdoor[0]], outdoor[:-1]])
    alpha = cfg.outdoor_coupling
    pm25 = np.maximum(
        (1.0 - alpha) * indoor_base + alpha * outdoor_prev + rng_mix.normal(0.0, cfg.noise_sd, n),
        0.0,
    )
    pm10 = np.maximum(1.6 * pm25 + rng_pm10.normal(0.0, cfg.noise_sd, n), 0.0)
    tvoc = np.maximum(
        120.0 + 30.0 * np.sin(2.0 * math.pi * (hour_of_day - 9) / 24.0)
        + rng_tvoc.normal(0.0, 8.0, n),
        0.0,
    )
    temp_c = 22.0 + 1.5 * np.sin(2.0 * math.pi * (hour_of_day - 15) / 24.0) \
        + rng_climate.normal(0.0, 0.3, n)
    rh_pct = np.clip(
        45.0 + 8.0 * np.sin(2.0 * math.pi * (hour_of_day - 4) / 24.0)
        + rng_climate.normal(0.0, 2.0, n),
        0.0, 100.0,
    )

    t2m = 15.0 + 7.0 * np.sin(2.0 * math.pi * (hour_of_day - 14) / 24.0) \
        + 3.0 * np.sin(2.0 * math.pi * day / 365.0) + rng_wx.normal(0.0, 0.8, n)
    d2m = t2m - 4.0 + rng_wx.normal(0.0, 0.5, n)
    wind = np.maximum(3.0 + rng_wx.normal(0.0, 1.2, n), 0.0)
    sp = 101325.0 + 400.0 * np.sin(2.0 * math.pi * day / 14.0) + rng_wx.normal(0.0, 60.0, n)
    daylight = np.sin(math.pi * (hour_of_day - 6) / 12.0)
    ssrd = np.where(
        (hour_of_day >= 6) & (hour_of_day <= 18),
        np.maximum(800.0 * daylight + rng_wx.normal(0.0, 15.0, n), 0.0),
        0.0,
    )
    rain = np.maximum(rng_rain.normal(0.0, 0.4, n) - 0.5, 0.0)

    readings = []
    observations = []
    for t in range(n):
        ts = START_TIME + timedelta(hours=int(t))
        readings.append(SensorReading(
            timestamp=ts, sensor_id=SENSOR_ID, building_id=BUILDING_ID,
            lat=LAT, lon=LON,
            pm25=float(pm25[t]), pm10=float(pm10[t]), tvoc=float(tvoc[t]),
            temp_c=float(temp_c[t]), rh_pct=float(rh_pct[t]),
        ))
        observations.append(OutdoorObservation(
            timestamp=ts, building_id=BUILDING_ID,
            pm25_out=float(outdoor[t]), t2m_c=float(t2m[t]), d2m_c=float(d2m[t]),
            wind10m_ms=float(wind[t]), sp_pa=float(sp[t]),
            ssrd_wm2=float(ssrd[t]), tp_mm=float(rain[t]),
        ))
    return readings, observations
