"""Command-line entry point.

Subcommands: stats, backtest, correlate, importance, report, synth.
Exit codes: 0 success, 2 input/config error, 3 compute error. Diagnostics
go to stderr; results go to the requested output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import date, datetime, time, timezone

from . import learners, reporting
from .backtest import rolling_backtest
from .config import load_config
from .ensemble import fit_deml
from .errors import AerostackError, ConfigError, InputError
from .features import build_feature_matrix
from .importance import permutation_importance
from .records import (
    building_hourly_records,
    hourly_aggregate,
    join_hourly,
    parse_indoor_csv,
    parse_outdoor_csv,
    write_indoor_csv,
    write_outdoor_csv,
)
from .synth import BushfireEpisode, SynthConfig, generate

MODEL_CHOICES = ("rf", "gbt", "svr", "glm", "deml")


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _sensor_matrices(indoor_path, outdoor_path, schema):
    """Per-sensor feature matrices from the two CSVs, sorted by
    (building_id, sensor_id); sensors yielding no rows are skipped."""
    readings = parse_indoor_csv(indoor_path)
    if not readings:
        raise InputError(f"{indoor_path}: no data rows")
    observations = parse_outdoor_csv(outdoor_path) if outdoor_path else []

    by_sensor: dict[tuple[str, str], list] = {}
    for r in readings:
        by_sensor.setdefault((r.building_id, r.sensor_id), []).append(r)

    out = []
    for (building_id, sensor_id) in sorted(by_sensor):
        hourly = hourly_aggregate(by_sensor[(building_id, sensor_id)])
        joined = join_hourly(hourly, observations)
        matrix = build_feature_matrix(joined, schema)
        if matrix.n_rows == 0:
            _log(f"warning: sensor {sensor_id} in {building_id} yields no complete rows; skipped")
            continue
        out.append({"building_id": building_id, "sensor_id": sensor_id, "matrix": matrix})
    if not out:
        raise InputError("no sensor produced any usable feature rows")
    return out


def cmd_stats(args) -> int:
    readings = parse_indoor_csv(args.indoor)
    rows = reporting.build_stats_rows(readings)
    reporting.atomic_write_text(args.out, reporting.stats_csv(rows))
    _log(f"wrote {args.out} ({len(rows)} buildings)")
    return 0


def cmd_backtest(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    sensors = _sensor_matrices(args.indoor, args.outdoor, cfg.features)

    os.makedirs(args.out, exist_ok=True)
    sensor_objs = []
    sensor_reports = []
    for entry in sensors:
        report = rolling_backtest(entry["matrix"], cfg.stack, cfg.backtest)
        sensor_objs.append({
            "sensor_id": entry["sensor_id"],
            "building_id": entry["building_id"],
            "n_test_rows": report.n_test_rows,
            "models": report.to_json_obj(),
        })
        sensor_reports.append({**entry, "report": report})
        _log(f"sensor {entry['sensor_id']}: "
             + ", ".join(f"{m.model} rmse={m.rmse:.3f} r2={m.r2:.3f}" for m in report.models))

    json_path = os.path.join(args.out, "backtest.json")
    csv_path = os.path.join(args.out, "backtest.csv")
    reporting.atomic_write_text(
        json_path, json.dumps({"sensors": sensor_objs}, indent=2) + "\n"
    )
    reporting.atomic_write_text(
        csv_path, reporting.backtest_csv(sensor_reports, cfg.backtest.models)
    )
    _log(f"wrote {json_path} and {csv_path}")
    return 0


def cmd_correlate(args) -> int:
    readings = parse_indoor_csv(args.indoor)
    observations = parse_outdoor_csv(args.outdoor)
    records = building_hourly_records(readings, observations)
    rows, skipped = reporting.build_correlation_rows(records)
    for building_id in skipped:
        _log(f"warning: building {building_id} has no matched indoor/outdoor hours; omitted")
    reporting.atomic_write_text(args.out, reporting.correlation_csv(rows))
    _log(f"wrote {args.out} ({len(rows)} buildings)")
    return 0


def cmd_importance(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    sensors = _sensor_matrices(args.indoor, args.outdoor, cfg.features)
    if args.sensor is not None:
        sensors = [s for s in sensors if s["sensor_id"] == args.sensor]
        if not sensors:
            raise InputError(f"no sensor named {args.sensor!r} in {args.indoor}")
    entry = sensors[0]
    matrix = entry["matrix"]
    if len(sensors) > 1:
        _log(f"multiple sensors found; using {entry['sensor_id']} (pass --sensor to choose)")

    seed = args.seed if args.seed is not None else cfg.stack.seed
    if args.model == "deml":
        model = fit_deml(cfg.stack, matrix)
    else:
        model = learners.fit(cfg.spec_for(args.model), matrix)
    entries = permutation_importance(model, matrix, n_perm=args.n_perm, seed=seed)

    reporting.atomic_write_text(args.out, reporting.importance_csv(entries, top=args.top))
    _log(f"wrote {args.out}")
    if args.svg:
        title = f"{args.model} permutation importance (RMSE loss, {args.n_perm} permutations)"
        reporting.atomic_write_text(
            args.svg, reporting.importance_svg(entries, top=args.top, title=title)
        )
        _log(f"wrote {args.svg}")
    return 0


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise InputError(f"bad date {text!r}, expected YYYY-MM-DD") from None


def cmd_report(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    date_from = _parse_date(getattr(args, "from"))
    date_to = _parse_date(args.to)
    if date_to < date_from:
        raise InputError("--to must not precede --from")

    readings = parse_indoor_csv(args.indoor)
    observations = parse_outdoor_csv(args.outdoor) if args.outdoor else []
    records = building_hourly_records(readings, observations).get(args.building)
    if records is None:
        raise InputError(f"no building named {args.building!r} in {args.indoor}")

    start = datetime.combine(date_from, time(0, 0), tzinfo=timezone.utc)
    end = datetime.combine(date_to, time(23, 0), tzinfo=timezone.utc)
    selected = [rec for rec in records if start <= rec.timestamp <= end]

    html_text = reporting.building_report_html(
        args.building, selected, cfg.thresholds, date_from, date_to
    )
    reporting.atomic_write_text(args.out, html_text)
    _log(f"wrote {args.out} ({len(selected)} hours)")
    return 0


def _parse_bushfire(text: str) -> BushfireEpisode:
    try:
        start_day, length, spike = text.split(":")
        return BushfireEpisode(int(start_day), int(length), float(spike))
    except (ValueError, ConfigError) as exc:
        raise InputError(f"bad --bushfire {text!r}, expected START_DAY:LENGTH_DAYS:SPIKE ({exc})")


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        seed=args.seed if args.seed is not None else 42,
        n_days=args.days,
        outdoor_coupling=args.coupling,
        diurnal_amplitude=args.diurnal_amplitude,
        ar_coefficient=args.ar_coefficient,
        noise_sd=args.noise_sd,
        bushfire=_parse_bushfire(args.bushfire) if args.bushfire else None,
    )
    readings, observations = generate(cfg)
    os.makedirs(args.out, exist_ok=True)
    indoor_path = os.path.join(args.out, "indoor.csv")
    outdoor_path = os.path.join(args.out, "outdoor.csv")
    write_indoor_csv(indoor_path, readings)
    write_outdoor_csv(outdoor_path, observations)
    _log(f"wrote {indoor_path} and {outdoor_path} ({cfg.n_days} days)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aerostack",
        description="Indoor PM2.5 forecasting, backtesting, and reporting toolkit.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration file")
    common.add_argument("--seed", type=int, help="override the configured seed")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common],
                       help="Table-1-style descriptive statistics per building")
    p.add_argument("--indoor", required=True, help="indoor sensor CSV")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("backtest", parents=[common],
                       help="rolling-window forecast benchmark (JSON + CSV)")
    p.add_argument("--indoor", required=True)
    p.add_argument("--outdoor", help="outdoor CSV (required by the default feature schema)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("correlate", parents=[common],
                       help="indoor/outdoor Spearman correlation per building")
    p.add_argument("--indoor", required=True)
    p.add_argument("--outdoor", required=True)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("importance", parents=[common],
                       help="permutation feature importance (CSV, optional SVG)")
    p.add_argument("--indoor", required=True)
    p.add_argument("--outdoor", help="outdoor CSV (required by the default feature schema)")
    p.add_argument("--model", required=True, choices=MODEL_CHOICES)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--svg", help="optional bar-chart SVG path")
    p.add_argument("--n-perm", type=int, default=10, dest="n_perm")
    p.add_argument("--top", type=int, default=15, help="rows to render")
    p.add_argument("--sensor", help="sensor to analyze (default: first)")
    p.set_defaults(func=cmd_importance)

    p = sub.add_parser("report", parents=[common],
                       help="color-coded HTML report for one building")
    p.add_argument("--indoor", required=True)
    p.add_argument("--outdoor", help="optional outdoor CSV to include sp_pa")
    p.add_argument("--building", required=True)
    p.add_argument("--from", required=True, help="start date YYYY-MM-DD (UTC)")
    p.add_argument("--to", required=True, help="end date YYYY-MM-DD (UTC)")
    p.add_argument("--out", required=True, help="output HTML path")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", parents=[common],
                       help="generate the synthetic indoor/outdoor dataset")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--days", type=int, default=60)
    p.add_argument("--coupling", type=float, default=0.6)
    p.add_argument("--diurnal-amplitude", type=float, default=2.0, dest="diurnal_amplitude")
    p.add_argument("--ar-coefficient", type=float, default=0.8, dest="ar_coefficient")
    p.add_argument("--noise-sd", type=float, default=0.5, dest="noise_sd")
    p.add_argument("--bushfire", help="episode as START_DAY:LENGTH_DAYS:SPIKE")
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _log(f"error: {exc}")
        return 2
    except AerostackError as exc:
        _log(f"compute error: {exc}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
