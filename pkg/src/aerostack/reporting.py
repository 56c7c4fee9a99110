"""Rendered outputs: descriptive-statistics and benchmark tables,
correlation tables, importance charts, and the color-coded HTML report.

All writers are atomic (temp file + rename) and deterministic for a given
input, so repeated runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import html
import io
import os
import tempfile
from dataclasses import dataclass
from datetime import datetime
from typing import Optional, Sequence

import numpy as np

from .config import ThresholdBands
from .errors import EmptyInputError
from .importance import ImportanceEntry
from .metrics import spearman
from .records import (
    HourlyRecord,
    SensorReading,
    format_timestamp,
    hourly_aggregate,
    summary_stats,
)
from .smoothing import loess_smooth

REPORT_PARAMETERS = ("pm25", "pm10", "tvoc", "temp_c", "rh_pct", "sp_pa")
PARAMETER_LABELS = {
    "pm25": "PM2.5 (ug/m3)",
    "pm10": "PM10 (ug/m3)",
    "tvoc": "TVOC (ppb)",
    "temp_c": "Temperature (C)",
    "rh_pct": "Relative humidity (%)",
    "sp_pa": "Surface pressure (Pa)",
}


def atomic_write_text(path, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".aerostack-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


# --- descriptive statistics table (per building) ----------------------------

def group_readings_by_building(readings: Sequence[SensorReading]):
    groups: dict[str, list[SensorReading]] = {}
    for r in readings:
        groups.setdefault(r.building_id, []).append(r)
    return dict(sorted(groups.items()))


def build_stats_rows(readings: Sequence[SensorReading]) -> list[dict]:
    """One row per building: time span, sensor count, study days/hours, and
    the distribution of hourly-mean PM2.5 pooled over the sensors."""
    if not readings:
        raise EmptyInputError("no readings to summarize")
    rows = []
    for building_id, group in group_readings_by_building(readings).items():
        by_sensor: dict[str, list[SensorReading]] = {}
        for r in group:
            by_sensor.setdefault(r.sensor_id, []).append(r)
        hourly_pm25 = []
        study_hours = 0
        for sensor_readings in by_sensor.values():
            hourly = hourly_aggregate(sensor_readings)
            study_hours += len(hourly)
            hourly_pm25.extend(rec.pm25 for rec in hourly if rec.pm25 is not None)
        start = min(r.timestamp for r in group)
        end = max(r.timestamp for r in group)
        stats = summary_stats(hourly_pm25)
        rows.append({
            "building_id": building_id,
            "start_time": format_timestamp(start),
            "end_time": format_timestamp(end),
            "sensors": len(by_sensor),
            "study_days": (end.date() - start.date()).days + 1,
            "study_hours": study_hours,
            "stats": stats,
        })
    return rows


def stats_csv(rows: Sequence[dict]) -> str:
    header = ["building_id", "start_time", "end_time", "sensors", "study_days",
              "study_hours", "min", "max", "median", "iqr", "mean", "sd"]
    data = [
        [
            row["building_id"], row["start_time"], row["end_time"],
            row["sensors"], row["study_days"], row["study_hours"],
            f"{row['stats'].min:.2f}", f"{row['stats'].max:.2f}",
            f"{row['stats'].median:.2f}", f"{row['stats'].iqr:.2f}",
            f"{row['stats'].mean:.2f}", f"{row['stats'].sd:.2f}",
        ]
        for row in rows
    ]
    return _csv_text(header, data)


# --- benchmark table ---------------------------------------------------------

def backtest_csv(sensor_reports: Sequence[dict], model_names: Sequence[str]) -> str:
    """Per-sensor R2/RMSE columns for every evaluated model, with a marker
    where the stacked model has strictly the lowest RMSE."""
    header = ["building_id", "sensor_id", "test_hours"]
    for name in model_names:
        header += [f"{name}_r2", f"{name}_rmse"]
    header.append("deml_best")

    data = []
    for entry in sensor_reports:
        report = entry["report"]
        by_name = {m.model: m for m in report.models}
        row = [entry["building_id"], entry["sensor_id"], report.n_test_rows]
        for name in model_names:
            m = by_name[name]
            row += [f"{m.r2:.3f}", f"{m.rmse:.3f}"]
        marker = ""
        if "deml" in by_name:
            deml_rmse = by_name["deml"].rmse
            others = [m.rmse for name, m in by_name.items() if name != "deml"]
            if others and all(deml_rmse < r for r in others):
                marker = "*"
        row.append(marker)
        data.append(row)
    return _csv_text(header, data)


# --- indoor/outdoor correlation table ---------------------------------------

@dataclass(frozen=True)
class CorrelationRow:
    building_id: str
    start_time: datetime
    end_time: datetime
    n_hours: int
    indoor_mean: float
    indoor_sd: float
    outdoor_mean: float
    outdoor_sd: float
    spearman_r: float


def build_correlation_rows(records_by_building: dict[str, list[HourlyRecord]]):
    """Per building: moments of matched indoor/outdoor hours plus their
    Spearman correlation. Buildings with no matched hours are skipped and
    reported in the second return value."""
    rows = []
    skipped = []
    for building_id in sorted(records_by_building):
        matched = [
            rec for rec in records_by_building[building_id]
            if rec.pm25 is not None and rec.pm25_out is not None
        ]
        if len(matched) < 2:
            skipped.append(building_id)
            continue
        indoor = np.array([rec.pm25 for rec in matched])
        outdoor = np.array([rec.pm25_out for rec in matched])
        rows.append(CorrelationRow(
            building_id=building_id,
            start_time=min(rec.timestamp for rec in matched),
            end_time=max(rec.timestamp for rec in matched),
            n_hours=len(matched),
            indoor_mean=float(indoor.mean()),
            indoor_sd=float(indoor.std(ddof=1)),
            outdoor_mean=float(outdoor.mean()),
            outdoor_sd=float(outdoor.std(ddof=1)),
            spearman_r=spearman(indoor, outdoor),
        ))
    return rows, skipped


def correlation_csv(rows: Sequence[CorrelationRow]) -> str:
    header = ["building_id", "start_time", "end_time", "n_hours",
              "indoor_mean", "indoor_sd", "outdoor_mean", "outdoor_sd", "spearman_r"]
    data = [
        [
            row.building_id, format_timestamp(row.start_time), format_timestamp(row.end_time),
            row.n_hours,
            f"{row.indoor_mean:.2f}", f"{row.indoor_sd:.2f}",
            f"{row.outdoor_mean:.2f}", f"{row.outdoor_sd:.2f}",
            f"{row.spearman_r:.2f}",
        ]
        for row in rows
    ]
    return _csv_text(header, data)


# --- permutation importance outputs ------------------------------------------

def importance_csv(entries: Sequence[ImportanceEntry], top: Optional[int] = 15) -> str:
    header = ["rank", "feature", "mean_rmse_loss", "sd_rmse_loss"]
    shown = entries if top is None else entries[:top]
    data = [
        [e.rank, e.feature, f"{e.mean_rmse_loss:.6f}", f"{e.sd_rmse_loss:.6f}"]
        for e in shown
    ]
    return _csv_text(header, data)


def importance_svg(entries: Sequence[ImportanceEntry], top: int = 15, title: str = "") -> str:
    shown = entries[:top]
    bar_height, gap, left, right = 22, 6, 220, 30
    width = 720
    height = 40 + len(shown) * (bar_height + gap)
    plot_width = width - left - right
    max_loss = max((e.mean_rmse_loss for e in shown), default=0.0)
    scale = plot_width / max_loss if max_loss > 0 else 0.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<text x="{left}" y="18" font-size="14">{html.escape(title)}</text>',
    ]
    for i, e in enumerate(shown):
        y = 34 + i * (bar_height + gap)
        bar = max(0.0, e.mean_rmse_loss) * scale
        parts.append(
            f'<text x="{left - 8}" y="{y + 15}" text-anchor="end">{html.escape(e.feature)}</text>'
        )
        parts.append(
            f'<rect x="{left}" y="{y}" width="{bar:.2f}" height="{bar_height}" fill="#4878a8"/>'
        )
        parts.append(
            f'<text x="{left + bar + 4:.2f}" y="{y + 15}">{e.mean_rmse_loss:.4f}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


# --- HTML building report -----------------------------------------------------

_REPORT_CSS = """
body { font-family: sans-serif; margin: 1.5em; color: #222; }
table { border-collapse: collapse; margin: 1em 0; }
th, td { border: 1px solid #bbb; padding: 3px 8px; text-align: right; }
th { background: #eee; }
td.label, th.label { text-align: left; }
td.good { background: #c8e6c9; }
td.moderate { background: #fff3b0; }
td.poor { background: #f4b6b6; }
td.missing { background: #f5f5f5; color: #999; }
.banner { background: #fff3b0; padding: 0.8em; border: 1px solid #d0b000; }
.legend span { padding: 2px 10px; margin-right: 8px; }
"""


def _trend_svg(hours: np.ndarray, values: np.ndarray, smoothed: np.ndarray) -> str:
    width, height, pad = 800, 240, 36
    x_span = max(float(hours[-1] - hours[0]), 1.0)
    lo = min(float(values.min()), float(smoothed.min()))
    hi = max(float(values.max()), float(smoothed.max()))
    y_span = (hi - lo) or 1.0

    def sx(h):
        return pad + (h - hours[0]) / x_span * (width - 2 * pad)

    def sy(v):
        return height - pad - (v - lo) / y_span * (height - 2 * pad)

    raw = " ".join(f"{sx(h):.1f},{sy(v):.1f}" for h, v in zip(hours, values))
    fit = " ".join(f"{sx(h):.1f},{sy(v):.1f}" for h, v in zip(hours, smoothed))
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="{width}" height="{height}" fill="#fafafa"/>'
        f'<polyline points="{raw}" fill="none" stroke="#9ec3e6" stroke-width="1"/>'
        f'<polyline points="{fit}" fill="none" stroke="#c0392b" stroke-width="2"/>'
        f'<text x="{pad}" y="16" font-family="sans-serif" font-size="12">'
        f"hourly PM2.5 with local regression trend (span 0.2)</text>"
        f'<text x="{pad}" y="{height - 8}" font-family="sans-serif" font-size="11">'
        f"{lo:.1f} to {hi:.1f} ug/m3 over {hours.size} hours</text>"
        f"</svg>"
    )


def building_report_html(
    building_id: str,
    records: Sequence[HourlyRecord],
    thresholds: ThresholdBands,
    date_from,
    date_to,
    loess_span: float = 0.2,
) -> str:
    """Color-coded hourly report for one building and date range."""
    title = f"Air quality report: {html.escape(building_id)} ({date_from} to {date_to})"
    head = (
        "<!DOCTYPE html>\n<html><head><meta charset='utf-8'>"
        f"<title>{title}</title><style>{_REPORT_CSS}</style></head><body>"
        f"<h1>{title}</h1>"
    )
    if not records:
        return head + '<div class="banner">no data in the selected date range</div></body></html>'

    parameters = [
        p for p in REPORT_PARAMETERS
        if any(getattr(rec, p) is not None for rec in records)
    ]

    parts = [head]
    parts.append('<div class="legend">')
    for band, cls in (("good", "good"), ("moderate", "moderate"), ("poor", "poor")):
        parts.append(f'<span class="{cls}">{band}</span>')
    parts.append("</div>")

    parts.append("<h2>Summary</h2><table><tr><th class='label'>parameter</th>"
                 "<th>n</th><th>min</th><th>max</th><th>median</th><th>iqr</th>"
                 "<th>mean</th><th>sd</th></tr>")
    for p in parameters:
        values = [getattr(rec, p) for rec in records if getattr(rec, p) is not None]
        s = summary_stats(values)
        parts.append(
            f"<tr><td class='label'>{html.escape(PARAMETER_LABELS[p])}</td><td>{s.n}</td>"
            f"<td>{s.min:.2f}</td><td>{s.max:.2f}</td><td>{s.median:.2f}</td>"
            f"<td>{s.iqr:.2f}</td><td>{s.mean:.2f}</td><td>{s.sd:.2f}</td></tr>"
        )
    parts.append("</table>")

    pm25_points = [(rec.timestamp, rec.pm25) for rec in records if rec.pm25 is not None]
    if len(pm25_points) >= 2:
        t0 = pm25_points[0][0]
        hours = np.array([(ts - t0).total_seconds() / 3600.0 for ts, _ in pm25_points])
        values = np.array([v for _, v in pm25_points])
        smoothed = loess_smooth(hours, values, span=loess_span)
        parts.append("<h2>Trend</h2>")
        parts.append(_trend_svg(hours, values, smoothed))

    parts.append("<h2>Hourly values</h2><table><tr><th class='label'>hour (UTC)</th>")
    for p in parameters:
        parts.append(f"<th>{html.escape(PARAMETER_LABELS[p])}</th>")
    parts.append("</tr>")
    for rec in records:
        parts.append(f"<tr><td class='label'>{format_timestamp(rec.timestamp)}</td>")
        for p in parameters:
            value = getattr(rec, p)
            if value is None:
                parts.append('<td class="missing">-</td>')
            else:
                cls = thresholds.band(p, value)
                parts.append(f'<td class="{cls}">{value:.1f}</td>')
        parts.append("</tr>")
    parts.append("</table></body></html>")
    return "".join(parts)
