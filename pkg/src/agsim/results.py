"""CSV rendering of run results. Floats are written with ``repr`` so they round-trip."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Sequence

from .simcore import MetricsReport

RESULTS_HEADER = ("scenario", "seed", "frequency_hz", "throughput_bps", "pdr", "loss_ratio",
                  "mean_delay_s", "delivered", "generated")
METRIC_COLUMNS = RESULTS_HEADER[3:]
INTERVALS_HEADER = ("scenario", "seed", "frequency_hz", "interval_start_s", "throughput_bps")
HIST_HEADER = ("bin_lower", "bin_upper", "count")
AGG_SEED = "AGG"


def fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def report_row(scenario: str, seed: int, frequency_hz: float, r: MetricsReport) -> dict:
    return {
        "scenario": scenario, "seed": seed, "frequency_hz": float(frequency_hz),
        "throughput_bps": float(r.throughput_bps), "pdr": float(r.pdr),
        "loss_ratio": float(r.loss_ratio), "mean_delay_s": float(r.mean_delay_s),
        "delivered": int(r.delivered_count), "generated": int(r.generated_count),
    }


def agg_row(rows: Sequence[dict]) -> dict:
    """Mean of every metric column over per-seed rows of one (scenario, frequency) block."""
    first = rows[0]
    out = {"scenario": first["scenario"], "seed": AGG_SEED, "frequency_hz": float(first["frequency_hz"])}
    for col in METRIC_COLUMNS:
        vals = [float(r[col]) for r in rows if not math.isnan(float(r[col]))]
        out[col] = math.fsum(vals) / len(vals) if vals else math.nan
    return out


def _block_key(row):
    return (str(row["scenario"]), float(row["frequency_hz"]))


def with_aggregates(rows: Iterable[dict]) -> list[dict]:
    """Sort per-seed rows by (scenario, frequency, seed) and close each block with an AGG row."""
    per_seed = sorted((r for r in rows if str(r["seed"]) != AGG_SEED),
                      key=lambda r: (*_block_key(r), int(r["seed"])))
    out: list[dict] = []
    block: list[dict] = []
    for r in per_seed:
        if block and _block_key(block[0]) != _block_key(r):
            out += block + [agg_row(block)]
            block = []
        block.append(r)
    if block:
        out += block + [agg_row(block)]
    return out


def render_csv(rows: Iterable[dict], header: Sequence[str] = RESULTS_HEADER) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(r[c]) for c in header])
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for raw in reader:
        row = dict(raw)
        for col in ("frequency_hz", "throughput_bps", "pdr", "loss_ratio", "mean_delay_s"):
            if col in row:
                row[col] = float(row[col])
        for col in ("delivered", "generated"):
            if col in row:
                row[col] = float(row[col]) if row["seed"] == AGG_SEED else int(row[col])
        rows.append(row)
    return rows


def interval_rows(scenario: str, seed: int, frequency_hz: float, r: MetricsReport,
                  sample_interval_s: float) -> list[dict]:
    return [
        {"scenario": scenario, "seed": seed, "frequency_hz": float(frequency_hz),
         "interval_start_s": round(k * sample_interval_s, 9), "throughput_bps": float(v)}
        for k, v in enumerate(r.interval_throughputs_bps)
    ]
