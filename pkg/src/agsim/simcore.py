"""Discrete-event simulation of one UE -> UAV uplink and its QoS metrics.

The event loop itself lives in a compiled kernel (``agsim._engine``) with a
pure-Python twin (``agsim._engine_py``) used when the extension is not built
or when ``AGSIM_ENGINE=python`` is set. Both produce identical results.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from . import _engine_py
from .channel import SPEED_OF_LIGHT, LinkBudget, ObstacleLossParams, RadioConfig, link_budget
from .errors import ConfigurationError
from .geom import Box, Point3
from .link import ErrorModelParams, airtime_s, packet_error_rate
from .rng import run_streams, uniform_refill

try:
    from . import _engine as _engine_c
except ImportError:  # extension not built
    _engine_c = None

MODES = ("udp", "tcp_lite")
DROP_REASONS = ("none", "queue_overflow", "retry_exhausted")
HIST_BINS = 20


def available_engines() -> list[str]:
    return ["cython", "python"] if _engine_c is not None else ["python"]


def default_engine() -> str:
    wanted = os.environ.get("AGSIM_ENGINE", "").strip().lower()
    if wanted == "python" or _engine_c is None:
        return "python"
    return "cython"


def _simulate_fn(engine: str | None):
    engine = engine or default_engine()
    if engine == "python":
        return _engine_py.simulate
    if engine == "cython":
        if _engine_c is None:
            raise RuntimeError("compiled engine is not built; run `pip install -e .`")
        return _engine_c.simulate
    raise ValueError(f"unknown engine {engine!r}")


@dataclass(frozen=True)
class Scenario:
    ue_pos: Point3 = Point3(0.0, 0.0, 0.0)
    uav_pos: Point3 = Point3(30.0, 0.0, 10.0)
    buildings: tuple[Box, ...] = ()
    radio: RadioConfig = field(default_factory=RadioConfig)
    obstacle_params: ObstacleLossParams = field(default_factory=ObstacleLossParams)
    error_params: ErrorModelParams = field(default_factory=ErrorModelParams)
    offered_load_bps: float = 1e8
    packet_bytes: int = 1024
    warmup_s: float = 10.0
    measure_s: float = 1.0
    queue_capacity_packets: int = 1000
    mode: str = "udp"
    per_attempt_overhead_s: float = 100e-6
    tcp_window: int = 16
    rto_factor: float = 3.0
    tcp_max_retransmits: int = 2
    sample_interval_s: float = 0.1
    name: str = "scenario"

    def __post_init__(self):
        object.__setattr__(self, "buildings", tuple(self.buildings))

    def with_uav(self, pos: Point3) -> "Scenario":
        return replace(self, uav_pos=pos)

    def with_frequency(self, frequency_hz: float) -> "Scenario":
        return replace(self, radio=replace(self.radio, frequency_hz=frequency_hz))

    def validate(self) -> None:
        def bad(msg):
            raise ConfigurationError(msg)

        if self.mode not in MODES:
            bad(f"traffic.mode must be one of {MODES}, got {self.mode!r}")
        if not (math.isfinite(self.warmup_s) and self.warmup_s >= 0):
            bad("timing.warmup_s must be >= 0")
        if not (math.isfinite(self.measure_s) and self.measure_s > 0):
            bad("timing.measure_s must be > 0")
        if not (math.isfinite(self.offered_load_bps) and self.offered_load_bps > 0):
            bad("traffic.offered_load_bps must be > 0")
        if int(self.packet_bytes) != self.packet_bytes or self.packet_bytes <= 0:
            bad("traffic.packet_bytes must be a positive integer")
        if int(self.queue_capacity_packets) != self.queue_capacity_packets or self.queue_capacity_packets < 0:
            bad("traffic.queue_capacity_packets must be a non-negative integer")
        if not (math.isfinite(self.per_attempt_overhead_s) and self.per_attempt_overhead_s >= 0):
            bad("error_params.per_attempt_overhead_s must be >= 0")
        if int(self.tcp_window) != self.tcp_window or self.tcp_window < 1:
            bad("traffic.tcp_window must be a positive integer")
        if not (math.isfinite(self.rto_factor) and self.rto_factor > 0):
            bad("traffic.rto_factor must be > 0")
        if int(self.tcp_max_retransmits) != self.tcp_max_retransmits or self.tcp_max_retransmits < 0:
            bad("traffic.tcp_max_retransmits must be a non-negative integer")
        if not (math.isfinite(self.sample_interval_s) and self.sample_interval_s > 0):
            bad("timing.sample_interval_s must be > 0")
        if self.ue_pos == self.uav_pos:
            bad("nodes.ue and nodes.uav must not coincide")
        t = timing(self, 1.0)
        if t.interval_ns < 1:
            bad("traffic.offered_load_bps is too high for a 1 ns clock")
        if t.w1_ns - t.w0_ns < t.interval_ns:
            bad("timing.measure_s must cover at least one packet inter-arrival time")
        if t.air_ns < 1:
            bad("packet airtime rounds to zero nanoseconds")


@dataclass(frozen=True)
class Timing:
    """Integer-nanosecond quantities handed to the event loop."""

    interval_ns: int
    w0_ns: int
    w1_ns: int
    air_ns: int
    prop_ns: int
    rto_ns: int
    sample_ns: int

    @property
    def min_delay_ns(self) -> int:
        return self.air_ns + self.prop_ns


def timing(scenario: Scenario, distance_m: float) -> Timing:
    s = scenario
    w0 = round(s.warmup_s * 1e9)
    air = round(airtime_s(s.packet_bytes, s.radio.phy_rate_bps, s.per_attempt_overhead_s) * 1e9)
    prop = round(distance_m / SPEED_OF_LIGHT * 1e9)
    return Timing(
        interval_ns=round(8.0 * s.packet_bytes * 1e9 / s.offered_load_bps),
        w0_ns=w0,
        w1_ns=w0 + round(s.measure_s * 1e9),
        air_ns=air,
        prop_ns=prop,
        rto_ns=max(1, round(s.rto_factor * (air + 2 * prop))),
        sample_ns=round(s.sample_interval_s * 1e9),
    )


@dataclass(frozen=True)
class PacketRecord:
    id: int
    created_ns: int
    dequeued_ns: int
    delivered_ns: int | None
    attempts: int
    dropped_reason: str

    @property
    def created_at_s(self) -> float:
        return self.created_ns / 1e9

    @property
    def dequeued_at_s(self) -> float:
        return self.dequeued_ns / 1e9

    @property
    def delivered_at_s(self) -> float | None:
        return None if self.delivered_ns is None else self.delivered_ns / 1e9

    @property
    def delay_ns(self) -> int | None:
        return None if self.delivered_ns is None else self.delivered_ns - self.created_ns


@dataclass(frozen=True)
class MetricsReport:
    throughput_bps: float
    pdr: float
    loss_ratio: float
    mean_delay_s: float
    delivered_count: int
    generated_count: int
    dropped_overflow: int
    dropped_retry: int
    snr_db: float
    los_clear: bool
    interval_throughputs_bps: tuple[float, ...]
    histogram: tuple[tuple[float, float, int], ...]

    @property
    def dropped_count(self) -> int:
        return self.dropped_overflow + self.dropped_retry

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval_throughputs_bps"] = list(self.interval_throughputs_bps)
        d["histogram"] = [list(b) for b in self.histogram]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def throughput_histogram(samples: Sequence[float], upper: float, bins: int = HIST_BINS):
    """Equal-width bins over ``[0, upper]``; samples above ``upper`` land in the top bin."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    edges = np.linspace(0.0, upper, bins + 1)
    clipped = np.clip(np.asarray(samples, dtype=float), 0.0, upper)
    counts, _ = np.histogram(clipped, bins=edges)
    return tuple((float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(bins))


@dataclass
class RunOutput:
    """Everything one run produced; ``report`` is the public summary."""

    report: MetricsReport
    budget: LinkBudget
    per: float
    timing: Timing
    created: np.ndarray
    dequeued: np.ndarray
    delivered: np.ndarray
    attempts: np.ndarray
    reason: np.ndarray

    @property
    def window_mask(self) -> np.ndarray:
        return self.created >= self.timing.w0_ns

    def records(self, window_only: bool = True) -> list[PacketRecord]:
        idx = np.nonzero(self.window_mask)[0] if window_only else np.arange(len(self.created))
        return [
            PacketRecord(
                id=int(i),
                created_ns=int(self.created[i]),
                dequeued_ns=int(self.dequeued[i]),
                delivered_ns=int(self.delivered[i]) if self.delivered[i] >= 0 else None,
                attempts=int(self.attempts[i]),
                dropped_reason=DROP_REASONS[int(self.reason[i])],
            )
            for i in idx
        ]


def _report(s: Scenario, t: Timing, budget: LinkBudget, created, delivered, reason) -> MetricsReport:
    win = created >= t.w0_ns
    generated = int(win.sum())
    got = win & (delivered >= 0)
    n_delivered = int(got.sum())
    bits = 8 * s.packet_bytes
    # Goodput counts window packets that also arrived inside the window.
    in_time = got & (delivered <= t.w1_ns)
    throughput = int(in_time.sum()) * bits / s.measure_s

    if n_delivered:
        total_delay_ns = int((delivered[got] - created[got]).sum())
        mean_delay = total_delay_ns / n_delivered / 1e9
    else:
        mean_delay = math.nan
    pdr = n_delivered / generated
    measure_ns = t.w1_ns - t.w0_ns
    n_bins = -(-measure_ns // t.sample_ns)
    bin_idx = np.minimum((delivered[in_time] - t.w0_ns) // t.sample_ns, n_bins - 1)
    per_bin = np.bincount(bin_idx, minlength=n_bins)
    samples = []
    for k in range(n_bins):
        span_ns = min(t.sample_ns, measure_ns - k * t.sample_ns)
        samples.append(int(per_bin[k]) * bits / (span_ns / 1e9))
    return MetricsReport(
        throughput_bps=throughput,
        pdr=pdr,
        loss_ratio=1.0 - pdr,
        mean_delay_s=mean_delay,
        delivered_count=n_delivered,
        generated_count=generated,
        dropped_overflow=int((win & (reason == 1)).sum()),
        dropped_retry=int((win & (reason == 2)).sum()),
        snr_db=budget.snr_db,
        los_clear=budget.los_clear,
        interval_throughputs_bps=tuple(samples),
        histogram=throughput_histogram(samples, s.offered_load_bps),
    )


def run_detailed(scenario: Scenario, seed: int, *, engine: str | None = None,
                 forced_losses: Sequence[int] = (), shadow: float | None = None) -> RunOutput:
    """Simulate one (scenario, seed) pair.

    ``forced_losses`` lists packet ids whose first MAC service fails outright
    (fault injection for tests). ``shadow`` pins the shadowing sample in dB.
    """
    scenario.validate()
    simulate = _simulate_fn(engine)
    streams = run_streams(seed)
    budget = link_budget(scenario.ue_pos, scenario.uav_pos, scenario.buildings, scenario.radio,
                         scenario.obstacle_params, streams.shadowing, shadow=shadow)
    per = packet_error_rate(budget.snr_db, scenario.error_params)
    t = timing(scenario, budget.distance_m)
    created, dequeued, delivered, attempts, reason = simulate(
        MODES.index(scenario.mode), t.interval_ns, t.w0_ns, t.w1_ns, t.air_ns, t.prop_ns, per,
        int(scenario.error_params.max_retries), int(scenario.queue_capacity_packets),
        int(scenario.tcp_window), t.rto_ns, int(scenario.tcp_max_retransmits),
        uniform_refill(streams.per), tuple(int(p) for p in forced_losses),
    )
    report = _report(scenario, t, budget, created, delivered, reason)
    return RunOutput(report, budget, per, t, created, dequeued, delivered, attempts, reason)


def run(scenario: Scenario, seed: int, *, engine: str | None = None) -> MetricsReport:
    return run_detailed(scenario, seed, engine=engine).report


def tcp_lite_run(scenario: Scenario, seed: int, *, engine: str | None = None) -> MetricsReport:
    if scenario.mode != "tcp_lite":
        raise ConfigurationError(f"tcp_lite_run needs mode 'tcp_lite', got {scenario.mode!r}")
    return run(scenario, seed, engine=engine)


@dataclass(frozen=True)
class MetricStats:
    mean: float
    min: float
    max: float


AGG_METRICS = ("throughput_bps", "pdr", "loss_ratio", "mean_delay_s", "delivered_count", "generated_count")


@dataclass(frozen=True)
class BatchAggregate:
    n_runs: int
    throughput_bps: MetricStats
    pdr: MetricStats
    loss_ratio: MetricStats
    mean_delay_s: MetricStats
    delivered_count: MetricStats
    generated_count: MetricStats
    histogram: tuple[tuple[float, float, int], ...]


def _stats(values) -> MetricStats:
    vals = [float(v) for v in values if not math.isnan(v)]
    if not vals:
        return MetricStats(math.nan, math.nan, math.nan)
    # fsum keeps the mean independent of run order.
    return MetricStats(math.fsum(vals) / len(vals), min(vals), max(vals))


def aggregate(reports: Sequence[MetricsReport], upper_bps: float, bins: int = HIST_BINS) -> BatchAggregate:
    if not reports:
        raise ValueError("cannot aggregate an empty batch")
    stats = {m: _stats(getattr(r, m) for r in reports) for m in AGG_METRICS}
    samples = [x for r in reports for x in r.interval_throughputs_bps]
    return BatchAggregate(n_runs=len(reports), histogram=throughput_histogram(samples, upper_bps, bins), **stats)


@dataclass(frozen=True)
class BatchResult:
    seeds: tuple[int, ...]
    reports: tuple[MetricsReport, ...]
    aggregate: BatchAggregate


def _run_one(args):
    scenario, seed, engine = args
    return run(scenario, seed, engine=engine)


def run_batch(scenario: Scenario, seeds: Sequence[int], *, jobs: int = 1,
              engine: str | None = None) -> BatchResult:
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ConfigurationError("seeds must not be empty")
    scenario.validate()
    work = [(scenario, s, engine) for s in seeds]
    if jobs > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = tuple(pool.map(_run_one, work))
    else:
        reports = tuple(_run_one(w) for w in work)
    return BatchResult(seeds, reports, aggregate(reports, scenario.offered_load_bps))
