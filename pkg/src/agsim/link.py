"""Constant-rate PHY/MAC abstraction: logistic PER curve and a retry loop."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError


@dataclass(frozen=True)
class ErrorModelParams:
    snr_mid_db: float = 12.0
    steepness_db: float = 1.5
    max_retries: int = 7

    def __post_init__(self):
        if not (math.isfinite(self.steepness_db) and self.steepness_db > 0):
            raise ConfigurationError("error_params.steepness_db must be > 0")
        if not math.isfinite(self.snr_mid_db):
            raise ConfigurationError("error_params.snr_mid_db must be finite")
        if int(self.max_retries) != self.max_retries or self.max_retries < 0:
            raise ConfigurationError("error_params.max_retries must be a non-negative integer")


@dataclass(frozen=True)
class TxOutcome:
    attempts: int
    delivered: bool
    airtime_s: float


def packet_error_rate(snr: float, params: ErrorModelParams) -> float:
    """Per-attempt failure probability ``1 / (1 + exp((snr - mid) / steepness))``."""
    x = (snr - params.snr_mid_db) / params.steepness_db
    # exp overflows past ~709; the curve has saturated to 0.0 / 1.0 long before.
    if x > 700.0:
        return 0.0
    if x < -700.0:
        return 1.0
    return 1.0 / (1.0 + math.exp(x))


def airtime_s(payload_bytes: int, phy_rate_bps: float, per_attempt_overhead_s: float = 0.0) -> float:
    if payload_bytes <= 0:
        raise ValueError(f"payload_bytes must be > 0, got {payload_bytes!r}")
    if not phy_rate_bps > 0:
        raise ValueError(f"phy_rate_bps must be > 0, got {phy_rate_bps!r}")
    return per_attempt_overhead_s + 8.0 * payload_bytes / phy_rate_bps


def delivery_probability(per: float, max_retries: int) -> float:
    return 1.0 - per ** (max_retries + 1)


def transmit(packet_bytes, snr, params: ErrorModelParams, per_attempt_overhead_s, rng,
             phy_rate_bps: float = 150e6) -> TxOutcome:
    """Send one packet with up to ``max_retries`` retransmissions.

    Each attempt fails independently when ``rng.random() < PER``; airtime is
    charged for every attempt made.
    """
    per = packet_error_rate(snr, params)
    one = airtime_s(packet_bytes, phy_rate_bps, per_attempt_overhead_s)
    attempts = 0
    delivered = False
    while attempts <= params.max_retries:
        attempts += 1
        if rng.random() >= per:
            delivered = True
            break
    return TxOutcome(attempts, delivered, attempts * one)
