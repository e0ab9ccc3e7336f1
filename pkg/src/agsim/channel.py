"""Propagation loss, shadowing and SNR for a single air-to-ground link.

Clear paths use free-space (Friis) loss. Blocked paths add a fixed penetration
loss per wall of every building crossed, plus log-normal shadowing whose
spread depends on whether the path is clear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .geom import Box, Point3, distance, line_of_sight

SPEED_OF_LIGHT = 299_792_458.0  # m/s
THERMAL_NOISE_DBM_HZ = -174.0


@dataclass(frozen=True)
class RadioConfig:
    frequency_hz: float = 5e9
    tx_power_dbm: float = 20.0
    antenna_gain_tx_dbi: float = 0.0
    antenna_gain_rx_dbi: float = 0.0
    channel_width_hz: float = 80e6
    noise_figure_db: float = 7.0
    phy_rate_bps: float = 150e6

    def __post_init__(self):
        for name in ("frequency_hz", "channel_width_hz", "phy_rate_bps"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"radio.{name} must be > 0, got {v!r}")
        for name in ("tx_power_dbm", "antenna_gain_tx_dbi", "antenna_gain_rx_dbi", "noise_figure_db"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"radio.{name} must be finite")


@dataclass(frozen=True)
class ObstacleLossParams:
    wall_loss_db: float = 7.0
    walls_per_building: int = 2
    shadowing_sigma_los_db: float = 0.0
    shadowing_sigma_nlos_db: float = 7.0

    def __post_init__(self):
        for name in ("wall_loss_db", "walls_per_building", "shadowing_sigma_los_db", "shadowing_sigma_nlos_db"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigurationError(f"obstacle_params.{name} must be >= 0, got {v!r}")

    def sigma_for(self, clear: bool) -> float:
        return self.shadowing_sigma_los_db if clear else self.shadowing_sigma_nlos_db


@dataclass(frozen=True)
class LinkBudget:
    path_loss_db: float
    shadowing_db: float
    rx_power_dbm: float
    noise_dbm: float
    snr_db: float
    los_clear: bool
    distance_m: float


def friis_path_loss_db(d: float, f: float) -> float:
    """Free-space loss ``20 log10(4 pi d f / c)`` in dB."""
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d!r}")
    if not f > 0:
        raise ValueError(f"frequency must be > 0, got {f!r}")
    return 20.0 * math.log10(4.0 * math.pi * d * f / SPEED_OF_LIGHT)


def penetration_loss_db(n_blockers: int, params: ObstacleLossParams) -> float:
    return n_blockers * params.walls_per_building * params.wall_loss_db


def obstacle_aware_path_loss_db(
    a: Point3,
    b: Point3,
    buildings: Sequence[Box],
    params: ObstacleLossParams,
    shadow: float,
    frequency_hz: float = 5e9,
) -> float:
    """Friis loss plus wall penetration for every blocker plus ``shadow``.

    ``shadow`` is an already-drawn sample; which sigma it came from (LoS or
    NLoS) is the caller's business, see :func:`sample_shadowing_db`.
    """
    d = distance(a, b)
    loss = friis_path_loss_db(d, frequency_hz)
    los = line_of_sight(a, b, buildings)
    if not los.clear:
        loss += penetration_loss_db(len(los.blockers), params)
    return loss + shadow


def sample_shadowing_db(rng: np.random.Generator, sigma: float) -> float:
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return 0.0
    return float(rng.normal(0.0, sigma))


def noise_floor_dbm(width: float, noise_figure: float) -> float:
    if not width > 0:
        raise ValueError(f"channel width must be > 0, got {width!r}")
    return THERMAL_NOISE_DBM_HZ + 10.0 * math.log10(width) + noise_figure


def link_budget(
    a: Point3,
    b: Point3,
    buildings: Sequence[Box],
    radio: RadioConfig,
    params: ObstacleLossParams,
    rng: np.random.Generator | None = None,
    shadow: float | None = None,
) -> LinkBudget:
    """Compose path loss, one shadowing draw and the noise floor into an SNR.

    Pass ``shadow`` to pin the shadowing term instead of drawing it from ``rng``.
    """
    los = line_of_sight(a, b, buildings)
    d = distance(a, b)
    path_loss = friis_path_loss_db(d, radio.frequency_hz)
    if not los.clear:
        path_loss += penetration_loss_db(len(los.blockers), params)
    if shadow is None:
        sigma = params.sigma_for(los.clear)
        if sigma > 0 and rng is None:
            raise ValueError("an rng stream is needed to draw shadowing")
        shadow = sample_shadowing_db(rng, sigma) if sigma > 0 else 0.0
    rx = (radio.tx_power_dbm + radio.antenna_gain_tx_dbi + radio.antenna_gain_rx_dbi
          - path_loss - shadow)
    noise = noise_floor_dbm(radio.channel_width_hz, radio.noise_figure_db)
    return LinkBudget(
        path_loss_db=path_loss,
        shadowing_db=shadow,
        rx_power_dbm=rx,
        noise_dbm=noise,
        snr_db=rx - noise,
        los_clear=los.clear,
        distance_m=d,
    )
