"""Obstacle-aware UAV repositioning by exhaustive grid search."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .channel import ObstacleLossParams, RadioConfig, friis_path_loss_db, penetration_loss_db
from .errors import ConfigurationError
from .geom import Box, Point3, distance, line_of_sight
from .simcore import BatchAggregate, Scenario, run_batch


@dataclass(frozen=True)
class SearchRegion:
    bounds: Box
    grid_step: float = 1.0
    altitude_min: float = 10.0
    altitude_max: float = 10.0

    @classmethod
    def default(cls) -> "SearchRegion":
        return cls(Box.from_bounds(-50.0, 50.0, -50.0, 50.0, 10.0, 10.0), 1.0, 10.0, 10.0)

    def validate(self) -> None:
        if not (math.isfinite(self.grid_step) and self.grid_step > 0):
            raise ConfigurationError(f"grid_step must be > 0, got {self.grid_step!r}")
        if not self.altitude_min <= self.altitude_max:
            raise ConfigurationError("altitude_min must not exceed altitude_max")
        if self.altitude_max < self.bounds.min.z or self.altitude_min > self.bounds.max.z:
            raise ConfigurationError("altitude range lies outside the region bounds")


@dataclass(frozen=True)
class PlacementResult:
    position: Point3
    predicted_path_loss_db: float
    los_clear: bool
    candidates_evaluated: int


def grid_axis(lo: float, hi: float, step: float) -> list[float]:
    # Integer-indexed so every caller reproduces the same floats.
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def candidates(region: SearchRegion) -> list[Point3]:
    region.validate()
    b = region.bounds
    z_lo = max(region.altitude_min, b.min.z)
    z_hi = min(region.altitude_max, b.max.z)
    return [Point3(x, y, z)
            for x in grid_axis(b.min.x, b.max.x, region.grid_step)
            for y in grid_axis(b.min.y, b.max.y, region.grid_step)
            for z in grid_axis(z_lo, z_hi, region.grid_step)]


def predicted_loss_db(ue: Point3, pos: Point3, buildings: Sequence[Box],
                      radio: RadioConfig, params: ObstacleLossParams) -> tuple[float, bool]:
    """Expected path loss (shadowing at its 0 dB mean) and whether LoS is clear."""
    los = line_of_sight(ue, pos, buildings)
    loss = friis_path_loss_db(distance(ue, pos), radio.frequency_hz)
    if not los.clear:
        loss += penetration_loss_db(len(los.blockers), params)
    return loss, los.clear


def find_position(ue: Point3, buildings: Sequence[Box], region: SearchRegion,
                  radio: RadioConfig, params: ObstacleLossParams,
                  grid: Sequence[Point3] | None = None) -> PlacementResult:
    """Pick the grid point with least expected loss, preferring LoS-clear points.

    Clear candidates are a hard filter; only when none exists does the search
    fall back to ranking every candidate by loss. Ties go to the
    lexicographically smallest ``(x, y, z)``, so ``grid`` order is irrelevant.
    A candidate coinciding with the UE is skipped.
    """
    pts = candidates(region) if grid is None else list(grid)
    best_clear = best_any = None
    evaluated = 0
    for p in pts:
        if p == ue:
            continue
        evaluated += 1
        loss, clear = predicted_loss_db(ue, p, buildings, radio, params)
        key = (loss, p.x, p.y, p.z)
        if best_any is None or key < best_any[0]:
            best_any = (key, p, clear)
        if clear and (best_clear is None or key < best_clear[0]):
            best_clear = (key, p, clear)
    if best_any is None:
        raise ConfigurationError("search region contains no usable candidate position")
    (loss, *_), pos, clear = best_clear or best_any
    return PlacementResult(pos, loss, clear, evaluated)


@dataclass(frozen=True)
class RepositionOutcome:
    before: BatchAggregate
    after: BatchAggregate
    placement: PlacementResult
    already_clear: bool


def reposition_experiment(scenario: Scenario, region: SearchRegion, seeds: Sequence[int], *,
                          jobs: int = 1, engine: str | None = None) -> RepositionOutcome:
    placement = find_position(scenario.ue_pos, scenario.buildings, region,
                              scenario.radio, scenario.obstacle_params)
    before = run_batch(scenario, seeds, jobs=jobs, engine=engine)
    after = run_batch(scenario.with_uav(placement.position), seeds, jobs=jobs, engine=engine)
    already_clear = line_of_sight(scenario.ue_pos, scenario.uav_pos, scenario.buildings).clear
    return RepositionOutcome(before.aggregate, after.aggregate, placement, already_clear)
