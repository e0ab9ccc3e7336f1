"""3D points, axis-aligned building boxes and line-of-sight tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError(f"non-finite coordinate in {self!r}")

    def __iter__(self):
        yield self.x
        yield self.y
        yield self.z

    def translated(self, dx: float, dy: float, dz: float) -> "Point3":
        return Point3(self.x + dx, self.y + dy, self.z + dz)


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned volume ``[min.x, max.x] x [min.y, max.y] x [min.z, max.z]``."""

    min: Point3
    max: Point3

    def __post_init__(self):
        if not (self.min.x <= self.max.x and self.min.y <= self.max.y and self.min.z <= self.max.z):
            raise ValueError(f"box min must not exceed max: {self.min} / {self.max}")

    @classmethod
    def from_bounds(cls, x_min, x_max, y_min, y_max, z_min, z_max) -> "Box":
        return cls(Point3(x_min, y_min, z_min), Point3(x_max, y_max, z_max))

    def contains(self, p: Point3) -> bool:
        return (self.min.x <= p.x <= self.max.x
                and self.min.y <= p.y <= self.max.y
                and self.min.z <= p.z <= self.max.z)

    def translated(self, dx: float, dy: float, dz: float) -> "Box":
        return Box(self.min.translated(dx, dy, dz), self.max.translated(dx, dy, dz))


@dataclass(frozen=True)
class LosResult:
    blockers: tuple[int, ...] = field(default_factory=tuple)

    @property
    def clear(self) -> bool:
        return not self.blockers


def distance(a: Point3, b: Point3) -> float:
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)


def segment_intersects_box(a: Point3, b: Point3, box: Box) -> bool:
    """Slab clipping of the closed segment ``[a, b]`` against a closed box.

    Boundary contact counts as an intersection. Comparisons are exact; an axis
    along which the segment does not move is handled as an interval test.
    """
    # Exact extent rejection first: the parametric form can round an endpoint
    # onto a face it does not reach.
    if (max(a.x, b.x) < box.min.x or min(a.x, b.x) > box.max.x
            or max(a.y, b.y) < box.min.y or min(a.y, b.y) > box.max.y
            or max(a.z, b.z) < box.min.z or min(a.z, b.z) > box.max.z):
        return False
    # Canonical endpoint order keeps the result symmetric under swapping.
    if (b.x, b.y, b.z) < (a.x, a.y, a.z):
        a, b = b, a
    t0, t1 = 0.0, 1.0
    for p, q, lo, hi in (
        (a.x, b.x, box.min.x, box.max.x),
        (a.y, b.y, box.min.y, box.max.y),
        (a.z, b.z, box.min.z, box.max.z),
    ):
        d = q - p
        if d == 0.0:
            if p < lo or p > hi:
                return False
            continue
        ta = (lo - p) / d
        tb = (hi - p) / d
        if ta > tb:
            ta, tb = tb, ta
        if ta > t0:
            t0 = ta
        if tb < t1:
            t1 = tb
        if t0 > t1:
            return False
    return True


def line_of_sight(a: Point3, b: Point3, buildings: Sequence[Box]) -> LosResult:
    # Overlapping buildings are each counted; blocker count drives penetration loss.
    return LosResult(tuple(i for i, box in enumerate(buildings) if segment_intersects_box(a, b, box)))
