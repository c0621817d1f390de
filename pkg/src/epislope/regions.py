"""Regions: the sets S that functions are restricted to or penalized by.

A region answers exact membership and, where possible, an exact distance
function d_S.  Regions without a closed-form distance fall back to the
distance to the mesh nodes they contain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from .extreal import INF
from .geometry import EUCLIDEAN, Norm, PointSet, point_set_distance


class Region:
    def contains(self, x: Sequence[float]) -> bool:
        raise NotImplementedError

    def distance(self, x: Sequence[float]) -> Optional[float]:
        """Exact d_S(x), or None when only mesh-based distance is available."""
        return None


@dataclass(frozen=True)
class WholeSpace(Region):
    def contains(self, x: Sequence[float]) -> bool:
        return True

    def distance(self, x: Sequence[float]) -> float:
        return 0.0


@dataclass(frozen=True)
class Ball(Region):
    """Closed ball B_radius(center)."""

    center: Tuple[float, ...]
    radius: float
    norm: Norm = EUCLIDEAN

    def contains(self, x: Sequence[float]) -> bool:
        return self.norm.dist(x, self.center) <= self.radius

    def distance(self, x: Sequence[float]) -> float:
        return max(0.0, self.norm.dist(x, self.center) - self.radius)


@dataclass(frozen=True)
class FinitePoints(Region):
    points: PointSet

    def contains(self, x: Sequence[float]) -> bool:
        return tuple(x) in self.points.points

    def distance(self, x: Sequence[float]) -> float:
        d = point_set_distance(x, self.points)
        return float(d) if d != INF else math.inf


@dataclass(frozen=True)
class Predicate(Region):
    """Membership by predicate only; distances come from mesh sampling."""

    fn: Callable[[Sequence[float]], bool]

    def contains(self, x: Sequence[float]) -> bool:
        return bool(self.fn(tuple(x)))
