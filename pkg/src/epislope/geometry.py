"""Norms, point sets, distances and gap distances.

Points are plain tuples of numbers (floats, or exact Fractions on the
exact code paths).  Sets are finite samples; every infimum over a set is
a genuine minimum over its points, with the empty-set convention
``inf over {} = INF``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .extreal import INF, ExtReal, ext_min

Point = Tuple[float, ...]


class NormKind(enum.Enum):
    EUCLIDEAN = "euclidean"
    MAX = "max"
    TAXICAB = "taxicab"


@dataclass(frozen=True)
class Norm:
    kind: NormKind = NormKind.EUCLIDEAN

    def __call__(self, v: Sequence[float]) -> float:
        if self.kind is NormKind.EUCLIDEAN:
            return math.sqrt(sum(float(c) * float(c) for c in v))
        if self.kind is NormKind.MAX:
            return max((abs(float(c)) for c in v), default=0.0)
        return sum(abs(float(c)) for c in v)

    def dist(self, p: Sequence[float], q: Sequence[float]) -> float:
        return self([a - b for a, b in zip(p, q)])

    def pairwise(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Distance matrix between rows of A (n,d) and B (m,d)."""
        diff = A[:, None, :] - B[None, :, :]
        if self.kind is NormKind.EUCLIDEAN:
            return np.sqrt((diff * diff).sum(axis=2))
        if self.kind is NormKind.MAX:
            return np.abs(diff).max(axis=2)
        return np.abs(diff).sum(axis=2)


@dataclass(frozen=True)
class BoxNorm:
    """Norm on a product X x R^extra: max of the base norm on the first
    ``base_dim`` coordinates and the max-abs of the remaining ones."""

    base: Norm
    base_dim: int

    def __call__(self, v: Sequence[float]) -> float:
        head = self.base(v[: self.base_dim])
        tail = max((abs(float(c)) for c in v[self.base_dim:]), default=0.0)
        return max(head, tail)

    def dist(self, p: Sequence[float], q: Sequence[float]) -> float:
        return self([a - b for a, b in zip(p, q)])

    def pairwise(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        d = self.base_dim
        head = self.base.pairwise(A[:, :d], B[:, :d])
        tail_diff = np.abs(A[:, None, d:] - B[None, :, d:])
        tail = tail_diff.max(axis=2) if tail_diff.shape[2] else np.zeros_like(head)
        return np.maximum(head, tail)


EUCLIDEAN = Norm(NormKind.EUCLIDEAN)
MAX = Norm(NormKind.MAX)
TAXICAB = Norm(NormKind.TAXICAB)


def _as_tuple(p: Sequence[float]) -> Point:
    return tuple(p)


@dataclass(frozen=True)
class PointSet:
    """A finite set of points sharing a dimension and a norm.

    Duplicates are removed on construction.  Possibly empty.
    """

    points: Tuple[Point, ...]
    norm: object = EUCLIDEAN  # Norm or BoxNorm
    dim: int = 0
    _array: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    @staticmethod
    def of(points: Iterable[Sequence[float]], norm=EUCLIDEAN, dim: Optional[int] = None) -> "PointSet":
        seen = {}
        for p in points:
            t = _as_tuple(p)
            seen.setdefault(t, None)
        pts = tuple(seen)
        if pts:
            d = len(pts[0])
            if any(len(p) != d for p in pts):
                raise ValueError("points of mixed dimension")
            if dim is not None and dim != d:
                raise ValueError(f"declared dim {dim} != point dim {d}")
            dim = d
        elif dim is None:
            raise ValueError("empty point set needs an explicit dim")
        arr = np.array(pts, dtype=float) if pts else None
        return PointSet(points=pts, norm=norm, dim=dim, _array=arr)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def array(self) -> Optional[np.ndarray]:
        return self._array


def point_set_distance(x: Sequence[float], S: PointSet) -> ExtReal:
    """d(x, S) = min over a in S of ||x - a||; INF if S is empty."""
    if len(x) != S.dim:
        raise ValueError(f"point dim {len(x)} != set dim {S.dim}")
    if not S.points:
        return INF
    xa = np.asarray([x], dtype=float)
    return float(S.norm.pairwise(xa, S.array).min())


def gap_distance(A: PointSet, B: PointSet) -> ExtReal:
    """D(A, B) = min pairwise distance; INF if either set is empty."""
    if A.dim != B.dim:
        raise ValueError(f"dim mismatch {A.dim} != {B.dim}")
    if A.norm != B.norm:
        raise ValueError("norm mismatch between sets")
    if not A.points or not B.points:
        return INF
    return float(A.norm.pairwise(A.array, B.array).min())


def uniform_neighborhood_contains(S: PointSet, delta: float, x: Sequence[float]) -> bool:
    """Membership in the closed neighborhood B_delta(S) = {x : d_S(x) <= delta}."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return point_set_distance(x, S) <= delta


def diameter(S: PointSet) -> ExtReal:
    """Max pairwise distance; 0 for empty or singleton sets."""
    if len(S) <= 1:
        return 0.0
    return float(S.norm.pairwise(S.array, S.array).max())


def ball_gap(y: Sequence[float], radius: float, S: PointSet) -> ExtReal:
    """D(B_radius(y), S) for the full closed ball around y.

    In a normed space this equals (d(y, S) - radius)^+, which is exact and
    avoids sampling the ball.
    """
    d = point_set_distance(y, S)
    if d == INF:
        return INF
    return max(0.0, d - radius)


def ext_gap(values: Iterable[ExtReal]) -> ExtReal:
    return ext_min(values)
