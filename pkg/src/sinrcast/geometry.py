"""Grid partitions of the plane, dilution classes and granularity.

All lengths are in units of the transmission range (r = 1).  A grid ``G_c``
splits the plane into half-open squares ``[i*c, (i+1)*c) x [j*c, (j+1)*c)``
with the origin on a grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import pdist

__all__ = [
    "Point",
    "BoxCoord",
    "box_of",
    "boxes_of",
    "adjacent",
    "dist_m",
    "dilution_class",
    "granularity",
    "min_pairwise_distance",
]


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True, order=True)
class BoxCoord:
    """Box ``(i, j)`` of the grid with side ``c``."""

    i: int
    j: int
    c: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"box side must be a positive finite number, got {self.c!r}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.i, self.j)


def _axis_index(v: float, c: float) -> int:
    i = math.floor(v / c)
    # v / c can round across an integer; settle on the exact half-open test
    if i * c > v:
        i -= 1
    elif (i + 1) * c <= v:
        i += 1
    return i


def box_of(p, c: float) -> BoxCoord:
    """Return the box of ``G_c`` containing point ``p``."""
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    if not (c > 0 and math.isfinite(c)):
        raise ValueError(f"box side must be a positive finite number, got {c!r}")
    return BoxCoord(_axis_index(x, c), _axis_index(y, c), float(c))


def boxes_of(positions: np.ndarray, c: float) -> np.ndarray:
    """Vectorised :func:`box_of`: integer array of shape ``(n, 2)``."""
    if not (c > 0 and math.isfinite(c)):
        raise ValueError(f"box side must be a positive finite number, got {c!r}")
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(pos)):
        raise ValueError("non-finite coordinates")
    idx = np.floor(pos / c)
    idx -= idx * c > pos
    idx += (idx + 1) * c <= pos
    return idx.astype(np.int64)


def _same_side(a: BoxCoord, b: BoxCoord) -> None:
    if a.c != b.c:
        raise ValueError(f"boxes come from different grids (c={a.c} vs c={b.c})")


def adjacent(a: BoxCoord, b: BoxCoord) -> bool:
    _same_side(a, b)
    return abs(a.i - b.i) <= 1 and abs(a.j - b.j) <= 1


def _segment_max_distance(i1: int, i2: int) -> int:
    # segments [i1, i1+1) and [i2, i2+1) in units of the box side
    if i1 == i2:
        return 0
    j1, j2 = i1 + 1, i2 + 1
    return min(abs(i1 - j2), abs(i2 - j1))


def dist_m(a: BoxCoord, b: BoxCoord) -> int:
    """Max-distance between two boxes of one grid, in box sides.

    Per axis: 0 when the projections intersect, otherwise
    ``min(|i1 - j2|, |i2 - j1|)`` for projections ``[i1, j1)`` and
    ``[i2, j2)``.  The box max-distance is the larger of the two axes.
    """
    _same_side(a, b)
    return max(_segment_max_distance(a.i, b.i), _segment_max_distance(a.j, b.j))


def dilution_class(b: BoxCoord, d: int) -> tuple[int, int]:
    if d < 1:
        raise ValueError(f"dilution factor must be >= 1, got {d}")
    return (b.i % d, b.j % d)


def min_pairwise_distance(positions) -> float:
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pos) < 2:
        return math.inf
    return float(pdist(pos).min())


def granularity(net) -> float:
    """Inverse of the minimum pairwise distance (1 for a single station).

    ``net`` is a :class:`~sinrcast.sinr.Network` or an ``(n, 2)`` array.
    """
    pos = getattr(net, "positions", net)
    dmin = min_pairwise_distance(pos)
    if dmin == math.inf:
        return 1.0
    if dmin == 0.0:
        raise ValueError("invalid network: two stations share a position")
    return 1.0 / dmin
