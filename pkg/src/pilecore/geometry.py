"""2D primitives shared by grouping, hit-testing, and the lasso tool."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import PolygonError

Vec2 = tuple[float, float]


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle, (x0, y0) top-left inclusive."""

    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def center(self) -> Vec2:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def contains(self, p: Vec2) -> bool:
        return self.x0 <= p[0] <= self.x1 and self.y0 <= p[1] <= self.y1

    def union(self, other: "Rect") -> "Rect":
        return Rect(
            min(self.x0, other.x0),
            min(self.y0, other.y0),
            max(self.x1, other.x1),
            max(self.y1, other.y1),
        )


def rect_around(center: Vec2, width: float, height: float) -> Rect:
    return Rect(center[0] - width / 2.0, center[1] - height / 2.0,
                center[0] + width / 2.0, center[1] + height / 2.0)


def overlap_amount(a: Rect, b: Rect) -> float:
    """Smaller of the x- and y-overlap between two rectangles.

    Positive means the boxes intersect by that many units; zero means they
    touch; negative is the separation gap along the wider-gap axis.
    """
    ox = min(a.x1, b.x1) - max(a.x0, b.x0)
    oy = min(a.y1, b.y1) - max(a.y0, b.y0)
    return min(ox, oy)


def rects_overlap(a: Rect, b: Rect) -> bool:
    return overlap_amount(a, b) > 0.0


def point_in_polygon(point: Vec2, polygon: Sequence[Vec2]) -> bool:
    """Even-odd containment test; the polygon is implicitly closed.

    Classic edge-crossing parity: walk the edges and flip a flag on every edge
    whose half-open y-span covers the query and whose x-intersection with the
    horizontal through the query lies strictly right of it. Self-intersecting
    polygons therefore exclude even-winding regions.
    """
    if len(polygon) < 3:
        raise PolygonError("polygon needs at least 3 vertices")
    px, py = point
    inside = False
    n = len(polygon)
    for i in range(n):
        x0, y0 = polygon[i]
        x1, y1 = polygon[(i + 1) % n]
        if (y0 <= py) != (y1 <= py):
            x_cross = x0 + (py - y0) / (y1 - y0) * (x1 - x0)
            if px < x_cross:
                inside = not inside
    return inside


class UnionFind:
    """Disjoint sets over arbitrary hashable keys, path-halving + union by size."""

    def __init__(self, keys: Sequence = ()):  # noqa: D401 - short container
        self._parent: dict = {k: k for k in keys}
        self._size: dict = {k: 1 for k in keys}

    def add(self, key) -> None:
        if key not in self._parent:
            self._parent[key] = key
            self._size[key] = 1

    def find(self, key):
        parent = self._parent
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]

    def components(self) -> list[list]:
        """Members grouped by root, each group and the list of groups sorted."""
        groups: dict = {}
        for key in self._parent:
            groups.setdefault(self.find(key), []).append(key)
        out = [sorted(members) for members in groups.values()]
        out.sort(key=lambda g: g[0])
        return out
