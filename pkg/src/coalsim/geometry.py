"""Planar geometry primitives: points, discs, fire-zone polygons, coverage
fractions, and sector anchor computation.

All shapes live in a square service field [0, L] x [0, L] (meters). Functions
here are pure and deterministic; nothing keeps mutable state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import numpy as np

# Absolute tolerance (meters) for "point lies on a polygon edge" tests.
_EDGE_TOL = 1e-9

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Point2D:
    """A point in the plane, coordinates in meters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Disc:
    """A closed disc: the circular coverage region of one coalition."""

    center: Point2D
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"disc radius must be positive and finite, got {self.radius}")


def distance(a: Point2D, b: Point2D) -> float:
    """Euclidean distance between two points, in meters."""
    return math.hypot(a.x - b.x, a.y - b.y)


def polygon_area(vertices: Sequence[Point2D]) -> float:
    """Unsigned area of a polygon given its ordered vertices (shoelace)."""
    n = len(vertices)
    acc = 0.0
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        acc += a.x * b.y - b.x * a.y
    return abs(acc) / 2.0


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    # Within _EDGE_TOL meters of the closed segment.
    dx, dy = x2 - x1, y2 - y1
    seg_len = math.hypot(dx, dy)
    if seg_len == 0.0:
        return math.hypot(px - x1, py - y1) <= _EDGE_TOL
    cross = dx * (py - y1) - dy * (px - x1)
    if abs(cross) > _EDGE_TOL * seg_len:
        return False
    dot = (px - x1) * dx + (py - y1) * dy
    return -_EDGE_TOL * seg_len <= dot <= seg_len * seg_len + _EDGE_TOL * seg_len


def point_in_polygon(point: Point2D, vertices: Sequence[Point2D]) -> bool:
    """Even-odd ray-casting membership test; points on the boundary count as inside."""
    px, py = point.x, point.y
    n = len(vertices)
    inside = False
    for i in range(n):
        x1, y1 = vertices[i].x, vertices[i].y
        x2, y2 = vertices[(i + 1) % n].x, vertices[(i + 1) % n].y
        if _on_segment(px, py, x1, y1, x2, y2):
            return True
        if (y1 > py) != (y2 > py):
            x_int = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_int:
                inside = not inside
    return inside


def _segments_properly_intersect(
    p1: Tuple[float, float],
    p2: Tuple[float, float],
    q1: Tuple[float, float],
    q2: Tuple[float, float],
) -> bool:
    # True when the open interiors of the two segments cross or overlap.
    def orient(a, b, c) -> float:
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_seg(a, b, c) -> bool:
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def _polygon_is_simple(vertices: Sequence[Point2D]) -> bool:
    n = len(vertices)
    pts = [(v.x, v.y) for v in vertices]
    for i in range(n):
        if pts[i] == pts[(i + 1) % n]:
            return False  # zero-length edge
    for i in range(n):
        a1, a2 = pts[i], pts[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # adjacent edges share an endpoint by construction
            b1, b2 = pts[j], pts[(j + 1) % n]
            if _segments_properly_intersect(a1, a2, b1, b2):
                return False
    return True


@dataclass(frozen=True)
class FireZone:
    """Polygonal burn area over the square service field of side ``field_side``.

    The boundary must be a simple polygon with at least three vertices, all
    inside the field, enclosing positive area.
    """

    boundary: Tuple[Point2D, ...]
    field_side: float
    _edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        boundary = tuple(self.boundary)
        object.__setattr__(self, "boundary", boundary)
        if len(boundary) < 3:
            raise ValueError("fire zone needs at least 3 vertices")
        if not (self.field_side > 0.0 and math.isfinite(self.field_side)):
            raise ValueError(f"field side must be positive, got {self.field_side}")
        for v in boundary:
            if not (0.0 <= v.x <= self.field_side and 0.0 <= v.y <= self.field_side):
                raise ValueError(f"vertex {v} outside the [0, {self.field_side}]^2 field")
        if polygon_area(boundary) <= 0.0:
            raise ValueError("fire zone polygon has zero area")
        if not _polygon_is_simple(boundary):
            raise ValueError("fire zone polygon is self-intersecting")
        # Edge table (x1, y1, x2, y2) cached for vectorized membership tests.
        pts = [(v.x, v.y) for v in boundary]
        edges = np.array(
            [[*pts[i], *pts[(i + 1) % len(pts)]] for i in range(len(pts))], dtype=float
        )
        object.__setattr__(self, "_edges", edges)

    @property
    def area(self) -> float:
        return polygon_area(self.boundary)

    @property
    def centroid(self) -> Point2D:
        """Area centroid of the polygon."""
        acc_x = acc_y = acc_a = 0.0
        n = len(self.boundary)
        for i in range(n):
            a = self.boundary[i]
            b = self.boundary[(i + 1) % n]
            w = a.x * b.y - b.x * a.y
            acc_x += (a.x + b.x) * w
            acc_y += (a.y + b.y) * w
            acc_a += w
        return Point2D(acc_x / (3.0 * acc_a), acc_y / (3.0 * acc_a))

    def contains_points(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Vectorized membership test, boundary-inclusive, matching point_in_polygon."""
        inside = np.zeros(xs.shape, dtype=bool)
        on_edge = np.zeros(xs.shape, dtype=bool)
        for x1, y1, x2, y2 in self._edges:
            dx, dy = x2 - x1, y2 - y1
            seg_len = math.hypot(dx, dy)
            cross = dx * (ys - y1) - dy * (xs - x1)
            dot = (xs - x1) * dx + (ys - y1) * dy
            on_edge |= (
                (np.abs(cross) <= _EDGE_TOL * seg_len)
                & (dot >= -_EDGE_TOL * seg_len)
                & (dot <= seg_len * seg_len + _EDGE_TOL * seg_len)
            )
            crosses = (y1 > ys) != (y2 > ys)
            denom = np.where(crosses, y2 - y1, 1.0)
            x_int = x1 + (ys - y1) * dx / denom
            inside ^= crosses & (xs < x_int)
        return inside | on_edge

    def contains(self, point: Point2D) -> bool:
        return point_in_polygon(point, self.boundary)

    def to_json_dict(self) -> dict:
        return {
            "field_side": self.field_side,
            "vertices": [[v.x, v.y] for v in self.boundary],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FireZone":
        vertices = tuple(Point2D(float(x), float(y)) for x, y in data["vertices"])
        return cls(boundary=vertices, field_side=float(data["field_side"]))


def coverage_fraction(disc: Disc, zone: FireZone, grid_resolution: int = 128) -> float:
    """Fraction of the disc's area that overlaps the fire zone.

    Computed on a regular grid_resolution x grid_resolution grid over the
    disc's bounding box: the ratio of cell centers inside both shapes to cell
    centers inside the disc. Deterministic for fixed inputs.
    """
    if grid_resolution < 16:
        raise ValueError(f"grid_resolution must be >= 16, got {grid_resolution}")
    if zone.area <= 0.0:
        raise ValueError("degenerate fire zone: zero area")
    cx, cy, r = disc.center.x, disc.center.y, disc.radius
    n = grid_resolution
    # Cell centers: c - r + (2r)(i + 0.5)/n along each axis.
    offs = -r + (2.0 * r) * (np.arange(n) + 0.5) / n
    gx, gy = np.meshgrid(cx + offs, cy + offs)
    gx = gx.ravel()
    gy = gy.ravel()
    in_disc = (gx - cx) ** 2 + (gy - cy) ** 2 <= r * r
    disc_count = int(in_disc.sum())
    in_zone = zone.contains_points(gx[in_disc], gy[in_disc])
    return float(in_zone.sum()) / disc_count


def sector_anchors(disc: Disc, s_count: int, phase: float = 0.0) -> List[Point2D]:
    """Hover stations for the sector observers: the midpoint of each of the
    s_count equal arcs, i.e. points on the disc circle at angles
    phase + 2*pi*s/s_count for s = 0..s_count-1.
    """
    if s_count < 1:
        raise ValueError(f"s_count must be >= 1, got {s_count}")
    cx, cy, r = disc.center.x, disc.center.y, disc.radius
    anchors = []
    for s in range(s_count):
        theta = phase + TWO_PI * s / s_count
        anchors.append(Point2D(cx + r * math.cos(theta), cy + r * math.sin(theta)))
    return anchors


def _ray_box_distance(cx: float, cy: float, theta: float, side: float) -> float:
    # Distance from (cx, cy) to the [0, side]^2 boundary along direction theta.
    dx, dy = math.cos(theta), math.sin(theta)
    best = math.inf
    if dx > 0:
        best = min(best, (side - cx) / dx)
    elif dx < 0:
        best = min(best, (0.0 - cx) / dx)
    if dy > 0:
        best = min(best, (side - cy) / dy)
    elif dy < 0:
        best = min(best, (0.0 - cy) / dy)
    return best


def generate_fire_zone(field_side: float, rng_seed: int, complexity: int = 10) -> FireZone:
    """Produce a random star-shaped burn polygon, deterministic per seed.

    Draw order from the seeded generator: centroid x, centroid y (uniform in
    the central 60% of the field), then ``complexity`` vertex angles, then
    ``complexity`` vertex radii uniform in [0.1 L, 0.35 L]. Angles are sorted
    and radii paired by draw index; each radius is clipped along its ray so
    the vertex stays inside the field, which preserves star shape.
    """
    if complexity < 3:
        raise ValueError(f"complexity must be >= 3, got {complexity}")
    rng = random.Random(rng_seed)
    L = field_side
    cx = rng.uniform(0.2 * L, 0.8 * L)
    cy = rng.uniform(0.2 * L, 0.8 * L)
    angles = sorted(rng.uniform(0.0, TWO_PI) for _ in range(complexity))
    radii = [rng.uniform(0.1 * L, 0.35 * L) for _ in range(complexity)]
    vertices = []
    for theta, r in zip(angles, radii):
        r_clipped = min(r, _ray_box_distance(cx, cy, theta, L))
        vertices.append(Point2D(cx + r_clipped * math.cos(theta), cy + r_clipped * math.sin(theta)))
    return FireZone(boundary=tuple(vertices), field_side=L)
