"""Planar geometry for porthole die port layouts.

All coordinates are millimetres in the die face plane; areas are mm^2.
A polygon is a closed ring given as an ordered vertex list (the edge from
the last vertex back to the first is implied). Winding order is accepted
either way, so CAD exports need no normalising; area-like quantities are
always reported as absolute values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "GeometryError",
    "Point2",
    "Polygon",
    "ProfileZone",
    "Port",
    "DieDesign",
    "PortVariables",
    "polygon_area",
    "polygon_perimeter",
    "polygon_centroid",
    "zone_area",
    "zone_perimeter",
    "zone_centroid",
    "point_in_polygon",
    "extract_port_variables",
]

STANDARD_CAVITY_COUNT = 4
STANDARD_PORTS_PER_CAVITY = 4


class GeometryError(ValueError):
    """Degenerate or self-intersecting input geometry."""


@dataclass(frozen=True)
class Point2:
    """A point in the die face plane (mm)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinate ({self.x!r}, {self.y!r})")

    def distance_to(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def _as_point(value) -> Point2:
    if isinstance(value, Point2):
        return value
    x, y = value
    return Point2(float(x), float(y))


def _orient(a: Point2, b: Point2, c: Point2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _in_bbox(a: Point2, b: Point2, p: Point2) -> bool:
    return (
        min(a.x, b.x) <= p.x <= max(a.x, b.x)
        and min(a.y, b.y) <= p.y <= max(a.y, b.y)
    )


def _segments_intersect(p1: Point2, p2: Point2, p3: Point2, p4: Point2) -> bool:
    """True if closed segments p1p2 and p3p4 share any point."""
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True
    if d1 == 0 and _in_bbox(p3, p4, p1):
        return True
    if d2 == 0 and _in_bbox(p3, p4, p2):
        return True
    if d3 == 0 and _in_bbox(p1, p2, p3):
        return True
    if d4 == 0 and _in_bbox(p1, p2, p4):
        return True
    return False


@dataclass(frozen=True)
class Polygon:
    """Simple closed polygon.

    A duplicated closing vertex (first point repeated at the end, as many
    CAD exporters write) is dropped on construction. Construction validates
    that the ring has at least three distinct vertices, nonzero area, and
    no self-intersections.
    """

    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable) -> None:
        pts = [_as_point(v) for v in vertices]
        if len(pts) >= 2 and pts[0] == pts[-1]:
            pts = pts[:-1]
        object.__setattr__(self, "vertices", tuple(pts))
        self._validate()

    def _validate(self) -> None:
        pts = self.vertices
        n = len(pts)
        if n < 3:
            raise GeometryError(f"polygon needs at least 3 vertices, got {n}")
        for i in range(n):
            if pts[i] == pts[(i + 1) % n]:
                raise GeometryError(
                    f"coincident consecutive vertices at index {i}: {pts[i]}"
                )
        if _signed_area(pts) == 0.0:
            raise GeometryError("polygon has zero area")
        # A spike (outgoing edge doubling back along the incoming one) makes
        # adjacent edges overlap, which the pairwise test below cannot see.
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            ux, uy = b.x - a.x, b.y - a.y
            vx, vy = c.x - b.x, c.y - b.y
            if ux * vy - uy * vx == 0.0 and ux * vx + uy * vy < 0.0:
                raise GeometryError(f"degenerate spike at vertex {i}: {b}")
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]):
                    raise GeometryError(
                        f"self-intersecting polygon: edge {i} crosses edge {j}"
                    )


def _signed_area(pts: Sequence[Point2]) -> float:
    n = len(pts)
    return 0.5 * math.fsum(
        pts[i].x * pts[(i + 1) % n].y - pts[(i + 1) % n].x * pts[i].y for i in range(n)
    )


def polygon_area(p: Polygon) -> float:
    """Enclosed area (mm^2), independent of winding order."""
    return abs(_signed_area(p.vertices))


def polygon_perimeter(p: Polygon) -> float:
    """Total edge length of the closed ring (mm)."""
    pts = p.vertices
    n = len(pts)
    return math.fsum(pts[i].distance_to(pts[(i + 1) % n]) for i in range(n))


def polygon_centroid(p: Polygon) -> Point2:
    """Area-weighted centroid, independent of winding order."""
    pts = p.vertices
    n = len(pts)
    a = _signed_area(pts)
    if a == 0.0:
        raise GeometryError("centroid undefined for zero-area polygon")
    cx = math.fsum(
        (pts[i].x + pts[(i + 1) % n].x)
        * (pts[i].x * pts[(i + 1) % n].y - pts[(i + 1) % n].x * pts[i].y)
        for i in range(n)
    )
    cy = math.fsum(
        (pts[i].y + pts[(i + 1) % n].y)
        * (pts[i].x * pts[(i + 1) % n].y - pts[(i + 1) % n].x * pts[i].y)
        for i in range(n)
    )
    return Point2(cx / (6.0 * a), cy / (6.0 * a))


def point_in_polygon(point: Point2, polygon: Polygon) -> bool:
    """Even-odd ray cast. Points exactly on the boundary are not guaranteed
    either way."""
    pts = polygon.vertices
    n = len(pts)
    inside = False
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        if (a.y > point.y) != (b.y > point.y):
            x_cross = a.x + (point.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if point.x < x_cross:
                inside = not inside
    return inside


@dataclass(frozen=True)
class ProfileZone:
    """Portion of the extruded profile fed by one port.

    The first boundary is the outer contour; any further boundaries are
    holes and must lie strictly inside the outer contour.
    """

    boundaries: tuple[Polygon, ...]

    def __init__(self, boundaries: Iterable) -> None:
        polys = tuple(
            b if isinstance(b, Polygon) else Polygon(b) for b in boundaries
        )
        object.__setattr__(self, "boundaries", polys)
        self._validate()

    def _validate(self) -> None:
        if not self.boundaries:
            raise GeometryError("profile zone needs at least one boundary")
        outer = self.boundaries[0]
        outer_pts = outer.vertices
        for k, hole in enumerate(self.boundaries[1:], start=1):
            for v in hole.vertices:
                if not point_in_polygon(v, outer):
                    raise GeometryError(
                        f"hole boundary {k} is not inside the outer boundary"
                    )
            hn = len(hole.vertices)
            on = len(outer_pts)
            for i in range(hn):
                for j in range(on):
                    if _segments_intersect(
                        hole.vertices[i],
                        hole.vertices[(i + 1) % hn],
                        outer_pts[j],
                        outer_pts[(j + 1) % on],
                    ):
                        raise GeometryError(
                            f"hole boundary {k} crosses the outer boundary"
                        )
        if zone_area(self) <= 0.0:
            raise GeometryError("zone area must be positive (holes exceed outer)")

    @property
    def outer(self) -> Polygon:
        return self.boundaries[0]

    @property
    def holes(self) -> tuple[Polygon, ...]:
        return self.boundaries[1:]


def zone_area(z: ProfileZone) -> float:
    """Outer area minus hole areas (mm^2)."""
    return polygon_area(z.outer) - math.fsum(polygon_area(h) for h in z.holes)


def zone_perimeter(z: ProfileZone) -> float:
    """Sum of all boundary ring lengths, outer and holes (mm)."""
    return math.fsum(polygon_perimeter(b) for b in z.boundaries)


def zone_centroid(z: ProfileZone) -> Point2:
    """Centroid of the zone with hole areas subtracted."""
    outer_a = polygon_area(z.outer)
    outer_c = polygon_centroid(z.outer)
    mx = outer_a * outer_c.x
    my = outer_a * outer_c.y
    total = outer_a
    for h in z.holes:
        a = polygon_area(h)
        c = polygon_centroid(h)
        mx -= a * c.x
        my -= a * c.y
        total -= a
    if total <= 0.0:
        raise GeometryError("zone centroid undefined: nonpositive net area")
    return Point2(mx / total, my / total)


@dataclass(frozen=True)
class Port:
    """One milled opening in the mandrel, paired with the profile zone it feeds.

    Depth is recorded for datasets but plays no part in the balancing model.
    """

    id: str
    geometry: Polygon
    profile_zone: ProfileZone
    depth: float | None = None

    def __post_init__(self) -> None:
        if self.depth is not None and not self.depth > 0:
            raise GeometryError(f"port {self.id!r}: depth must be positive, got {self.depth}")


@dataclass(frozen=True)
class DieDesign:
    """A die: cavities of ports around a common centre.

    Any cavity/port layout is accepted on load; the model layer warns when
    the layout is not the four-cavity, four-ports-per-cavity class the
    shipped coefficients were derived for.
    """

    name: str
    cavities: tuple[tuple[Port, ...], ...]
    centre: Point2 = Point2(0.0, 0.0)
    container_diameter: float | None = None
    max_pressure: float | None = None

    def __post_init__(self) -> None:
        cavities = tuple(tuple(cavity) for cavity in self.cavities)
        object.__setattr__(self, "cavities", cavities)
        seen: set[str] = set()
        for port in self.all_ports():
            if port.id in seen:
                raise GeometryError(f"duplicate port id {port.id!r}")
            seen.add(port.id)

    def all_ports(self) -> tuple[Port, ...]:
        return tuple(port for cavity in self.cavities for port in cavity)

    @property
    def is_standard_layout(self) -> bool:
        return len(self.cavities) == STANDARD_CAVITY_COUNT and all(
            len(c) == STANDARD_PORTS_PER_CAVITY for c in self.cavities
        )

    def layout_warnings(self) -> list[str]:
        if self.is_standard_layout:
            return []
        shape = "x".join(str(len(c)) for c in self.cavities) or "empty"
        return [
            f"die {self.name!r} has {len(self.cavities)} cavities with {shape} ports; "
            f"the shipped coefficients are only validated for "
            f"{STANDARD_CAVITY_COUNT} cavities of {STANDARD_PORTS_PER_CAVITY} ports"
        ]


@dataclass(frozen=True)
class PortVariables:
    """Per-port regressors plus the die-level totals they share.

    perimeter and perim_total are recorded but unused by the balancing
    models (perimeter tracks area too closely to add information).
    """

    area: float
    dist: float
    area_prof: float
    perim_prof: float
    dist_port_prof: float
    area_total: float
    perimeter: float
    perim_total: float


def extract_port_variables(d: DieDesign) -> list[PortVariables]:
    """Measure every port of the die, in die order.

    Returns one PortVariables per port: port area/perimeter, distance from
    port centroid to die centre, zone area/perimeter, distance from port
    centroid to zone centroid, and the shared die totals. Totals use exact
    summation, so they do not depend on port ordering.
    """
    ports = d.all_ports()
    if not ports:
        raise GeometryError(f"die {d.name!r} has no ports")
    areas = [polygon_area(p.geometry) for p in ports]
    perimeters = [polygon_perimeter(p.geometry) for p in ports]
    area_total = math.fsum(areas)
    perim_total = math.fsum(perimeters)
    out: list[PortVariables] = []
    for port, area, perimeter in zip(ports, areas, perimeters):
        centre = polygon_centroid(port.geometry)
        zc = zone_centroid(port.profile_zone)
        out.append(
            PortVariables(
                area=area,
                dist=centre.distance_to(d.centre),
                area_prof=zone_area(port.profile_zone),
                perim_prof=zone_perimeter(port.profile_zone),
                dist_port_prof=centre.distance_to(zc),
                area_total=area_total,
                perimeter=perimeter,
                perim_total=perim_total,
            )
        )
    return out
