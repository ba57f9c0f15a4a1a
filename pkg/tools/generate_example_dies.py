#!/usr/bin/env python3
"""Regenerate the example die files under docs/examples/.

Builds a symmetric four-cavity, four-ports-per-cavity die around square
tube profiles, then sizes the ports (scaling each about its centroid, which
keeps centroids and distances fixed) until every port sits at verification
value ~0. Writes the balanced die plus an unbalanced variant with the outer
ports oversized and the inner ports undersized.

Run from the repository root:  python3 tools/generate_example_dies.py
"""

import math
from pathlib import Path

from portbalance import (
    DieDesign,
    ModelCoefficients,
    Point2,
    Polygon,
    Port,
    ProfileZone,
    check_die,
    eval_linear,
    extract_port_variables,
    polygon_centroid,
    save_die,
    solve_area_deltas,
)

OUT_DIR = Path(__file__).resolve().parent.parent / "docs" / "examples"

CAVITY_RADIUS = 82.0  # cavity centre distance from die centre, mm
TUBE_HALF = 20.0      # profile outer half-width
TUBE_WALL = 3.0
PORT_OFFSET = 26.0    # port centre distance from cavity centre
DEPTH_MM = 45.0


def octagon(cx, cy, half_w, half_h, chamfer):
    return [
        (cx - half_w + chamfer, cy - half_h),
        (cx + half_w - chamfer, cy - half_h),
        (cx + half_w, cy - half_h + chamfer),
        (cx + half_w, cy + half_h - chamfer),
        (cx + half_w - chamfer, cy + half_h),
        (cx - half_w + chamfer, cy + half_h),
        (cx - half_w, cy + half_h - chamfer),
        (cx - half_w, cy - half_h + chamfer),
    ]


def rot90(points, times):
    out = points
    for _ in range(times % 4):
        out = [(-y, x) for x, y in out]
    return out


def scale_about_centroid(points, factor):
    poly = Polygon(points)
    c = polygon_centroid(poly)
    return [(c.x + factor * (x - c.x), c.y + factor * (y - c.y)) for x, y in points]


def rounded(points, digits=3):
    return [(round(x, digits), round(y, digits)) for x, y in points]


def tube_zones(cx, cy):
    """Split a mitred square tube (picture-frame corners) into 4 trapezoids:
    right, top, left, bottom."""
    a, b = TUBE_HALF, TUBE_HALF - TUBE_WALL
    right = [(cx + a, cy - a), (cx + a, cy + a), (cx + b, cy + b), (cx + b, cy - b)]
    # rotate the right trapezoid about the cavity centre for top/left/bottom
    zones = [right]
    for k in range(1, 4):
        rel = [(x - cx, y - cy) for x, y in right]
        rel = rot90(rel, k)
        zones.append([(cx + x, cy + y) for x, y in rel])
    return zones  # order: right, top, left, bottom


def cavity_ports(scales):
    """Ports of the +x cavity: outer, top, inner, bottom, with per-position
    area scale factors applied."""
    cx, cy = CAVITY_RADIUS, 0.0
    zones = tube_zones(cx, cy)
    # port centres aligned with each zone: right (outer), top, left (inner), bottom
    positions = [
        (cx + PORT_OFFSET, cy, "outer"),
        (cx, cy + PORT_OFFSET, "top"),
        (cx - PORT_OFFSET, cy, "inner"),
        (cx, cy - PORT_OFFSET, "bottom"),
    ]
    ports = []
    for (px, py, tag), zone, scale in zip(positions, zones, scales):
        base = octagon(px, py, 15.0, 11.0, 4.0)
        shape = scale_about_centroid(base, math.sqrt(scale))
        ports.append((tag, rounded(shape), rounded(zone)))
    return ports


def build_die(name, scales):
    cavities = []
    base = cavity_ports(scales)
    for ci in range(4):
        ports = []
        for tag, shape, zone in base:
            ports.append(
                Port(
                    id=f"c{ci + 1}-{tag}",
                    geometry=Polygon(rot90(shape, ci)),
                    profile_zone=ProfileZone([rot90(zone, ci)]),
                    depth=DEPTH_MM,
                )
            )
        cavities.append(tuple(ports))
    return DieDesign(
        name=name,
        cavities=tuple(cavities),
        centre=Point2(0.0, 0.0),
        container_diameter=203.2,
        max_pressure=22000.0,
    )


def balance_scales():
    c = ModelCoefficients.default_linear()
    scales = [1.0, 1.0, 1.0, 1.0]
    for _ in range(20):
        die = build_die("tuning", scales)
        variables = extract_port_variables(die)
        values = [eval_linear(v, c) for v in variables]
        worst = max(abs(v) for v in values)
        if worst < 0.05:
            break
        deltas = solve_area_deltas(values, c)
        # all four cavities are congruent; use cavity 1's ports
        for i in range(4):
            area = variables[i].area
            scales[i] *= (area + deltas[i]) / area
    return scales


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    c = ModelCoefficients.default_linear()

    scales = balance_scales()
    balanced = build_die("demo-balanced", scales)
    report = check_die(balanced, c)
    print("balanced die values:",
          [f"{p.port_id}={p.value:.2f}" for p in report.ports[:4]], "...")
    assert report.all_in_tolerance
    save_die(balanced, OUT_DIR / "balanced_die.json")

    # outer ports ~8% oversized, inner ~8% undersized
    off = [scales[0] * 1.08, scales[1], scales[2] * 0.92, scales[3]]
    unbalanced = build_die("demo-unbalanced", off)
    report = check_die(unbalanced, c)
    print("unbalanced die values:",
          [f"{p.port_id}={p.value:.2f}" for p in report.ports[:4]], "...")
    assert not report.all_in_tolerance
    flagged = [p.port_id for p in report.ports if not p.in_tolerance]
    print("flagged:", flagged)
    save_die(unbalanced, OUT_DIR / "unbalanced_die.json")


if __name__ == "__main__":
    main()
