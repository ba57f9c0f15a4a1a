"""Shared test builders and independent oracles.

Oracles here deliberately use different computation paths than the library
(normal equations instead of lstsq, fixed-point iteration instead of the
closed form, analytic decompositions instead of the shoelace) so that
agreement is evidence, not tautology.
"""

import math

import numpy as np

from portbalance import Dataset, DieDesign, Polygon, Port, ProfileZone

# Published coefficient sets the synthetic generators reproduce. Kept as
# plain dicts so generator arithmetic is independent of ModelCoefficients.
LINEAR_TRUTH = {
    "intercept": -25.048,
    "dist": 5.072,
    "area_total": 0.012,
    "area_prof": 0.593,
    "dist_port_prof": 10.358,
    "perim_prof": 1.211,
}
LOG_TRUTH = {
    "intercept": 0.956,
    "dist": 0.479,
    "area_total": 0.304,
    "perim_prof": 0.111,
    "dist_port_prof": 0.120,
}

CSV_HEADERS = {
    "area": "area_mm2",
    "perimeter": "perimeter_mm",
    "dist": "dist_mm",
    "area_prof": "area_prof_mm2",
    "perim_prof": "perim_prof_mm",
    "dist_port_prof": "dist_port_prof_mm",
    "depth": "depth_mm",
    "area_total": "area_total_mm2",
    "perim_total": "perim_total_mm2",
    "container_diameter": "container_diameter_mm",
    "max_pressure": "max_pressure",
}

ALL_CANDIDATES = (
    "dist",
    "area_total",
    "area_prof",
    "perim_prof",
    "dist_port_prof",
    "perimeter",
    "perim_total",
    "depth",
    "container_diameter",
    "max_pressure",
)


# ---------------------------------------------------------------- geometry

def square(cx, cy, side):
    h = side / 2.0
    return [(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)]


def rotate(points, angle, cx=0.0, cy=0.0):
    c, s = math.cos(angle), math.sin(angle)
    return [
        (cx + c * (x - cx) - s * (y - cy), cy + s * (x - cx) + c * (y - cy))
        for x, y in points
    ]


def rot90(points, times=1):
    out = list(points)
    for _ in range(times % 4):
        out = [(-y, x) for x, y in out]
    return out


def translate(points, dx, dy):
    return [(x + dx, y + dy) for x, y in points]


def reflect_through_origin(points):
    return [(-x, -y) for x, y in points]


def random_simple_polygon(rng, n_min=3, n_max=12, radius=(0.5, 10.0)):
    """Star-shaped polygon about the origin. Angular gaps are kept below
    pi (gap weights in [0.5, 1.0]), which guarantees a simple ring."""
    n = int(rng.integers(n_min, n_max + 1))
    gaps = rng.uniform(0.5, 1.0, n)
    angles = np.cumsum(gaps) * (2.0 * math.pi / gaps.sum()) + rng.uniform(0, 2 * math.pi)
    radii = rng.uniform(radius[0], radius[1], n)
    return [(r * math.cos(a), r * math.sin(a)) for a, r in zip(angles, radii)]


def convex_hull(points):
    """Andrew monotone chain; returns hull vertices counter-clockwise."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def point_in_convex_hull(point, hull, slack=1e-9):
    n = len(hull)
    for i in range(n):
        ax, ay = hull[i]
        bx, by = hull[(i + 1) % n]
        cross = (bx - ax) * (point[1] - ay) - (by - ay) * (point[0] - ax)
        scale = math.hypot(bx - ax, by - ay)
        if cross < -slack * max(scale, 1.0):
            return False
    return True


# --------------------------------------------------------------- die builders

def simple_port(pid, cx, cy, side=10.0, zone_cx=None, zone_cy=None, zone_side=20.0,
                depth=45.0):
    zone_cx = cx + 30.0 if zone_cx is None else zone_cx
    zone_cy = cy if zone_cy is None else zone_cy
    return Port(
        id=pid,
        geometry=Polygon(square(cx, cy, side)),
        profile_zone=ProfileZone([square(zone_cx, zone_cy, zone_side)]),
        depth=depth,
    )


def single_port_die(name="one-port", cx=50.0, cy=0.0, side=10.0):
    return DieDesign(name=name, cavities=((simple_port("p1", cx, cy, side),),))


def symmetric_die(name="sym"):
    """Four cavities of four ports, cavities exact 90-degree rotations of the
    first (sign-swap rotations, so symmetric ports measure bitwise equal)."""
    base = [
        ("outer", square(108.0, 0.0, 30.0), square(100.0, 0.0, 16.0)),
        ("top", square(82.0, 26.0, 28.0), square(82.0, 20.0, 16.0)),
        ("inner", square(56.0, 0.0, 24.0), square(64.0, 0.0, 16.0)),
        ("bottom", square(82.0, -26.0, 28.0), square(82.0, -20.0, 16.0)),
    ]
    cavities = []
    for k in range(4):
        ports = tuple(
            Port(
                id=f"c{k + 1}-{tag}",
                geometry=Polygon(rot90(shape, k)),
                profile_zone=ProfileZone([rot90(zone, k)]),
                depth=45.0,
            )
            for tag, shape, zone in base
        )
        cavities.append(ports)
    return DieDesign(name=name, cavities=tuple(cavities))


# ------------------------------------------------------------- regression oracles

def normal_equations_fit(X, y):
    """Brute-force OLS coefficients (intercept first) via the normal equations."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    d = np.column_stack([np.ones(len(y)), X])
    return np.linalg.solve(d.T @ d, d.T @ np.asarray(y, dtype=float))


def residualize_oracle(v, others):
    v = np.asarray(v, dtype=float)
    others = np.asarray(others, dtype=float)
    if others.ndim == 1:
        others = others.reshape(-1, 1)
    if others.shape[1] == 0:
        return v - v.mean()
    coef = normal_equations_fit(others, v)
    d = np.column_stack([np.ones(len(v)), others])
    return v - d @ coef


def pearson(a, b):
    a = np.asarray(a, dtype=float) - np.mean(a)
    b = np.asarray(b, dtype=float) - np.mean(b)
    return float(a @ b / math.sqrt((a @ a) * (b @ b)))


def partial_corr_oracle(x, y, others):
    return pearson(residualize_oracle(x, others), residualize_oracle(y, others))


def semipartial_corr_oracle(x, y, others):
    return pearson(residualize_oracle(x, others), y)


def damped_iteration_deltas(values, coef_area_total, eta=0.5, iters=100000,
                            tol=1e-13):
    """Fixed-point oracle for the rebalance solve: step each delta toward the
    residual until every re-evaluated value vanishes."""
    values = np.asarray(values, dtype=float)
    deltas = np.zeros_like(values)
    for _ in range(iters):
        residual = values - deltas + coef_area_total * deltas.sum()
        if np.max(np.abs(residual)) < tol:
            break
        deltas = deltas + eta * residual
    return deltas


# ------------------------------------------------------------- synthetic data

def synthetic_columns(rng, n):
    """Plausible port-variable draws for all ten candidate regressors."""
    return {
        "dist": rng.uniform(40.0, 140.0, n),
        "area_total": rng.uniform(8000.0, 16000.0, n),
        "area_prof": rng.uniform(50.0, 500.0, n),
        "perim_prof": rng.uniform(60.0, 160.0, n),
        "dist_port_prof": rng.uniform(2.0, 25.0, n),
        "perimeter": rng.uniform(80.0, 220.0, n),
        "perim_total": rng.uniform(1500.0, 3000.0, n),
        "depth": rng.uniform(40.0, 50.0, n),
        "container_diameter": rng.choice([177.8, 203.2], n),
        "max_pressure": rng.uniform(16000.0, 22000.0, n),
    }


def linear_response(cols):
    t = LINEAR_TRUTH
    return (
        t["intercept"]
        + t["dist"] * cols["dist"]
        + t["area_total"] * cols["area_total"]
        + t["area_prof"] * cols["area_prof"]
        + t["dist_port_prof"] * cols["dist_port_prof"]
        + t["perim_prof"] * cols["perim_prof"]
    )


def log_response(cols):
    t = LOG_TRUTH
    return np.exp(
        t["intercept"]
        + t["dist"] * np.log(cols["dist"])
        + t["area_total"] * np.log(cols["area_total"])
        + t["perim_prof"] * np.log(cols["perim_prof"])
        + t["dist_port_prof"] * np.log(cols["dist_port_prof"])
    )


def make_dataset(cols, y, candidates=ALL_CANDIDATES):
    names = tuple(c for c in candidates if c in cols)
    return Dataset(
        response=np.asarray(y, dtype=float),
        columns=names,
        regressors=np.column_stack([cols[name] for name in names]),
    )


def write_dataset_csv(path, cols, y):
    """Write columns/response in the dataset file layout."""
    n = len(y)
    headers = ["die_id", "port_id"]
    fields = ["area"] + [c for c in ALL_CANDIDATES if c in cols]
    headers += [CSV_HEADERS[f] for f in fields]
    with open(path, "w") as fh:
        fh.write(",".join(headers) + "\n")
        for i in range(n):
            row = [f"d{i // 16 + 1}", f"p{i % 16 + 1}"]
            row.append(repr(float(y[i])))
            for c in fields[1:]:
                row.append(repr(float(cols[c][i])))
            fh.write(",".join(row) + "\n")
