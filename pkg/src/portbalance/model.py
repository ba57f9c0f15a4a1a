"""Port balancing verification models and area rebalancing.

The linear model scores each port in mm^2 as

    value = b0 - area + b_dist*dist + b_atot*area_total
            + b_aprof*area_prof + b_dpp*dist_port_prof + b_pprof*perim_prof

and a port counts as balanced when -tolerance < value < +tolerance
(strict bounds). The log model scores the dimensionless ratio

    exp(b0) * dist^e1 * area_total^e2 * perim_prof^e3 * dist_port_prof^e4 / area

which is 1.0 for a perfectly balanced port. A negative linear value (or a
ratio below 1) says the port area is larger than its surroundings call for
and should shrink; positive says grow.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Sequence

from .geometry import DieDesign, PortVariables, extract_port_variables

__all__ = [
    "LINEAR",
    "LOGLINEAR",
    "ModelCoefficients",
    "Adjustment",
    "PortCheck",
    "VerificationReport",
    "PortDelta",
    "eval_linear",
    "eval_loglinear",
    "suggest_adjustment",
    "check_die",
    "rebalance",
    "solve_area_deltas",
    "rebalanced_values",
]

LINEAR = "linear"
LOGLINEAR = "loglinear"


@dataclass(frozen=True)
class ModelCoefficients:
    """Coefficient set for one balancing model.

    Absent coefficients stay 0. For the linear kind, std_error is the
    regression's residual standard error and tolerance the accepted
    half-width of the verification band, both in mm^2. The defaults come
    from regressions over a library of proven four-cavity, four-port die
    designs; tolerance defaults to half the standard error, rounded.
    """

    kind: str
    intercept: float
    coef_dist: float = 0.0
    coef_area_total: float = 0.0
    coef_area_prof: float = 0.0
    coef_dist_port_prof: float = 0.0
    coef_perim_prof: float = 0.0
    std_error: float | None = None
    tolerance: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in (LINEAR, LOGLINEAR):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")

    @classmethod
    def default_linear(cls) -> "ModelCoefficients":
        return cls(
            kind=LINEAR,
            intercept=-25.048,
            coef_dist=5.072,
            coef_area_total=0.012,
            coef_area_prof=0.593,
            coef_dist_port_prof=10.358,
            coef_perim_prof=1.211,
            std_error=70.77,
            tolerance=35.0,
        )

    @classmethod
    def default_loglinear(cls) -> "ModelCoefficients":
        # area_prof carries no significant weight in log space; its
        # exponent stays 0.
        return cls(
            kind=LOGLINEAR,
            intercept=0.956,
            coef_dist=0.479,
            coef_area_total=0.304,
            coef_area_prof=0.0,
            coef_dist_port_prof=0.120,
            coef_perim_prof=0.111,
        )


def eval_linear(v: PortVariables, c: ModelCoefficients) -> float:
    """Linear verification value in mm^2 (0 = perfectly balanced)."""
    if c.kind != LINEAR:
        raise ValueError(f"eval_linear needs linear coefficients, got kind {c.kind!r}")
    return (
        c.intercept
        - v.area
        + c.coef_dist * v.dist
        + c.coef_area_total * v.area_total
        + c.coef_area_prof * v.area_prof
        + c.coef_dist_port_prof * v.dist_port_prof
        + c.coef_perim_prof * v.perim_prof
    )


_LOG_FACTORS = (
    ("dist", "coef_dist"),
    ("area_total", "coef_area_total"),
    ("perim_prof", "coef_perim_prof"),
    ("dist_port_prof", "coef_dist_port_prof"),
    ("area_prof", "coef_area_prof"),
)


def eval_loglinear(v: PortVariables, c: ModelCoefficients) -> float:
    """Predicted/actual area ratio of the log model (1 = perfectly balanced)."""
    if c.kind != LOGLINEAR:
        raise ValueError(f"eval_loglinear needs loglinear coefficients, got kind {c.kind!r}")
    if v.area <= 0:
        raise ValueError(f"area must be positive for the log model, got {v.area}")
    result = math.exp(c.intercept)
    for var_name, coef_name in _LOG_FACTORS:
        exponent = getattr(c, coef_name)
        if exponent == 0.0:
            continue
        value = getattr(v, var_name)
        if value <= 0:
            raise ValueError(f"{var_name} must be positive for the log model, got {value}")
        result *= value ** exponent
    return result / v.area


@dataclass(frozen=True)
class Adjustment:
    """Suggested area change: signed mm^2 delta and its unsigned percent of
    the current port area."""

    delta_area: float
    delta_percent: float


def suggest_adjustment(
    value: float,
    area: float,
    c: ModelCoefficients,
    target: str = "zero",
) -> Adjustment:
    """Area change that moves a linear verification value to the target.

    target="zero" drives the value to the centre of the acceptance band
    (new_area = area + value, since d(value)/d(area) = -1 with the totals
    held fixed). target="range_edge" is the minimal change, to the nearest
    tolerance bound; it is 0 for values already inside the band.
    """
    if not area > 0:
        raise ValueError(f"port area must be positive, got {area}")
    if target == "zero":
        delta = value
    elif target == "range_edge":
        tol = c.tolerance
        if tol is None:
            raise ValueError("range_edge target requires coefficients with a tolerance")
        if value > tol:
            delta = value - tol
        elif value < -tol:
            delta = value + tol
        else:
            delta = 0.0
    else:
        raise ValueError(f"unknown adjustment target {target!r}")
    return Adjustment(delta_area=delta, delta_percent=100.0 * abs(delta) / area)


@dataclass(frozen=True)
class PortCheck:
    port_id: str
    value: float
    in_tolerance: bool | None
    suggested_delta_area: float
    suggested_delta_percent: float


@dataclass(frozen=True)
class VerificationReport:
    """Per-port verification values with pass/fail flags and suggestions."""

    kind: str
    tolerance: float | None
    target: str
    ports: tuple[PortCheck, ...]
    warnings: tuple[str, ...] = ()

    @property
    def all_in_tolerance(self) -> bool | None:
        if self.tolerance is None:
            return None
        return all(p.in_tolerance for p in self.ports)


def check_die(
    d: DieDesign,
    c: ModelCoefficients | None = None,
    *,
    tolerance: float | None = None,
    target: str = "zero",
) -> VerificationReport:
    """Verify every port of a die against a balancing model.

    The linear kind flags ports whose value falls outside the strict
    (-tolerance, +tolerance) band. The log kind reports ratios; it flags
    nothing unless a tolerance is supplied, in which case a port passes
    when |ratio - 1| < tolerance. Suggested deltas are 0 for passing ports.
    """
    if c is None:
        c = ModelCoefficients.default_linear()
    if tolerance is not None:
        if not tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {tolerance}")
        c = dataclasses.replace(c, tolerance=tolerance)
    tol = c.tolerance
    variables = extract_port_variables(d)
    checks: list[PortCheck] = []
    for port, v in zip(d.all_ports(), variables):
        if c.kind == LINEAR:
            value = eval_linear(v, c)
            in_tol = (-tol < value < tol) if tol is not None else None
            if in_tol:
                adj = Adjustment(0.0, 0.0)
            else:
                adj = suggest_adjustment(value, v.area, c, target)
        else:
            value = eval_loglinear(v, c)
            in_tol = (abs(value - 1.0) < tol) if tol is not None else None
            adj = _loglinear_adjustment(value, v.area, tol, target, in_tol)
        checks.append(
            PortCheck(
                port_id=port.id,
                value=value,
                in_tolerance=in_tol,
                suggested_delta_area=adj.delta_area,
                suggested_delta_percent=adj.delta_percent,
            )
        )
    return VerificationReport(
        kind=c.kind,
        tolerance=tol,
        target=target,
        ports=tuple(checks),
        warnings=tuple(d.layout_warnings()),
    )


def _loglinear_adjustment(
    ratio: float,
    area: float,
    tol: float | None,
    target: str,
    in_tol: bool | None,
) -> Adjustment:
    # ratio = predicted/actual, so the balanced area is area*ratio.
    if in_tol:
        return Adjustment(0.0, 0.0)
    if target == "range_edge" and tol is not None:
        if ratio > 1.0 + tol:
            delta = area * (ratio - (1.0 + tol))
        elif ratio < 1.0 - tol:
            delta = area * (ratio - (1.0 - tol))
        else:
            delta = 0.0
    else:
        delta = area * (ratio - 1.0)
    return Adjustment(delta_area=delta, delta_percent=100.0 * abs(delta) / area)


@dataclass(frozen=True)
class PortDelta:
    port_id: str
    delta_area: float


def solve_area_deltas(values: Sequence[float], c: ModelCoefficients) -> list[float]:
    """Exact area deltas that drive every linear value to 0 at once.

    Changing port i by delta_i shifts its own value by -delta_i and every
    value by coef_area_total * sum(deltas). The coupled system solves in
    closed form: delta_i = value_i + coef_area_total * S / (1 - n*coef_area_total)
    with S the sum of current values.
    """
    if c.kind != LINEAR:
        raise ValueError(f"rebalancing needs linear coefficients, got kind {c.kind!r}")
    n = len(values)
    if n == 0:
        raise ValueError("no port values to rebalance")
    coupling = 1.0 - c.coef_area_total * n
    if abs(coupling) < 1e-12:
        raise ValueError(
            f"singular port coupling: coef_area_total * {n} ports == 1; "
            "the rebalance system has no solution"
        )
    shift = c.coef_area_total * math.fsum(values) / coupling
    return [v + shift for v in values]


def rebalanced_values(
    values: Sequence[float], deltas: Sequence[float], c: ModelCoefficients
) -> list[float]:
    """Re-evaluate linear values arithmetically after applying area deltas."""
    if c.kind != LINEAR:
        raise ValueError(f"rebalancing needs linear coefficients, got kind {c.kind!r}")
    total_shift = c.coef_area_total * math.fsum(deltas)
    return [v - delta + total_shift for v, delta in zip(values, deltas)]


def rebalance(d: DieDesign, c: ModelCoefficients | None = None) -> list[PortDelta]:
    """Per-port area deltas that bring the whole die to verification value 0.

    Deltas are reported, not applied: reshaping the port polygons to meet
    the new areas (normally by trimming the side furthest from the profile)
    stays with the designer.
    """
    if c is None:
        c = ModelCoefficients.default_linear()
    variables = extract_port_variables(d)
    values = [eval_linear(v, c) for v in variables]
    deltas = solve_area_deltas(values, c)
    return [
        PortDelta(port_id=port.id, delta_area=delta)
        for port, delta in zip(d.all_ports(), deltas)
    ]
