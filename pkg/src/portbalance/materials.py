"""Constitutive models and temperature-dependent property tables.

Covers the material side of hot extrusion analysis: a multiplicative flow
stress law in temperature/strain/strain rate, a pressure-dependent shear
friction law, and piecewise-linear property tables for the die steel
(AISI H-13) and the billet alloy (EN AW-6063-O). Temperatures are degrees
Celsius throughout.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "HanselSpittelCoefficients",
    "EN_AW_6063_O",
    "PropertyTable",
    "DEFAULT_TABLES",
    "STEEL_POISSON_RATIO",
    "CONTACT_HEAT_TRANSFER_W_PER_M2K",
    "hansel_spittel_stress",
    "levanov_friction",
    "interpolate_property",
]

# Steel Poisson's ratio is flat over the working range.
STEEL_POISSON_RATIO = 0.3
# Aluminium/steel contact heat exchange, W/(m^2*K).
CONTACT_HEAT_TRANSFER_W_PER_M2K = 30000.0


@dataclass(frozen=True)
class HanselSpittelCoefficients:
    """Flow stress law coefficients, temperature convention in deg C.

    sigma = A * exp(m1*T) * T^m9 * eps^m2 * exp(m4/eps) * (1+eps)^(m5*T)
              * exp(m7*eps) * rate^m3 * rate^(m8*T)

    Defaults are the EN AW-6063-O aluminium set (6-coefficient regression;
    m7, m8, m9 unused and left at 0).
    """

    A: float = 265.0
    m1: float = -0.00458
    m2: float = -0.12712
    m3: float = 0.12
    m4: float = -0.0161
    m5: float = 0.00026
    m7: float = 0.0
    m8: float = 0.0
    m9: float = 0.0

    def __post_init__(self) -> None:
        if not self.A > 0:
            raise ValueError(f"A must be positive, got {self.A}")


EN_AW_6063_O = HanselSpittelCoefficients()


def hansel_spittel_stress(
    temperature_c: float,
    strain: float,
    strain_rate: float,
    c: HanselSpittelCoefficients = EN_AW_6063_O,
) -> float:
    """Flow stress in MPa at the given temperature (deg C), true strain and
    strain rate (1/s)."""
    if not strain > 0:
        raise ValueError(f"strain must be positive (exp(m4/strain) term), got {strain}")
    if not strain_rate > 0:
        raise ValueError(f"strain rate must be positive, got {strain_rate}")
    if c.m9 != 0.0 and not temperature_c > 0:
        raise ValueError(
            f"temperature must be positive when m9 is nonzero, got {temperature_c}"
        )
    t_power = temperature_c ** c.m9 if c.m9 != 0.0 else 1.0
    return (
        c.A
        * math.exp(c.m1 * temperature_c)
        * t_power
        * strain ** c.m2
        * math.exp(c.m4 / strain)
        * (1.0 + strain) ** (c.m5 * temperature_c)
        * math.exp(c.m7 * strain)
        * strain_rate ** c.m3
        * strain_rate ** (c.m8 * temperature_c)
    )


def levanov_friction(m: float, flow_stress: float, normal_pressure: float) -> float:
    """Shear friction traction in MPa.

    f = m * flow_stress/sqrt(3) * (1 - exp(-1.25 * pressure/flow_stress))

    Behaves like Coulomb friction at low contact pressure and saturates to
    the constant-friction level m*flow_stress/sqrt(3) at high pressure.
    """
    if not 0.0 <= m <= 1.0:
        raise ValueError(f"friction factor must lie in [0, 1], got {m}")
    if not flow_stress > 0:
        raise ValueError(f"flow stress must be positive, got {flow_stress}")
    if normal_pressure < 0:
        raise ValueError(f"normal pressure must be nonnegative, got {normal_pressure}")
    return (
        m
        * flow_stress
        / math.sqrt(3.0)
        * (1.0 - math.exp(-1.25 * normal_pressure / flow_stress))
    )


@dataclass(frozen=True)
class PropertyTable:
    """Breakpoint table of one property over temperature (deg C)."""

    name: str
    breakpoints: tuple[tuple[float, float], ...]
    units: str = ""

    def __init__(self, name: str, breakpoints: Iterable, units: str = "") -> None:
        pts = tuple((float(t), float(v)) for t, v in breakpoints)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "units", units)
        if len(pts) < 2:
            raise ValueError(f"table {name!r} needs at least 2 breakpoints")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if not t1 > t0:
                raise ValueError(
                    f"table {name!r}: temperatures must increase strictly "
                    f"({t0} then {t1})"
                )


def interpolate_property(t: PropertyTable, temperature_c: float) -> float:
    """Piecewise-linear interpolation, clamped to the end values outside the
    breakpoint range (tables are measurement-bounded)."""
    temps = [bp[0] for bp in t.breakpoints]
    values = [bp[1] for bp in t.breakpoints]
    if temperature_c <= temps[0]:
        return values[0]
    if temperature_c >= temps[-1]:
        return values[-1]
    i = bisect_right(temps, temperature_c) - 1
    frac = (temperature_c - temps[i]) / (temps[i + 1] - temps[i])
    return values[i] + frac * (values[i + 1] - values[i])


H13_YOUNG_MODULUS = PropertyTable(
    "h13-young-modulus", ((20, 210000), (300, 187000), (600, 160000)), "MPa"
)
H13_YIELD_STRESS = PropertyTable(
    "h13-yield-stress", ((20, 1500), (300, 1300), (500, 1100), (570, 1020)), "MPa"
)
H13_DENSITY = PropertyTable(
    "h13-density", ((20, 7716), (100, 7692), (200, 7660), (800, 7459)), "kg/m^3"
)
H13_THERMAL_CONDUCTIVITY = PropertyTable(
    "h13-thermal-conductivity", ((20, 22), (300, 29), (600, 31), (900, 32)), "W/(m*K)"
)
H13_SPECIFIC_HEAT = PropertyTable(
    "h13-specific-heat",
    ((20, 375), (200, 551), (500, 630), (700, 975), (800, 793)),
    "J/(kg*K)",
)
AW6063_DENSITY = PropertyTable(
    "aw6063-density", ((20, 2699), (500, 2586)), "kg/m^3"
)
AW6063_YOUNG_MODULUS = PropertyTable(
    "aw6063-young-modulus", ((20, 70600), (500, 46000)), "MPa"
)
AW6063_THERMAL_CONDUCTIVITY = PropertyTable(
    "aw6063-thermal-conductivity", ((20, 205), (500, 247)), "W/(m*K)"
)
AW6063_SPECIFIC_HEAT = PropertyTable(
    "aw6063-specific-heat", ((20, 904), (500, 1026)), "J/(kg*K)"
)
AW6063_THERMAL_EXPANSION = PropertyTable(
    "aw6063-thermal-expansion", ((20, 2.26e-5), (500, 2.78e-5)), "1/degC"
)
AW6063_POISSON_RATIO = PropertyTable(
    "aw6063-poisson-ratio", ((20, 0.33), (500, 0.36)), ""
)

DEFAULT_TABLES: dict[str, PropertyTable] = {
    t.name: t
    for t in (
        H13_YOUNG_MODULUS,
        H13_YIELD_STRESS,
        H13_DENSITY,
        H13_THERMAL_CONDUCTIVITY,
        H13_SPECIFIC_HEAT,
        AW6063_DENSITY,
        AW6063_YOUNG_MODULUS,
        AW6063_THERMAL_CONDUCTIVITY,
        AW6063_SPECIFIC_HEAT,
        AW6063_THERMAL_EXPANSION,
        AW6063_POISSON_RATIO,
    )
}
