"""Toolkit for verifying and rebalancing port layouts of porthole
aluminium extrusion dies.

The library measures port geometry from a die design, scores every port
with a balancing model, suggests and solves the area changes that bring a
die into tolerance, and can re-derive the model coefficients from port
datasets by stepwise regression. Material models used alongside extrusion
analysis (flow stress, friction, property tables) are included.
"""

from .geometry import (
    DieDesign,
    GeometryError,
    Point2,
    Polygon,
    Port,
    PortVariables,
    ProfileZone,
    extract_port_variables,
    polygon_area,
    polygon_centroid,
    polygon_perimeter,
    zone_area,
    zone_centroid,
    zone_perimeter,
)
from .model import (
    Adjustment,
    ModelCoefficients,
    PortCheck,
    PortDelta,
    VerificationReport,
    check_die,
    eval_linear,
    eval_loglinear,
    rebalance,
    rebalanced_values,
    solve_area_deltas,
    suggest_adjustment,
)
from .regression import (
    Dataset,
    RegressionReport,
    beta_coefficients,
    fit_loglinear,
    fit_ols,
    partial_correlation,
    semipartial_correlation,
    stepwise_fit,
)
from .materials import (
    EN_AW_6063_O,
    DEFAULT_TABLES,
    HanselSpittelCoefficients,
    PropertyTable,
    hansel_spittel_stress,
    interpolate_property,
    levanov_friction,
)
from .fileio import (
    FileFormatError,
    load_coefficients,
    load_dataset,
    load_die,
    save_coefficients,
    save_die,
)

__version__ = "0.1.0"
