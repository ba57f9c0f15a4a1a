"""File formats: die geometry (JSON), port datasets (CSV), model
coefficients (JSON) and material configuration (JSON).

Every loader fails with a message naming the file and the offending
location; writers emit full-precision values so a load/save cycle
round-trips exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from .geometry import (
    DieDesign,
    GeometryError,
    Point2,
    Polygon,
    Port,
    ProfileZone,
)
from .materials import HanselSpittelCoefficients, PropertyTable
from .model import LINEAR, LOGLINEAR, ModelCoefficients
from .regression import CANDIDATE_ORDER, Dataset

__all__ = [
    "FileFormatError",
    "DIE_SCHEMA_VERSION",
    "COEFFS_SCHEMA_VERSION",
    "DATASET_REQUIRED_COLUMNS",
    "DATASET_OPTIONAL_COLUMNS",
    "MODEL_VARIABLES",
    "load_die",
    "save_die",
    "die_from_dict",
    "die_to_dict",
    "load_dataset",
    "load_column_map",
    "dataset_rows_from_die",
    "load_coefficients",
    "save_coefficients",
    "coefficients_to_dict",
    "report_to_coefficients",
    "load_material_config",
    "MaterialConfig",
]

DIE_SCHEMA_VERSION = 1
COEFFS_SCHEMA_VERSION = 1

# Dataset CSV columns and the candidate regressor each numeric one feeds.
_COLUMN_TO_VARIABLE = {
    "area_mm2": "area",
    "perimeter_mm": "perimeter",
    "dist_mm": "dist",
    "area_prof_mm2": "area_prof",
    "perim_prof_mm": "perim_prof",
    "dist_port_prof_mm": "dist_port_prof",
    "depth_mm": "depth",
    "area_total_mm2": "area_total",
    "perim_total_mm2": "perim_total",
    "container_diameter_mm": "container_diameter",
    "max_pressure": "max_pressure",
}
_VARIABLE_TO_COLUMN = {v: k for k, v in _COLUMN_TO_VARIABLE.items()}

DATASET_REQUIRED_COLUMNS = (
    "die_id",
    "port_id",
    "area_mm2",
    "perimeter_mm",
    "dist_mm",
    "area_prof_mm2",
    "perim_prof_mm",
    "dist_port_prof_mm",
    "depth_mm",
    "area_total_mm2",
)
DATASET_OPTIONAL_COLUMNS = (
    "perim_total_mm2",
    "container_diameter_mm",
    "max_pressure",
)

# Variables the die checker can evaluate from geometry; a coefficients file
# may only carry these.
MODEL_VARIABLES = ("dist", "area_total", "area_prof", "dist_port_prof", "perim_prof")
_VARIABLE_TO_FIELD = {
    "dist": "coef_dist",
    "area_total": "coef_area_total",
    "area_prof": "coef_area_prof",
    "dist_port_prof": "coef_dist_port_prof",
    "perim_prof": "coef_perim_prof",
}


class FileFormatError(ValueError):
    """A data file failed to parse or validate."""


def _read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: expected a JSON object at the top level")
    return doc


def _require(mapping: Mapping, key: str, where: str):
    if key not in mapping:
        raise FileFormatError(f"{where}: missing field {key!r}")
    return mapping[key]


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise FileFormatError(f"{where}: number must be finite, got {value!r}")
    return float(value)


def _point(value, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise FileFormatError(f"{where}: expected an [x, y] pair, got {value!r}")
    return _number(value[0], where + "[0]"), _number(value[1], where + "[1]")


def _ring(value, where: str) -> list[tuple[float, float]]:
    if not isinstance(value, list) or len(value) < 3:
        raise FileFormatError(f"{where}: expected a list of at least 3 [x, y] pairs")
    return [_point(v, f"{where}[{i}]") for i, v in enumerate(value)]


def die_from_dict(doc: Mapping, source: str = "die") -> DieDesign:
    version = _require(doc, "schema_version", source)
    if version != DIE_SCHEMA_VERSION:
        raise FileFormatError(
            f"{source}: unsupported schema_version {version!r} "
            f"(this tool reads version {DIE_SCHEMA_VERSION})"
        )
    name = _require(doc, "name", source)
    if not isinstance(name, str) or not name:
        raise FileFormatError(f"{source}: name must be a nonempty string")
    if "centre" in doc and doc["centre"] is not None:
        cx, cy = _point(doc["centre"], f"{source}: centre")
        centre = Point2(cx, cy)
    else:
        centre = Point2(0.0, 0.0)
    container = None
    pressure = None
    press = doc.get("press")
    if press is not None:
        if not isinstance(press, dict):
            raise FileFormatError(f"{source}: press must be an object")
        if press.get("container_diameter_mm") is not None:
            container = _number(
                press["container_diameter_mm"], f"{source}: press.container_diameter_mm"
            )
        if press.get("max_pressure") is not None:
            pressure = _number(press["max_pressure"], f"{source}: press.max_pressure")

    cavities_doc = _require(doc, "cavities", source)
    if not isinstance(cavities_doc, list):
        raise FileFormatError(f"{source}: cavities must be a list")
    cavities: list[tuple[Port, ...]] = []
    for ci, cavity_doc in enumerate(cavities_doc):
        where_cavity = f"{source}: cavities[{ci}]"
        if not isinstance(cavity_doc, dict):
            raise FileFormatError(f"{where_cavity}: expected an object")
        ports_doc = _require(cavity_doc, "ports", where_cavity)
        if not isinstance(ports_doc, list):
            raise FileFormatError(f"{where_cavity}: ports must be a list")
        ports: list[Port] = []
        for pi, port_doc in enumerate(ports_doc):
            where_port = f"{where_cavity}.ports[{pi}]"
            if not isinstance(port_doc, dict):
                raise FileFormatError(f"{where_port}: expected an object")
            pid = _require(port_doc, "id", where_port)
            if not isinstance(pid, str) or not pid:
                raise FileFormatError(f"{where_port}: id must be a nonempty string")
            depth = None
            if port_doc.get("depth_mm") is not None:
                depth = _number(port_doc["depth_mm"], f"{where_port}.depth_mm")
            ring = _ring(_require(port_doc, "polygon", where_port), f"{where_port}.polygon")
            zone_doc = _require(port_doc, "profile_zone", where_port)
            if not isinstance(zone_doc, dict):
                raise FileFormatError(f"{where_port}.profile_zone: expected an object")
            boundaries_doc = _require(
                zone_doc, "boundaries", f"{where_port}.profile_zone"
            )
            if not isinstance(boundaries_doc, list) or not boundaries_doc:
                raise FileFormatError(
                    f"{where_port}.profile_zone.boundaries: expected a nonempty list"
                )
            boundary_rings = [
                _ring(b, f"{where_port}.profile_zone.boundaries[{bi}]")
                for bi, b in enumerate(boundaries_doc)
            ]
            try:
                port = Port(
                    id=pid,
                    geometry=Polygon(ring),
                    profile_zone=ProfileZone(boundary_rings),
                    depth=depth,
                )
            except GeometryError as exc:
                raise FileFormatError(f"{source}: port {pid!r}: {exc}") from exc
            ports.append(port)
        cavities.append(tuple(ports))

    try:
        return DieDesign(
            name=name,
            cavities=tuple(cavities),
            centre=centre,
            container_diameter=container,
            max_pressure=pressure,
        )
    except GeometryError as exc:
        raise FileFormatError(f"{source}: {exc}") from exc


def load_die(path) -> DieDesign:
    """Read a die design file; fails with a location-precise message."""
    return die_from_dict(_read_json(path), source=str(path))


def die_to_dict(die: DieDesign) -> dict:
    doc: dict = {
        "schema_version": DIE_SCHEMA_VERSION,
        "name": die.name,
        "centre": [die.centre.x, die.centre.y],
    }
    if die.container_diameter is not None or die.max_pressure is not None:
        press: dict = {}
        if die.container_diameter is not None:
            press["container_diameter_mm"] = die.container_diameter
        if die.max_pressure is not None:
            press["max_pressure"] = die.max_pressure
        doc["press"] = press
    doc["cavities"] = [
        {
            "ports": [
                {
                    "id": port.id,
                    **({"depth_mm": port.depth} if port.depth is not None else {}),
                    "polygon": [[p.x, p.y] for p in port.geometry.vertices],
                    "profile_zone": {
                        "boundaries": [
                            [[p.x, p.y] for p in ring.vertices]
                            for ring in port.profile_zone.boundaries
                        ]
                    },
                }
                for port in cavity
            ]
        }
        for cavity in die.cavities
    ]
    return doc


def save_die(die: DieDesign, path) -> None:
    Path(path).write_text(json.dumps(die_to_dict(die), indent=2) + "\n")


def load_column_map(path) -> dict[str, str]:
    """Read a column-map sidecar: standard column name -> actual file header."""
    doc = _read_json(path)
    for key, value in doc.items():
        if not isinstance(value, str):
            raise FileFormatError(
                f"{path}: column map entry {key!r} must name a header string"
            )
    return doc


def load_dataset(path, column_map: Mapping[str, str] | None = None) -> Dataset:
    """Read a delimited port dataset.

    column_map optionally maps the standard column names to the headers
    actually present in the file, to adapt externally produced datasets.
    """
    column_map = dict(column_map or {})
    unknown = set(column_map) - set(DATASET_REQUIRED_COLUMNS) - set(
        DATASET_OPTIONAL_COLUMNS
    )
    if unknown:
        raise FileFormatError(
            f"{path}: column map refers to unknown columns: {sorted(unknown)}"
        )

    def header_for(column: str) -> str:
        return column_map.get(column, column)

    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        headers = reader.fieldnames or []
        for column in DATASET_REQUIRED_COLUMNS:
            if header_for(column) not in headers:
                raise FileFormatError(f"{path}: missing column {header_for(column)}")
        present_optional = [
            c for c in DATASET_OPTIONAL_COLUMNS if header_for(c) in headers
        ]
        raw_rows = list(reader)
    if not raw_rows:
        raise FileFormatError(f"{path}: no data rows")

    numeric_columns = [
        c
        for c in DATASET_REQUIRED_COLUMNS + tuple(present_optional)
        if c in _COLUMN_TO_VARIABLE
    ]
    labels: list[str] = []
    values: dict[str, list[float]] = {c: [] for c in numeric_columns}
    for i, row in enumerate(raw_rows, start=1):
        labels.append(f"{row.get(header_for('die_id'))}/{row.get(header_for('port_id'))}")
        for column in numeric_columns:
            cell = row.get(header_for(column))
            if cell is None:
                raise FileFormatError(
                    f"{path}: row {i}, column {header_for(column)}: missing value"
                )
            try:
                values[column].append(float(cell))
            except ValueError:
                raise FileFormatError(
                    f"{path}: row {i}, column {header_for(column)}: "
                    f"not a number: {cell!r}"
                ) from None

    variables = {_COLUMN_TO_VARIABLE[c]: values[c] for c in numeric_columns}
    response = np.array(variables.pop("area"))
    columns = tuple(name for name in CANDIDATE_ORDER if name in variables)
    matrix = np.column_stack([variables[name] for name in columns])
    return Dataset(
        response=response,
        columns=columns,
        regressors=matrix,
        labels=tuple(labels),
    )


def dataset_rows_from_die(die: DieDesign) -> list[dict]:
    """Per-port rows in the dataset CSV layout, measured from geometry."""
    from .geometry import extract_port_variables

    rows = []
    for port, v in zip(die.all_ports(), extract_port_variables(die)):
        row = {
            "die_id": die.name,
            "port_id": port.id,
            "area_mm2": v.area,
            "perimeter_mm": v.perimeter,
            "dist_mm": v.dist,
            "area_prof_mm2": v.area_prof,
            "perim_prof_mm": v.perim_prof,
            "dist_port_prof_mm": v.dist_port_prof,
            "depth_mm": port.depth if port.depth is not None else "",
            "area_total_mm2": v.area_total,
            "perim_total_mm2": v.perim_total,
        }
        if die.container_diameter is not None:
            row["container_diameter_mm"] = die.container_diameter
        if die.max_pressure is not None:
            row["max_pressure"] = die.max_pressure
        rows.append(row)
    return rows


def load_coefficients(path) -> ModelCoefficients:
    """Read a model coefficients file (the same format `fit` writes)."""
    doc = _read_json(path)
    source = str(path)
    version = _require(doc, "schema_version", source)
    if version != COEFFS_SCHEMA_VERSION:
        raise FileFormatError(
            f"{source}: unsupported schema_version {version!r} "
            f"(this tool reads version {COEFFS_SCHEMA_VERSION})"
        )
    kind = _require(doc, "kind", source)
    if kind not in (LINEAR, LOGLINEAR):
        raise FileFormatError(f"{source}: kind must be 'linear' or 'loglinear'")
    unsupported = doc.get("unsupported_coefficients") or {}
    if unsupported:
        raise FileFormatError(
            f"{source}: model uses terms the die checker cannot evaluate: "
            f"{', '.join(sorted(unsupported))}; refit with --candidates "
            f"limited to {', '.join(MODEL_VARIABLES)}"
        )
    coeffs_doc = doc.get("coefficients") or {}
    if not isinstance(coeffs_doc, dict):
        raise FileFormatError(f"{source}: coefficients must be an object")
    fields: dict[str, float] = {}
    for name, value in coeffs_doc.items():
        if name not in _VARIABLE_TO_FIELD:
            raise FileFormatError(
                f"{source}: unsupported model variable {name!r}; "
                f"supported: {', '.join(MODEL_VARIABLES)}"
            )
        fields[_VARIABLE_TO_FIELD[name]] = _number(value, f"{source}: coefficients.{name}")
    std_error = doc.get("std_error_mm2")
    tolerance = doc.get("tolerance_mm2")
    try:
        return ModelCoefficients(
            kind=kind,
            intercept=_number(_require(doc, "intercept", source), f"{source}: intercept"),
            std_error=None if std_error is None else _number(std_error, f"{source}: std_error_mm2"),
            tolerance=None if tolerance is None else _number(tolerance, f"{source}: tolerance_mm2"),
            **fields,
        )
    except ValueError as exc:
        if isinstance(exc, FileFormatError):
            raise
        raise FileFormatError(f"{source}: {exc}") from exc


def coefficients_to_dict(c: ModelCoefficients) -> dict:
    coefficients = {
        name: getattr(c, field)
        for name, field in _VARIABLE_TO_FIELD.items()
        if getattr(c, field) != 0.0
    }
    doc: dict = {
        "schema_version": COEFFS_SCHEMA_VERSION,
        "kind": c.kind,
        "intercept": c.intercept,
        "coefficients": coefficients,
    }
    if c.std_error is not None:
        doc["std_error_mm2"] = c.std_error
    if c.tolerance is not None:
        doc["tolerance_mm2"] = c.tolerance
    return doc


def save_coefficients(c: ModelCoefficients, path) -> None:
    Path(path).write_text(json.dumps(coefficients_to_dict(c), indent=2) + "\n")


def report_to_coefficients(report) -> tuple[ModelCoefficients, dict[str, float]]:
    """Convert a fitted regression report into checker coefficients.

    Returns the coefficients plus a mapping of fitted terms the checker
    cannot evaluate (anything beyond the five geometry variables); callers
    should surface those as a warning. For linear fits the tolerance
    defaults to half the residual standard error.
    """
    fields: dict[str, float] = {}
    unsupported: dict[str, float] = {}
    for term in report.terms:
        if term.name == "intercept":
            continue
        if term.name in _VARIABLE_TO_FIELD:
            fields[_VARIABLE_TO_FIELD[term.name]] = term.coef
        else:
            unsupported[term.name] = term.coef
    if report.log_transformed:
        coeffs = ModelCoefficients(
            kind=LOGLINEAR, intercept=report.intercept, **fields
        )
    else:
        coeffs = ModelCoefficients(
            kind=LINEAR,
            intercept=report.intercept,
            std_error=report.std_error_estimate,
            tolerance=report.std_error_estimate / 2.0,
            **fields,
        )
    return coeffs, unsupported


@dataclass
class MaterialConfig:
    """Optional user material data: a flow stress coefficient set and extra
    property tables."""

    hansel_spittel: HanselSpittelCoefficients | None = None
    tables: dict[str, PropertyTable] = field(default_factory=dict)


def load_material_config(path) -> MaterialConfig:
    doc = _read_json(path)
    source = str(path)
    hs = None
    hs_doc = doc.get("hansel_spittel")
    if hs_doc is not None:
        if not isinstance(hs_doc, dict):
            raise FileFormatError(f"{source}: hansel_spittel must be an object")
        allowed = {"A", "m1", "m2", "m3", "m4", "m5", "m7", "m8", "m9"}
        unknown = set(hs_doc) - allowed
        if unknown:
            raise FileFormatError(
                f"{source}: hansel_spittel: unknown coefficients {sorted(unknown)}"
            )
        if "A" not in hs_doc:
            raise FileFormatError(f"{source}: hansel_spittel: missing field 'A'")
        # a config set is self-contained: unspecified exponents are 0, not
        # inherited from the built-in alloy defaults
        values = {key: 0.0 for key in allowed - {"A"}}
        values.update(
            (key, _number(val, f"{source}: hansel_spittel.{key}"))
            for key, val in hs_doc.items()
        )
        try:
            hs = HanselSpittelCoefficients(**values)
        except ValueError as exc:
            raise FileFormatError(f"{source}: hansel_spittel: {exc}") from exc
    tables: dict[str, PropertyTable] = {}
    tables_doc = doc.get("property_tables") or {}
    if not isinstance(tables_doc, dict):
        raise FileFormatError(f"{source}: property_tables must be an object")
    for name, rows in tables_doc.items():
        if not isinstance(rows, list):
            raise FileFormatError(f"{source}: property_tables.{name}: expected a list")
        try:
            tables[name] = PropertyTable(
                name,
                [
                    (
                        _number(r[0], f"{source}: property_tables.{name}[{i}][0]"),
                        _number(r[1], f"{source}: property_tables.{name}[{i}][1]"),
                    )
                    for i, r in enumerate(rows)
                ],
            )
        except (TypeError, IndexError):
            raise FileFormatError(
                f"{source}: property_tables.{name}: rows must be [temperature, value] pairs"
            ) from None
        except ValueError as exc:
            if isinstance(exc, FileFormatError):
                raise
            raise FileFormatError(f"{source}: property_tables.{name}: {exc}") from exc
    return MaterialConfig(hansel_spittel=hs, tables=tables)
