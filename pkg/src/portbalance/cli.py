"""Command line interface.

Exit codes: 0 = checks passed, 1 = some port out of tolerance, 2 = any
error (bad file, bad flag, invalid input).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click

from . import fileio, materials, model, regression
from .geometry import extract_port_variables

_EXIT_OUT_OF_TOLERANCE = 1
_EXIT_ERROR = 2


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(_EXIT_ERROR)


def _warn(messages) -> None:
    for message in messages:
        click.echo(f"warning: {message}", err=True)


def _echo_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    click.echo(line)
    click.echo("  ".join("-" * w for w in widths))
    for row in rows:
        click.echo("  ".join(cell.rjust(w) if i else cell.ljust(w)
                             for i, (cell, w) in enumerate(zip(row, widths))))


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _fmt_percent(percent: float) -> str:
    """Display percent in 0.5 steps, like '6.5%' or '7%'."""
    snapped = round(percent * 2.0) / 2.0
    if snapped == int(snapped):
        return f"{int(snapped)}%"
    return f"{snapped:.1f}%"


@click.group()
@click.version_option(package_name="portbalance")
def main() -> None:
    """Port balancing toolkit for porthole extrusion dies."""


@main.command()
@click.argument("die_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write CSV and figures into this directory.")
def extract(die_file: str, as_json: bool, report_dir: str | None) -> None:
    """Measure per-port variables of a die design."""
    try:
        die = fileio.load_die(die_file)
        _warn(die.layout_warnings())
        variables = extract_port_variables(die)
        rows = fileio.dataset_rows_from_die(die)
        if report_dir:
            from . import report as report_mod

            paths = report_mod.write_extract_report(report_dir, die)
            _warn([f"wrote {p}" for p in paths])
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({"die": die.name, "ports": rows}, indent=2))
        return
    headers = ["port", "area", "perim", "dist", "area_prof", "perim_prof",
               "dist_port_prof", "area_total"]
    table = [
        [port.id, _fmt(v.area), _fmt(v.perimeter), _fmt(v.dist), _fmt(v.area_prof),
         _fmt(v.perim_prof), _fmt(v.dist_port_prof), _fmt(v.area_total)]
        for port, v in zip(die.all_ports(), variables)
    ]
    _echo_table(headers, table)


def _resolve_coefficients(
    model_kind: str | None, coeffs_file: str | None
) -> model.ModelCoefficients:
    if coeffs_file:
        c = fileio.load_coefficients(coeffs_file)
        if model_kind is not None and model_kind != c.kind:
            raise ValueError(
                f"--model {model_kind} conflicts with {coeffs_file} (kind {c.kind})"
            )
        return c
    if model_kind == model.LOGLINEAR:
        return model.ModelCoefficients.default_loglinear()
    return model.ModelCoefficients.default_linear()


@main.command()
@click.argument("die_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--model", "model_kind", type=click.Choice([model.LINEAR, model.LOGLINEAR]),
              default=None, help="Model to evaluate [default: linear].")
@click.option("--tolerance", type=float, default=None,
              help="Override the acceptance half-width (mm^2 for linear, "
                   "ratio offset for loglinear).")
@click.option("--coeffs", "coeffs_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Coefficients file (as written by `fit`).")
@click.option("--target", type=click.Choice(["zero", "range_edge"]), default="zero",
              show_default=True, help="Where suggested changes aim.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write CSV and figures into this directory.")
def check(die_file: str, model_kind: str | None, tolerance: float | None,
          coeffs_file: str | None, target: str, as_json: bool,
          report_dir: str | None) -> None:
    """Verify every port of a die against the balancing model."""
    try:
        die = fileio.load_die(die_file)
        coeffs = _resolve_coefficients(model_kind, coeffs_file)
        report = model.check_die(die, coeffs, tolerance=tolerance, target=target)
        _warn(report.warnings)
        if report_dir:
            from . import report as report_mod

            paths = report_mod.write_check_report(report_dir, die, report)
            _warn([f"wrote {p}" for p in paths])
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({
            "die": die.name,
            "model": report.kind,
            "tolerance": report.tolerance,
            "target": report.target,
            "all_in_tolerance": report.all_in_tolerance,
            "warnings": list(report.warnings),
            "ports": [
                {
                    "id": p.port_id,
                    "value": p.value,
                    "in_tolerance": p.in_tolerance,
                    "suggested_delta_area_mm2": p.suggested_delta_area,
                    "suggested_delta_percent": p.suggested_delta_percent,
                }
                for p in report.ports
            ],
        }, indent=2))
    else:
        headers = ["port", "value", "status", "delta_area", "delta"]
        table = []
        for p in report.ports:
            if p.in_tolerance is None:
                status = "-"
            else:
                status = "ok" if p.in_tolerance else "OUT"
            table.append([p.port_id, _fmt(p.value), status,
                          _fmt(p.suggested_delta_area),
                          _fmt_percent(p.suggested_delta_percent)])
        _echo_table(headers, table)
        if report.tolerance is not None:
            if report.all_in_tolerance:
                band = (f"within +/-{report.tolerance:g} mm^2"
                        if report.kind == model.LINEAR
                        else f"within {report.tolerance:g} of ratio 1")
                click.echo(f"all ports {band}")
            else:
                n_out = sum(1 for p in report.ports if not p.in_tolerance)
                click.echo(f"{n_out} port(s) out of tolerance")
    if report.all_in_tolerance is False:
        sys.exit(_EXIT_OUT_OF_TOLERANCE)


@main.command()
@click.argument("die_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--coeffs", "coeffs_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Linear coefficients file.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write CSV and figures into this directory.")
def rebalance(die_file: str, coeffs_file: str | None, as_json: bool,
              report_dir: str | None) -> None:
    """Solve the port-area changes that drive every model value to zero."""
    try:
        die = fileio.load_die(die_file)
        coeffs = _resolve_coefficients(model.LINEAR, coeffs_file)
        _warn(die.layout_warnings())
        variables = extract_port_variables(die)
        values = [model.eval_linear(v, coeffs) for v in variables]
        deltas = model.solve_area_deltas(values, coeffs)
        after = model.rebalanced_values(values, deltas, coeffs)
        port_ids = [p.id for p in die.all_ports()]
        areas = [v.area for v in variables]
        if report_dir:
            from . import report as report_mod

            paths = report_mod.write_rebalance_report(
                report_dir, die, port_ids, areas, deltas, values, after)
            _warn([f"wrote {p}" for p in paths])
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({
            "die": die.name,
            "ports": [
                {"id": pid, "area_mm2": a, "delta_area_mm2": d,
                 "new_area_mm2": a + d, "value_before": vb, "value_after": va}
                for pid, a, d, vb, va in zip(port_ids, areas, deltas, values, after)
            ],
        }, indent=2))
        return
    headers = ["port", "area", "delta_area", "new_area", "value", "value_after"]
    table = [
        [pid, _fmt(a), _fmt(d), _fmt(a + d), _fmt(vb), _fmt(va)]
        for pid, a, d, vb, va in zip(port_ids, areas, deltas, values, after)
    ]
    _echo_table(headers, table)


@main.command()
@click.argument("dataset_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--log", "log_space", is_flag=True,
              help="Fit in log space (coefficients become exponents).")
@click.option("--entry-p", type=float, default=0.05, show_default=True,
              help="p value below which a candidate enters.")
@click.option("--removal-p", type=float, default=0.10, show_default=True,
              help="p value above which an included variable leaves.")
@click.option("--candidates", default=None,
              help="Comma-separated candidate names to offer "
                   "(default: every column in the file).")
@click.option("--column-map", "column_map_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON map of standard column names to file headers.")
@click.option("--out", "-o", "out_file", type=click.Path(dir_okay=False), default=None,
              help="Write the fitted model as a coefficients file.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--report-dir", type=click.Path(file_okay=False),
              help="Write CSV and figures into this directory.")
def fit(dataset_file: str, log_space: bool, entry_p: float, removal_p: float,
        candidates: str | None, column_map_file: str | None, out_file: str | None,
        as_json: bool, report_dir: str | None) -> None:
    """Re-derive balancing model coefficients from a port dataset."""
    try:
        column_map = None
        if column_map_file:
            column_map = fileio.load_column_map(column_map_file)
        dataset = fileio.load_dataset(dataset_file, column_map=column_map)
        if candidates:
            wanted = [name.strip() for name in candidates.split(",") if name.strip()]
            missing = [name for name in wanted if name not in dataset.columns]
            if missing:
                raise ValueError(
                    f"candidates not in dataset: {', '.join(missing)} "
                    f"(available: {', '.join(dataset.columns)})"
                )
            dataset = dataset.subset(wanted)
        if log_space:
            result = regression.fit_loglinear(dataset, entry_p=entry_p,
                                              removal_p=removal_p)
        else:
            result = regression.stepwise_fit(dataset, entry_p=entry_p,
                                             removal_p=removal_p)
        coeffs, unsupported = fileio.report_to_coefficients(result)
        if unsupported:
            _warn([
                "fitted terms the die checker cannot evaluate: "
                + ", ".join(sorted(unsupported))
                + "; the model file will be refused by `check` "
                "(refit with --candidates to restrict)"
            ])
        if out_file:
            doc = fileio.coefficients_to_dict(coeffs)
            if unsupported:
                doc["unsupported_coefficients"] = unsupported
            Path(out_file).write_text(json.dumps(doc, indent=2) + "\n")
            _warn([f"wrote {out_file}"])
        if report_dir:
            from . import report as report_mod

            paths = report_mod.write_fit_report(report_dir, dataset, result)
            _warn([f"wrote {p}" for p in paths])
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({
            "log_transformed": result.log_transformed,
            "n_obs": result.n_obs,
            "included": list(result.included),
            "r2": result.r2,
            "adjusted_r2": result.adjusted_r2,
            "std_error_estimate": result.std_error_estimate,
            "terms": [
                {"name": t.name, "coef": t.coef, "std_error": t.std_error,
                 "t": t.t, "p": t.p, "beta": t.beta, "partial": t.partial,
                 "semipartial": t.semipartial}
                for t in result.terms
            ],
            "steps": [
                {"step": s.step, "action": s.action, "variable": s.variable, "p": s.p}
                for s in result.steps
            ],
        }, indent=2))
        return
    space = "log" if result.log_transformed else "raw"
    click.echo(f"stepwise fit ({space} space), n = {result.n_obs}")
    for s in result.steps:
        click.echo(f"  step {s.step}: {s.action} {s.variable} (p = {s.p:.4g})")
    if not result.steps:
        click.echo("  no variable qualified; intercept-only model")
    click.echo("")
    headers = ["term", "coef", "std_err", "t", "p", "beta", "partial", "semipart"]
    table = []
    for t in result.terms:
        table.append([
            t.name, f"{t.coef:.6g}", f"{t.std_error:.4g}", f"{t.t:.4g}",
            f"{t.p:.4g}",
            "" if t.beta is None else f"{t.beta:.4g}",
            "" if t.partial is None else f"{t.partial:.4g}",
            "" if t.semipartial is None else f"{t.semipartial:.4g}",
        ])
    _echo_table(headers, table)
    click.echo("")
    click.echo(f"r2 = {result.r2:.6g}   adjusted r2 = {result.adjusted_r2:.6g}   "
               f"std error = {result.std_error_estimate:.6g}")
    if result.log_transformed:
        click.echo(f"multiplier exp(intercept) = {math.exp(result.intercept):.6g}")


@main.group()
def material() -> None:
    """Evaluate material models and property tables."""


@material.command()
@click.option("--temperature", "-T", type=float, required=True, help="deg C.")
@click.option("--strain", "-e", type=float, required=True, help="True strain.")
@click.option("--strain-rate", "-r", type=float, required=True, help="1/s.")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Material config JSON (hansel_spittel section).")
@click.option("--json", "as_json", is_flag=True)
def stress(temperature: float, strain: float, strain_rate: float,
           config_file: str | None, as_json: bool) -> None:
    """Flow stress (MPa) for the configured alloy (default EN AW-6063-O)."""
    try:
        coeffs = materials.EN_AW_6063_O
        if config_file:
            config = fileio.load_material_config(config_file)
            if config.hansel_spittel is not None:
                coeffs = config.hansel_spittel
        sigma = materials.hansel_spittel_stress(temperature, strain, strain_rate, coeffs)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({"flow_stress_mpa": sigma}))
    else:
        click.echo(f"flow stress = {sigma:.2f} MPa")


@material.command()
@click.option("--friction-factor", "-m", type=float, required=True,
              help="Friction factor in [0, 1].")
@click.option("--flow-stress", type=float, required=True, help="MPa.")
@click.option("--pressure", type=float, required=True, help="Normal contact pressure, MPa.")
@click.option("--json", "as_json", is_flag=True)
def friction(friction_factor: float, flow_stress: float, pressure: float,
             as_json: bool) -> None:
    """Shear friction traction (MPa) under normal contact pressure."""
    try:
        traction = materials.levanov_friction(friction_factor, flow_stress, pressure)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({"friction_traction_mpa": traction}))
    else:
        click.echo(f"friction traction = {traction:.2f} MPa")


@material.command(name="property")
@click.argument("name", required=False)
@click.option("--temperature", "-T", type=float, default=None, help="deg C.")
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Material config JSON (property_tables section).")
@click.option("--list", "list_tables", is_flag=True, help="List available tables.")
@click.option("--json", "as_json", is_flag=True)
def property_(name: str | None, temperature: float | None,
              config_file: str | None, list_tables: bool, as_json: bool) -> None:
    """Interpolate a named property table at a temperature."""
    try:
        tables = dict(materials.DEFAULT_TABLES)
        if config_file:
            config = fileio.load_material_config(config_file)
            tables.update(config.tables)
        if list_tables:
            for table_name in sorted(tables):
                units = tables[table_name].units
                click.echo(f"{table_name}" + (f" [{units}]" if units else ""))
            return
        if not name:
            raise ValueError("property name required (or use --list)")
        if name not in tables:
            raise ValueError(
                f"unknown property table {name!r}; available: "
                + ", ".join(sorted(tables))
            )
        if temperature is None:
            raise ValueError("--temperature required")
        value = materials.interpolate_property(tables[name], temperature)
    except (ValueError, OSError) as exc:
        _fail(str(exc))
    if as_json:
        click.echo(json.dumps({"table": name, "temperature_c": temperature,
                               "value": value}))
    else:
        units = tables[name].units
        click.echo(f"{name} @ {temperature:g} degC = {value:g}"
                   + (f" {units}" if units else ""))


if __name__ == "__main__":
    main()
