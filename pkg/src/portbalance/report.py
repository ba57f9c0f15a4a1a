"""Report emission: delimited tables plus rendered figures for each verb.

Figures are drawn straight onto matplotlib Figure objects (no pyplot, no
global backend state) and written as PNG next to the CSV output.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .fileio import dataset_rows_from_die
from .geometry import DieDesign, polygon_centroid
from .model import VerificationReport
from .regression import Dataset, RegressionReport

__all__ = [
    "write_extract_report",
    "write_check_report",
    "write_rebalance_report",
    "write_fit_report",
]

_DATASET_HEADERS = (
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
    "perim_total_mm2",
    "container_diameter_mm",
    "max_pressure",
)


def _prepare(directory) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_csv(path: Path, headers, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        writer.writerows(rows)


def _die_figure(die: DieDesign) -> Figure:
    fig = Figure(figsize=(7, 7))
    ax = fig.add_subplot()
    for cavity in die.cavities:
        for port in cavity:
            xs = [p.x for p in port.geometry.vertices]
            ys = [p.y for p in port.geometry.vertices]
            ax.fill(xs, ys, alpha=0.45, color="tab:blue", linewidth=0.8, edgecolor="k")
            c = polygon_centroid(port.geometry)
            ax.annotate(port.id, (c.x, c.y), ha="center", va="center", fontsize=7)
            for k, ring in enumerate(port.profile_zone.boundaries):
                xs = [p.x for p in ring.vertices] + [ring.vertices[0].x]
                ys = [p.y for p in ring.vertices] + [ring.vertices[0].y]
                style = "-" if k == 0 else "--"
                ax.plot(xs, ys, style, color="tab:orange", linewidth=0.9)
    ax.plot([die.centre.x], [die.centre.y], "+", color="k", markersize=10)
    ax.set_aspect("equal")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_title(f"{die.name}: ports and profile zones")
    fig.tight_layout()
    return fig


def _values_figure(report: VerificationReport) -> Figure:
    fig = Figure(figsize=(8, 4.5))
    ax = fig.add_subplot()
    ids = [p.port_id for p in report.ports]
    values = [p.value for p in report.ports]
    colors = [
        "tab:gray" if p.in_tolerance is None
        else ("tab:blue" if p.in_tolerance else "tab:red")
        for p in report.ports
    ]
    x = np.arange(len(ids))
    ax.bar(x, values, color=colors)
    balanced = 0.0 if report.kind == "linear" else 1.0
    ax.axhline(balanced, color="k", linewidth=0.8)
    if report.tolerance is not None:
        lo = balanced - report.tolerance
        hi = balanced + report.tolerance
        ax.axhline(lo, color="k", linestyle="--", linewidth=0.8)
        ax.axhline(hi, color="k", linestyle="--", linewidth=0.8)
        ax.axhspan(lo, hi, color="tab:green", alpha=0.08)
    ax.set_xticks(x, ids, rotation=60, fontsize=7)
    unit = "value [mm$^2$]" if report.kind == "linear" else "predicted/actual area"
    ax.set_ylabel(unit)
    ax.set_title(f"verification values ({report.kind} model)")
    fig.tight_layout()
    return fig


def write_extract_report(directory, die: DieDesign) -> list[Path]:
    """port_variables.csv (dataset layout, reusable by `fit`) + die figure."""
    out = _prepare(directory)
    rows = dataset_rows_from_die(die)
    csv_path = out / "port_variables.csv"
    headers = [h for h in _DATASET_HEADERS if h in rows[0]]
    _write_csv(csv_path, headers, [[row[h] for h in headers] for row in rows])
    fig_path = out / "die_layout.png"
    _die_figure(die).savefig(fig_path, dpi=150)
    return [csv_path, fig_path]


def write_check_report(directory, die: DieDesign, report: VerificationReport) -> list[Path]:
    out = _prepare(directory)
    csv_path = out / "verification.csv"
    _write_csv(
        csv_path,
        ["port_id", "value", "in_tolerance", "suggested_delta_area_mm2",
         "suggested_delta_percent"],
        [
            [p.port_id, p.value, "" if p.in_tolerance is None else p.in_tolerance,
             p.suggested_delta_area, p.suggested_delta_percent]
            for p in report.ports
        ],
    )
    values_path = out / "verification_values.png"
    _values_figure(report).savefig(values_path, dpi=150)
    layout_path = out / "die_layout.png"
    _die_figure(die).savefig(layout_path, dpi=150)
    return [csv_path, values_path, layout_path]


def write_rebalance_report(
    directory,
    die: DieDesign,
    port_ids,
    areas,
    deltas,
    values_before,
    values_after,
) -> list[Path]:
    out = _prepare(directory)
    csv_path = out / "rebalance.csv"
    _write_csv(
        csv_path,
        ["port_id", "area_mm2", "delta_area_mm2", "new_area_mm2",
         "value_before", "value_after"],
        [
            [pid, a, d, a + d, vb, va]
            for pid, a, d, vb, va in zip(port_ids, areas, deltas, values_before, values_after)
        ],
    )
    fig = Figure(figsize=(8, 4.5))
    ax = fig.add_subplot()
    x = np.arange(len(port_ids))
    width = 0.4
    ax.bar(x - width / 2, values_before, width, label="before", color="tab:red")
    ax.bar(x + width / 2, values_after, width, label="after", color="tab:blue")
    ax.axhline(0.0, color="k", linewidth=0.8)
    ax.set_xticks(x, port_ids, rotation=60, fontsize=7)
    ax.set_ylabel("value [mm$^2$]")
    ax.set_title("verification values before/after area rebalance")
    ax.legend()
    fig.tight_layout()
    fig_path = out / "rebalance_values.png"
    fig.savefig(fig_path, dpi=150)
    return [csv_path, fig_path]


def _predictions(dataset: Dataset, report: RegressionReport) -> np.ndarray:
    data = dataset.to_log() if report.log_transformed else dataset
    pred = np.full(data.n_rows, report.intercept)
    for name in report.included:
        pred = pred + report.coefficient(name) * data.column(name)
    return pred


def write_fit_report(directory, dataset: Dataset, report: RegressionReport) -> list[Path]:
    out = _prepare(directory)
    terms_path = out / "fit_terms.csv"
    _write_csv(
        terms_path,
        ["term", "coef", "std_error", "t", "p", "beta", "partial", "semipartial"],
        [
            [t.name, t.coef, t.std_error, t.t, t.p,
             "" if t.beta is None else t.beta,
             "" if t.partial is None else t.partial,
             "" if t.semipartial is None else t.semipartial]
            for t in report.terms
        ],
    )
    steps_path = out / "fit_steps.csv"
    _write_csv(
        steps_path,
        ["step", "action", "variable", "p"],
        [[s.step, s.action, s.variable, s.p] for s in report.steps],
    )
    observed = (
        np.log(dataset.response) if report.log_transformed else dataset.response
    )
    predicted = _predictions(dataset, report)
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot()
    ax.scatter(predicted, observed, s=12, alpha=0.6)
    lo = min(float(observed.min()), float(predicted.min()))
    hi = max(float(observed.max()), float(predicted.max()))
    ax.plot([lo, hi], [lo, hi], "k--", linewidth=0.9)
    label = "ln(area)" if report.log_transformed else "area [mm$^2$]"
    ax.set_xlabel(f"predicted {label}")
    ax.set_ylabel(f"observed {label}")
    ax.set_title(f"fit: adjusted R$^2$ = {report.adjusted_r2:.3f}")
    fig.tight_layout()
    fig_path = out / "observed_vs_predicted.png"
    fig.savefig(fig_path, dpi=150)
    return [terms_path, steps_path, fig_path]
