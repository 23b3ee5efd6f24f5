"""CSV and text writers for snapshots, trajectories and reports.

Numbers are written with 17 significant digits and rows in a fixed order,
so identical runs give byte-identical files.
"""

import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
import yaml

from ..models.params import ModelParams
from ..models.reports import (
    STRUCTURE_CSV_HEADER,
    ConvergenceReport,
    StructureReport,
    format_number,
)
from ..solvers.ghe import Trajectory
from ..solvers.grid import Field, NsfField
from ..solvers.nsf import euler_primitives, maxwell_closure, nsf_entropy
from ..thermo.entropy import conjugates, eta, primitives

logger = logging.getLogger(__name__)

SNAPSHOT_HEADER = ["x", "rho", "v", "e", "w", "c", "q", "tau", "theta", "pi", "eta"]
TRAJECTORY_HEADER = ["step", "t", "dt", "max_speed", "entropy", "mass", "momentum", "energy"]
REPORT_HEADER = ["epsilon", "quantity", "norm", "value"]
FITS_HEADER = [
    "quantity", "slope", "intercept", "r_squared", "points", "expected", "tolerance", "status",
]

NORM_HEADER = (
    "# Norms: the H^s norms of the analysis are replaced by discrete L2 "
    "(sqrt(sum |f_i|^2 dx)) and L-infinity norms of cell values."
)

PathLike = Union[str, Path]


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[str]],
                comments: Sequence[str] = ()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        for line in comments:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug(f"Wrote {path}")
    return path


def _columns(*arrays: np.ndarray) -> List[List[str]]:
    return [[format_number(float(x)) for x in row] for row in zip(*arrays)]


def write_snapshot(
    path: PathLike,
    field: Union[Field, NsfField],
    params: ModelParams,
    epsilon: Optional[float] = None,
) -> Path:
    """Write one snapshot as x, rho, v, e, w, c, q, tau, theta, pi, eta.

    Navier-Stokes-Fourier snapshots carry the first Maxwell-iteration values
    in the w, c, q and tau columns, evaluated at epsilon (params.epsilon
    when omitted), and say so in a header comment.
    """
    params = params.with_dim(1)
    x = field.grid.centers
    if isinstance(field, NsfField):
        eps = params.epsilon if epsilon is None else epsilon
        rho, v, u, temperature, pressure = euler_primitives(field.U, params)
        closure = maxwell_closure(field, params, eps)
        e = u + 0.5 * v * v
        rows = _columns(
            x, rho, v, e, closure["w"], closure["c"], closure["q"], closure["tau"],
            temperature, pressure, nsf_entropy(field.U, params),
        )
        comments = [
            f"Navier-Stokes-Fourier snapshot at t={format_number(field.t)}",
            f"w, c, q, tau are the Maxwell-iteration values -eps lambda T_x, -eps D[v] "
            f"at eps={format_number(eps)}",
        ]
        return _write_rows(path, SNAPSHOT_HEADER, rows, comments)

    prim = primitives(field.U, params)
    conj = conjugates(field.U, params)
    rows = _columns(
        x, prim.rho, prim.v[:, 0], prim.e, prim.w[:, 0], prim.c[:, 0],
        conj.q[:, 0], conj.tau[:, 0], conj.theta, conj.pi, eta(field.U, params),
    )
    return _write_rows(path, SNAPSHOT_HEADER, rows)


def write_trajectory(path: PathLike, trajectory: Trajectory) -> Path:
    """One row per recorded state: step, t, dt, max_speed, entropy and totals.

    The initial row has empty dt and max_speed.
    """
    rows = []
    for i, (t, entropy, totals) in enumerate(zip(
        trajectory.step_times, trajectory.entropy_history, trajectory.totals_history
    )):
        dt = trajectory.dt_history[i - 1] if i > 0 else None
        speed = trajectory.speed_history[i - 1] if i > 0 else None
        rows.append([
            str(i),
            format_number(t),
            format_number(dt),
            format_number(speed),
            format_number(entropy),
            *[format_number(v) for v in totals],
        ])
    return _write_rows(path, TRAJECTORY_HEADER, rows)


def write_structure(directory: PathLike, report: StructureReport) -> List[Path]:
    """structure.csv and structure.txt."""
    directory = Path(directory)
    csv_path = _write_rows(
        directory / "structure.csv",
        STRUCTURE_CSV_HEADER,
        (r.to_csv_row() for r in report.results),
    )
    text_path = directory / "structure.txt"
    text_path.write_text(report.to_text())
    return [csv_path, text_path]


def norm_kind(quantity: str) -> str:
    """Norm column of report.csv for a named quantity."""
    if quantity.startswith("linf"):
        return "linf"
    if quantity in ("drift", "entropy_increase"):
        return "relative"
    if quantity.endswith("_resolved"):
        return "flag"
    return "l2"


def write_convergence(directory: PathLike, report: ConvergenceReport) -> List[Path]:
    """report.csv (one row per epsilon and norm), fits.csv and summary.txt."""
    directory = Path(directory)
    rows = []
    for run in report.runs:
        for name, value in run.norms.items():
            rows.append([format_number(run.epsilon), name, norm_kind(name), format_number(value)])
    report_path = _write_rows(directory / "report.csv", REPORT_HEADER, rows)

    fit_rows = [
        [
            f.quantity,
            format_number(f.slope),
            format_number(f.intercept),
            format_number(f.r_squared),
            str(f.points),
            format_number(f.expected),
            format_number(f.tolerance),
            f.status,
        ]
        for f in report.fits
    ]
    fits_path = _write_rows(directory / "fits.csv", FITS_HEADER, fit_rows)

    summary_path = directory / "summary.txt"
    summary_path.write_text(summary_text(report))
    return [report_path, fits_path, summary_path]


def summary_text(report: ConvergenceReport) -> str:
    """Human-readable summary of an epsilon sweep."""
    lines = [
        NORM_HEADER,
        f"experiment: {report.experiment}",
        f"cells: {report.n_cells}, t_end: {report.t_end:g}",
        "",
    ]
    names: List[str] = []
    for run in report.runs:
        for name in run.norms:
            if name not in names:
                names.append(name)
    lines.append("epsilon      " + " ".join(f"{n:>16}" for n in names))
    for run in report.runs:
        if not run.ok:
            lines.append(f"{run.epsilon:<12g} FAILED: {run.error}")
            continue
        values = " ".join(
            f"{run.norms[n]:>16.6e}" if n in run.norms else f"{'':>16}" for n in names
        )
        flag = "  under-resolved" if run.under_resolved else ""
        lines.append(f"{run.epsilon:<12g} {values}{flag}")

    lines.append("")
    for fit in report.fits:
        if fit.slope is None:
            lines.append(f"fit {fit.quantity}: {fit.status} ({fit.note})")
            continue
        target = (
            f"{fit.expected:g} +/- {fit.tolerance:g}" if fit.tolerance is not None
            else f">= {fit.expected:g}"
        )
        line = (
            f"fit {fit.quantity}: slope {fit.slope:.4f} (expected {target}), "
            f"R^2 {fit.r_squared:.5f}, {fit.points} points, {fit.status}"
        )
        if fit.note:
            line += f" ({fit.note})"
        lines.append(line)

    lines.append("")
    for name, value in report.flags.items():
        lines.append(f"flag {name}: {'PASS' if value else 'FAIL'}")
    for note in report.notes:
        lines.append(f"note: {note}")
    lines.append(f"overall: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def echo_config(directory: PathLike, raw_text: Optional[str], resolved: dict) -> List[Path]:
    """Copy the config file verbatim and write the resolved settings next to it."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if raw_text is not None:
        raw_path = directory / "config.yaml"
        raw_path.write_text(raw_text)
        written.append(raw_path)
    resolved_path = directory / "config.resolved.yaml"
    resolved_path.write_text(yaml.dump(resolved, default_flow_style=False, sort_keys=False))
    written.append(resolved_path)
    return written
