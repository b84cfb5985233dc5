"""Run reports: per-step CSV rows plus a summary."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from patchrot import rotation
from patchrot.harness.profiles import ConstantProfile
from patchrot.integrate import (
    AttitudeState,
    StepperConfig,
    Trajectory,
    closed_form_const,
    propagate_grid,
    refine_grid,
)

HEADER = ("t", "rep", "i", "c0", "c1", "c2", "c3",
          "geo_err", "ortho_defect", "norm_drift", "switched")
REFERENCE_REFINEMENT = 100


def reference_quaternions(profile, nodes: np.ndarray, q0) -> np.ndarray:
    """Reference attitude at each node.

    Constant profiles use the closed form; anything else a quaternion RK4
    run with each step split into 100 substeps.
    """
    nodes = np.asarray(nodes, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    q0 = q0 / np.linalg.norm(q0)
    if isinstance(profile, ConstantProfile):
        return closed_form_const(q0, profile.omega, nodes - nodes[0])
    if nodes.size == 1:
        return q0[None, :]
    fine = refine_grid(nodes, REFERENCE_REFINEMENT)
    dt = float(np.min(np.diff(nodes))) / REFERENCE_REFINEMENT
    traj = propagate_grid(AttitudeState(q0, nodes[0]), profile, fine,
                          StepperConfig("quat-rk4", dt), record_every=REFERENCE_REFINEMENT)
    return traj.quaternions()


@dataclass
class RunReport:
    """Columns of a run report; one row per recorded state."""

    t: np.ndarray
    rep: list
    i: np.ndarray          # -1 where not applicable
    coords: np.ndarray     # (n, 4), NaN where not applicable
    geo_err: np.ndarray
    ortho_defect: np.ndarray
    norm_drift: np.ndarray  # NaN for patch rows
    switched: np.ndarray
    summary: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size


def build_report(traj: Trajectory, reference: np.ndarray) -> RunReport:
    n = len(traj)
    coords = np.full((n, 4), np.nan)
    coords[:, : traj.coords.shape[1]] = traj.coords
    geo = rotation.geodesic_distance(traj.quaternions(), reference)
    ortho = rotation.orthogonality_defect(traj.matrices())
    rep = ["patch" if traj.is_patch else "quat"] * n
    per_rhs = traj.wall_time / traj.rhs_evaluations if traj.rhs_evaluations else float("nan")
    summary = {
        "scheme": traj.scheme,
        "steps": n - 1,
        "final_geo_err": float(geo[-1]),
        "max_geo_err": float(np.max(geo)),
        "switches": traj.n_switches,
        "max_ortho_defect": float(np.max(ortho)),
        "wall_time_s": traj.wall_time,
        "wall_time_per_rhs_s": per_rhs,
    }
    return RunReport(traj.t.copy(), rep, traj.patch_index.copy(), coords,
                     np.atleast_1d(geo), np.atleast_1d(ortho), traj.quat_norm_drift.copy(),
                     traj.switched.copy(), summary)


def _num(v: float) -> str:
    return "" if np.isnan(v) else "%.17g" % v


def write_report(report: RunReport, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HEADER)
    for k in range(len(report)):
        w.writerow([
            _num(report.t[k]),
            report.rep[k],
            "" if report.i[k] < 0 else str(int(report.i[k])),
            *(_num(c) for c in report.coords[k]),
            _num(report.geo_err[k]),
            _num(report.ortho_defect[k]),
            _num(report.norm_drift[k]),
            "1" if report.switched[k] else "0",
        ])


def report_to_string(report: RunReport) -> str:
    buf = io.StringIO()
    write_report(report, buf)
    return buf.getvalue()


def read_report(fh) -> RunReport:
    """Parse a report written by ``write_report``; empty fields become NaN / -1."""
    reader = csv.reader(fh)
    header = tuple(next(reader))
    if header != HEADER:
        raise ValueError(f"unexpected report header {header}")

    def f(s):
        return float(s) if s else np.nan

    rows = list(reader)
    n = len(rows)
    t = np.empty(n)
    i = np.empty(n, dtype=np.int64)
    coords = np.empty((n, 4))
    geo, ortho, drift = np.empty(n), np.empty(n), np.empty(n)
    sw = np.empty(n, dtype=bool)
    rep = []
    for k, r in enumerate(rows):
        t[k] = f(r[0])
        rep.append(r[1])
        i[k] = int(r[2]) if r[2] else -1
        coords[k] = [f(c) for c in r[3:7]]
        geo[k], ortho[k], drift[k] = f(r[7]), f(r[8]), f(r[9])
        sw[k] = r[10] == "1"
    return RunReport(t, rep, i, coords, geo, ortho, drift, sw)
