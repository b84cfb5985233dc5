"""Error-versus-step-size studies."""
from __future__ import annotations

import numpy as np

from patchrot import rotation
from patchrot.harness.profiles import ConstantProfile
from patchrot.harness.report import reference_quaternions
from patchrot.integrate import (
    AttitudeState,
    StepperConfig,
    closed_form_const,
    propagate_grid,
    time_grid,
)


def fit_slope(dts, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dt)``."""
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


def final_errors(scheme: str, profile, t0: float, t1: float, dts, q0=(1.0, 0.0, 0.0, 0.0),
                 switch_threshold: float = 2.0, renormalize_every: int = 1) -> np.ndarray:
    """Final geodesic error (rad) of ``scheme`` for each step size in ``dts``."""
    q0 = np.asarray(q0, dtype=float)
    initial = AttitudeState(q0 / np.linalg.norm(q0), t0)
    if isinstance(profile, ConstantProfile):
        ref = closed_form_const(initial.rep, profile.omega, t1 - t0)
    else:
        ref = reference_quaternions(profile, time_grid(t0, t1, min(dts)), initial.rep)[-1]
    errs = []
    for dt in dts:
        config = StepperConfig(scheme, dt, switch_threshold, renormalize_every)
        traj = propagate_grid(initial, profile, time_grid(t0, t1, dt), config)
        errs.append(rotation.geodesic_distance(traj.quaternions()[-1], ref))
    return np.array(errs)
