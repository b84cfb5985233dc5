"""Fixed-step attitude propagation in patch coordinates or quaternions.

Patch schemes keep the chart coordinates bounded by switching to the best
patch whenever a coordinate exceeds the switch threshold after a step. They
never normalize anything. Quaternion schemes are the baseline and
renormalize every ``renormalize_every`` steps (0 disables it).

Rate profiles are callables ``t -> omega`` that preferably accept an array
of times and return an ``(n, 3)`` array. They are sampled on the whole time
grid up front (nodes and RK4 midpoints) and the compiled loop consumes the
samples, chunk by chunk.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from patchrot import rotation
from patchrot._accel import jit
from patchrot.kinematics import (
    DEGENERATE_DENOMINATOR,
    StepError,
    _patch_delta,
    _patch_rhs,
    _quat_rhs,
)
from patchrot.projective import DEFAULT_SWITCH_THRESHOLD
from patchrot.rotation import PatchRotation

SCHEMES = ("patch-euler", "patch-rk4", "quat-euler", "quat-rk4")
CHUNK_STEPS = 1 << 16

RateFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StepperConfig:
    scheme: str
    dt: float
    switch_threshold: float = DEFAULT_SWITCH_THRESHOLD
    renormalize_every: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if not (self.dt > 0.0 and np.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not self.switch_threshold >= 1.0:
            raise ValueError(f"switch threshold must be >= 1, got {self.switch_threshold}")
        if self.renormalize_every < 0:
            raise ValueError("renormalize_every must be >= 0 (0 means never)")

    @property
    def is_patch(self) -> bool:
        return self.scheme.startswith("patch")

    @property
    def is_rk4(self) -> bool:
        return self.scheme.endswith("rk4")

    @property
    def stages(self) -> int:
        return 4 if self.is_rk4 else 1


@dataclass(frozen=True)
class AttitudeState:
    """Attitude at time ``t``: a PatchRotation or a raw quaternion 4-vector.

    Quaternion states are stored unnormalized so that norm drift of the
    baseline schemes stays observable.
    """

    rep: Union[PatchRotation, np.ndarray]
    t: float = 0.0

    def __post_init__(self):
        if not isinstance(self.rep, PatchRotation):
            q = np.array(self.rep, dtype=float).reshape(4)
            object.__setattr__(self, "rep", q)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def identity(cls, representation: str = "patch", t: float = 0.0) -> AttitudeState:
        if representation == "patch":
            return cls(PatchRotation(0, np.zeros(3)), t)
        return cls(np.array([1.0, 0.0, 0.0, 0.0]), t)

    @property
    def is_patch(self) -> bool:
        return isinstance(self.rep, PatchRotation)

    def quaternion(self) -> np.ndarray:
        """Unit quaternion of this attitude."""
        if self.is_patch:
            return rotation.patch_to_quat(self.rep.i, self.rep.x)
        return self.rep / np.linalg.norm(self.rep)

    def as_patch(self) -> PatchRotation:
        if self.is_patch:
            return self.rep
        i, x = rotation.quat_to_patch(self.rep)
        return PatchRotation(i, x)

    def as_quat(self) -> np.ndarray:
        if self.is_patch:
            return rotation.patch_to_quat(self.rep.i, self.rep.x)
        return self.rep.copy()


@dataclass(frozen=True)
class StepDiagnostics:
    switched: bool
    patch_index_after: int
    max_abs_coordinate: float
    quat_norm_drift: float = float("nan")


@dataclass
class Trajectory:
    """Recorded states of one propagation run, row 0 being the initial state.

    ``coords`` holds chart coordinates (n, 3) for patch schemes and raw
    quaternions (n, 4) for quaternion schemes. ``patch_index`` is -1 and
    ``max_abs_coordinate`` is the largest quaternion component for
    quaternion schemes; ``quat_norm_drift`` is NaN for patch schemes.
    """

    scheme: str
    t: np.ndarray
    coords: np.ndarray
    patch_index: np.ndarray
    switched: np.ndarray
    max_abs_coordinate: np.ndarray
    quat_norm_drift: np.ndarray
    rhs_evaluations: int = 0
    wall_time: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t.size

    @property
    def is_patch(self) -> bool:
        return self.scheme.startswith("patch")

    @property
    def n_switches(self) -> int:
        return int(np.count_nonzero(self.switched))

    def state(self, k: int) -> AttitudeState:
        if self.is_patch:
            return AttitudeState(PatchRotation(int(self.patch_index[k]), self.coords[k]), self.t[k])
        return AttitudeState(self.coords[k], self.t[k])

    @property
    def final(self) -> AttitudeState:
        return self.state(len(self) - 1)

    def diagnostics(self, k: int) -> StepDiagnostics:
        return StepDiagnostics(
            bool(self.switched[k]),
            int(self.patch_index[k]),
            float(self.max_abs_coordinate[k]),
            float(self.quat_norm_drift[k]),
        )

    def quaternions(self) -> np.ndarray:
        """Unit quaternions for every row."""
        if self.is_patch:
            return rotation.patch_to_quat(self.patch_index, self.coords)
        return self.coords / np.linalg.norm(self.coords, axis=1, keepdims=True)

    def matrices(self) -> np.ndarray:
        """Rotation matrices for every row, computed without normalization.

        Patch rows use the rational chart formula; quaternion rows apply the
        quaternion formula to the stored (possibly drifted) quaternion.
        """
        if self.is_patch:
            return rotation.patch_to_matrix(self.patch_index, self.coords)
        return rotation.quat_to_matrix(self.coords)


# ---------------------------------------------------------------- kernels


@jit
def _homogeneous(x0, x1, x2, i):
    if i == 0:
        return 1.0, x0, x1, x2
    elif i == 1:
        return x0, 1.0, x1, x2
    elif i == 2:
        return x0, x1, 1.0, x2
    return x0, x1, x2, 1.0


@jit
def _switch(x, i, threshold):
    """Move ``x`` (in place) to its best patch if it left the box; return the patch."""
    if abs(x[0]) <= threshold and abs(x[1]) <= threshold and abs(x[2]) <= threshold:
        return i
    z0, z1, z2, z3 = _homogeneous(x[0], x[1], x[2], i)
    # strict comparisons keep the lowest index on ties
    k = 0
    m = abs(z0)
    if abs(z1) > m:
        k = 1
        m = abs(z1)
    if abs(z2) > m:
        k = 2
        m = abs(z2)
    if abs(z3) > m:
        k = 3
    if k == 0:
        x[0], x[1], x[2] = z1 / z0, z2 / z0, z3 / z0
    elif k == 1:
        x[0], x[1], x[2] = z0 / z1, z2 / z1, z3 / z1
    elif k == 2:
        x[0], x[1], x[2] = z0 / z2, z1 / z2, z3 / z2
    else:
        x[0], x[1], x[2] = z0 / z3, z1 / z3, z2 / z3
    return k


@jit
def _run_patch(x, i, times, w_nodes, w_mid, threshold, rk4, stride,
               out_x, out_i, out_switched, out_max, row0):
    """Advance chart point ``x`` (mutated) over ``times``.

    Returns ``(patch_index, failed_step)``, ``failed_step`` being -1 on
    success. Every ``stride``-th state is written at ``row0 + 1, ...``.
    """
    n = times.size - 1
    switched = False
    for k in range(n):
        h = times[k + 1] - times[k]
        if rk4:
            a0, a1, a2 = w_nodes[k, 0], w_nodes[k, 1], w_nodes[k, 2]
            m0, m1, m2 = w_mid[k, 0], w_mid[k, 1], w_mid[k, 2]
            b0, b1, b2 = w_nodes[k + 1, 0], w_nodes[k + 1, 1], w_nodes[k + 1, 2]
            y0, y1, y2 = x[0], x[1], x[2]
            k10, k11, k12 = _patch_rhs(y0, y1, y2, i, a0, a1, a2)
            k20, k21, k22 = _patch_rhs(y0 + 0.5 * h * k10, y1 + 0.5 * h * k11,
                                       y2 + 0.5 * h * k12, i, m0, m1, m2)
            k30, k31, k32 = _patch_rhs(y0 + 0.5 * h * k20, y1 + 0.5 * h * k21,
                                       y2 + 0.5 * h * k22, i, m0, m1, m2)
            k40, k41, k42 = _patch_rhs(y0 + h * k30, y1 + h * k31, y2 + h * k32,
                                       i, b0, b1, b2)
            x[0] = y0 + h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
            x[1] = y1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            x[2] = y2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        else:
            d0, d1, d2, den = _patch_delta(x[0], x[1], x[2], i,
                                           w_nodes[k, 0], w_nodes[k, 1], w_nodes[k, 2], h)
            if abs(den) < DEGENERATE_DENOMINATOR:
                return i, k
            x[0] += d0
            x[1] += d1
            x[2] += d2
        j = _switch(x, i, threshold)
        switched = switched or j != i
        i = j
        if (k + 1) % stride == 0:
            r = row0 + (k + 1) // stride
            out_x[r, 0] = x[0]
            out_x[r, 1] = x[1]
            out_x[r, 2] = x[2]
            out_i[r] = i
            out_switched[r] = switched
            out_max[r] = max(abs(x[0]), abs(x[1]), abs(x[2]))
            switched = False
    return i, -1


@jit
def _run_quat(q, times, w_nodes, w_mid, rk4, renormalize_every, step0, stride,
              out_q, out_drift, out_max, row0):
    """Advance quaternion ``q`` (mutated) over ``times``."""
    n = times.size - 1
    for k in range(n):
        h = times[k + 1] - times[k]
        q0, q1, q2, q3 = q[0], q[1], q[2], q[3]
        a0, a1, a2 = w_nodes[k, 0], w_nodes[k, 1], w_nodes[k, 2]
        if rk4:
            m0, m1, m2 = w_mid[k, 0], w_mid[k, 1], w_mid[k, 2]
            b0, b1, b2 = w_nodes[k + 1, 0], w_nodes[k + 1, 1], w_nodes[k + 1, 2]
            k10, k11, k12, k13 = _quat_rhs(q0, q1, q2, q3, a0, a1, a2)
            k20, k21, k22, k23 = _quat_rhs(q0 + 0.5 * h * k10, q1 + 0.5 * h * k11,
                                           q2 + 0.5 * h * k12, q3 + 0.5 * h * k13,
                                           m0, m1, m2)
            k30, k31, k32, k33 = _quat_rhs(q0 + 0.5 * h * k20, q1 + 0.5 * h * k21,
                                           q2 + 0.5 * h * k22, q3 + 0.5 * h * k23,
                                           m0, m1, m2)
            k40, k41, k42, k43 = _quat_rhs(q0 + h * k30, q1 + h * k31, q2 + h * k32,
                                           q3 + h * k33, b0, b1, b2)
            q[0] = q0 + h / 6.0 * (k10 + 2.0 * k20 + 2.0 * k30 + k40)
            q[1] = q1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
            q[2] = q2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
            q[3] = q3 + h / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43)
        else:
            d0, d1, d2, d3 = _quat_rhs(q0, q1, q2, q3, a0, a1, a2)
            q[0] = q0 + h * d0
            q[1] = q1 + h * d1
            q[2] = q2 + h * d2
            q[3] = q3 + h * d3
        norm = np.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
        if renormalize_every > 0 and (step0 + k + 1) % renormalize_every == 0:
            q[0] /= norm
            q[1] /= norm
            q[2] /= norm
            q[3] /= norm
            norm = np.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
        if (k + 1) % stride == 0:
            r = row0 + (k + 1) // stride
            for c in range(4):
                out_q[r, c] = q[c]
            out_drift[r] = abs(norm - 1.0)
            out_max[r] = max(abs(q[0]), abs(q[1]), abs(q[2]), abs(q[3]))
    return -1


# ------------------------------------------------------------- time grids


def time_grid(t0: float, t1: float, dt: float) -> np.ndarray:
    """Nodes ``t0, t0 + dt, ...`` ending exactly at ``t1``.

    A final partial step covers any remainder longer than a rounding error.
    """
    if t1 < t0:
        raise ValueError(f"t1 ({t1}) must not precede t0 ({t0})")
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    span = t1 - t0
    n = int(np.floor(span / dt))
    # absorb remainders that are only floating-point noise
    if span - n * dt > dt * (1.0 - 1e-9):
        n += 1
    nodes = t0 + dt * np.arange(n + 1)
    if t1 - nodes[-1] > 1e-9 * dt:
        nodes = np.append(nodes, t1)
    else:
        nodes[-1] = t1
    return nodes


def refine_grid(nodes: np.ndarray, m: int) -> np.ndarray:
    """Split every interval of ``nodes`` into ``m`` equal substeps."""
    if m == 1:
        return np.asarray(nodes, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    frac = np.arange(m) / m
    inner = nodes[:-1, None] + np.diff(nodes)[:, None] * frac
    return np.append(inner.ravel(), nodes[-1])


def evaluate_rates(profile, t: np.ndarray) -> np.ndarray:
    """Sample ``profile`` at times ``t`` as an ``(n, 3)`` array.

    ``profile`` is a constant 3-vector or a callable. Callables that do not
    vectorize are evaluated point by point.
    """
    t = np.asarray(t, dtype=float)
    if not callable(profile):
        w = np.asarray(profile, dtype=float).reshape(3)
        return np.broadcast_to(w, (t.size, 3)).copy()
    try:
        w = np.asarray(profile(t), dtype=float)
    except (TypeError, ValueError):
        w = None
    if w is None or w.shape != (t.size, 3):
        w = np.array([np.asarray(profile(tk), dtype=float).reshape(3) for tk in t])
    if not np.all(np.isfinite(w)):
        raise ValueError("rate profile produced non-finite angular velocity")
    return np.ascontiguousarray(w)


# ------------------------------------------------------------- propagation


def propagate_grid(initial: AttitudeState, profile, nodes: np.ndarray,
                   config: StepperConfig, record_every: int = 1) -> Trajectory:
    """Run ``config.scheme`` across the given time nodes.

    ``record_every`` keeps every m-th state; ``len(nodes) - 1`` must then be
    a multiple of it.
    """
    nodes = np.asarray(nodes, dtype=float)
    n_steps = nodes.size - 1
    if n_steps < 0:
        raise ValueError("need at least one time node")
    if record_every < 1 or n_steps % record_every:
        raise ValueError("step count must be a multiple of record_every")
    n_rows = n_steps // record_every + 1
    t_rows = nodes[::record_every]
    rk4 = config.is_rk4

    out_max = np.empty(n_rows)
    out_switched = np.zeros(n_rows, dtype=np.bool_)
    if config.is_patch:
        p = initial.as_patch()
        x = p.x.copy()
        i = _switch(x, p.i, config.switch_threshold)
        out_switched[0] = i != p.i
        out_x = np.empty((n_rows, 3))
        out_i = np.empty(n_rows, dtype=np.int64)
        out_x[0] = x
        out_i[0] = i
        out_max[0] = np.max(np.abs(x))
        out_drift = np.full(n_rows, np.nan)
    else:
        q = initial.as_quat()
        out_x = np.empty((n_rows, 4))
        out_i = np.full(n_rows, -1, dtype=np.int64)
        out_x[0] = q
        out_max[0] = np.max(np.abs(q))
        out_drift = np.empty(n_rows)
        out_drift[0] = abs(np.linalg.norm(q) - 1.0)

    chunk = record_every * max(1, CHUNK_STEPS // record_every)
    start = time.perf_counter()
    for k0 in range(0, n_steps, chunk):
        k1 = min(k0 + chunk, n_steps)
        seg = nodes[k0:k1 + 1]
        w_nodes = evaluate_rates(profile, seg)
        w_mid = evaluate_rates(profile, 0.5 * (seg[:-1] + seg[1:])) if rk4 else w_nodes
        row0 = k0 // record_every
        if config.is_patch:
            i, failed = _run_patch(x, i, seg, w_nodes, w_mid, config.switch_threshold, rk4,
                                   record_every, out_x, out_i, out_switched, out_max, row0)
            if failed >= 0:
                raise StepError("patch Euler step degenerate; reduce dt or switch patch",
                                t=float(seg[failed]))
        else:
            _run_quat(q, seg, w_nodes, w_mid, rk4, config.renormalize_every, k0,
                      record_every, out_x, out_drift, out_max, row0)
    wall = time.perf_counter() - start

    return Trajectory(
        scheme=config.scheme,
        t=t_rows,
        coords=out_x,
        patch_index=out_i,
        switched=out_switched,
        max_abs_coordinate=out_max,
        quat_norm_drift=out_drift,
        rhs_evaluations=n_steps * config.stages,
        wall_time=wall,
    )


def propagate(initial: AttitudeState, profile, t0: float, t1: float,
              config: StepperConfig) -> Trajectory:
    """Fixed-step propagation from ``t0`` to ``t1`` (a final partial step if needed)."""
    return propagate_grid(initial, profile, time_grid(t0, t1, config.dt), config)


# --------------------------------------------------------- single steps


def _single(state: AttitudeState, omega, dt: float, config: StepperConfig) -> Trajectory:
    nodes = np.array([state.t, state.t + dt])
    return propagate_grid(state, omega, nodes, config)


def step_patch_euler(state: AttitudeState, omega, dt: float,
                     threshold: float = DEFAULT_SWITCH_THRESHOLD
                     ) -> tuple[AttitudeState, StepDiagnostics]:
    """One exact-difference step in the current patch, then a switch check."""
    if not state.is_patch:
        raise TypeError("step_patch_euler needs a patch state")
    traj = _single(state, omega, dt, StepperConfig("patch-euler", dt, threshold))
    return traj.final, traj.diagnostics(1)


def step_patch_rk4(state: AttitudeState, omega_of_t, dt: float,
                   threshold: float = DEFAULT_SWITCH_THRESHOLD
                   ) -> tuple[AttitudeState, StepDiagnostics]:
    """One classical RK4 step on the patch equation with the patch held fixed."""
    if not state.is_patch:
        raise TypeError("step_patch_rk4 needs a patch state")
    traj = _single(state, omega_of_t, dt, StepperConfig("patch-rk4", dt, threshold))
    return traj.final, traj.diagnostics(1)


def step_quat_euler(state: AttitudeState, omega, dt: float,
                    renormalize: bool = True) -> AttitudeState:
    if state.is_patch:
        raise TypeError("step_quat_euler needs a quaternion state")
    config = StepperConfig("quat-euler", dt, renormalize_every=int(renormalize))
    return _single(state, omega, dt, config).final


def step_quat_rk4(state: AttitudeState, omega_of_t, dt: float,
                  renormalize: bool = True) -> AttitudeState:
    if state.is_patch:
        raise TypeError("step_quat_rk4 needs a quaternion state")
    config = StepperConfig("quat-rk4", dt, renormalize_every=int(renormalize))
    return _single(state, omega_of_t, dt, config).final


def closed_form_const(q0, omega, t) -> np.ndarray:
    """Exact attitude under constant body rate: ``q0 * exp(omega t / 2)``.

    ``t`` may be an array of times, giving an ``(n, 4)`` result.
    """
    return rotation.hamilton(np.asarray(q0, dtype=float), rotation.quat_exp_body(omega, t))
