"""Angular-velocity kinematics in quaternion form and in affine-patch form.

``omega`` is the body-frame rate, i.e. ``dR/dt = R [omega]_x``. The
quaternion equation is ``dq/dt = H(omega) q / 2``. In patch ``i`` with chart
coordinates ``x`` it reduces to

    dx/dt = (W_i + (W_i . x) x + (-1)^(i+1) W_i x x) / 2

where ``W_i`` is column ``i`` of H with its zero entry dropped.

The underscore-prefixed scalar kernels are what the integrators compile;
the public functions wrap them for numpy arrays.
"""
from __future__ import annotations

import numpy as np

from patchrot._accel import jit
from patchrot.rotation import PatchRotation

DEGENERATE_DENOMINATOR = 1e-12


class StepError(ArithmeticError):
    """A patch Euler step whose denominator ``2 - (W_i . x) dt`` vanished.

    ``t`` is the start time of the failing step when known.
    """

    def __init__(self, message: str, t: float | None = None):
        if t is not None:
            message = f"{message} (step starting at t={t!r})"
        super().__init__(message)
        self.t = t


@jit
def _w_column(w0, w1, w2, i):
    if i == 0:
        return w0, w1, w2
    elif i == 1:
        return -w0, -w2, w1
    elif i == 2:
        return -w1, w2, -w0
    return -w2, -w1, w0


@jit
def _patch_numerator(x0, x1, x2, i, w0, w1, w2):
    # W_i + (W_i . x) x + (-1)^(i+1) W_i x x, and the dot product itself.
    # 12 multiplications: 3 dot, 3 scale, 6 cross.
    a0, a1, a2 = _w_column(w0, w1, w2, i)
    d = a0 * x0 + a1 * x1 + a2 * x2
    c0 = a1 * x2 - a2 * x1
    c1 = a2 * x0 - a0 * x2
    c2 = a0 * x1 - a1 * x0
    if i % 2 == 0:
        return a0 + d * x0 - c0, a1 + d * x1 - c1, a2 + d * x2 - c2, d
    return a0 + d * x0 + c0, a1 + d * x1 + c1, a2 + d * x2 + c2, d


@jit
def _patch_rhs(x0, x1, x2, i, w0, w1, w2):
    n0, n1, n2, d = _patch_numerator(x0, x1, x2, i, w0, w1, w2)
    return 0.5 * n0, 0.5 * n1, 0.5 * n2


@jit
def _patch_delta(x0, x1, x2, i, w0, w1, w2, dt):
    """Exact projected Euler increment; also returns the denominator."""
    n0, n1, n2, d = _patch_numerator(x0, x1, x2, i, w0, w1, w2)
    den = 2.0 - d * dt
    if abs(den) < DEGENERATE_DENOMINATOR:
        return 0.0, 0.0, 0.0, den
    f = dt / den
    return n0 * f, n1 * f, n2 * f, den


@jit
def _quat_rhs(q0, q1, q2, q3, w0, w1, w2):
    return (
        0.5 * (-w0 * q1 - w1 * q2 - w2 * q3),
        0.5 * (w0 * q0 + w2 * q2 - w1 * q3),
        0.5 * (w1 * q0 - w2 * q1 + w0 * q3),
        0.5 * (w2 * q0 + w1 * q1 - w0 * q2),
    )


def _check_patch(i: int) -> int:
    if i not in (0, 1, 2, 3):
        raise ValueError(f"patch index must be 0..3, got {i}")
    return int(i)


def _omega(omega) -> np.ndarray:
    w = np.asarray(omega, dtype=float).reshape(3)
    if not np.all(np.isfinite(w)):
        raise ValueError(f"angular velocity must be finite, got {w}")
    return w


def _unpack(p: PatchRotation) -> tuple[int, np.ndarray]:
    if not isinstance(p, PatchRotation):
        raise TypeError(f"expected a PatchRotation, got {type(p).__name__}")
    return p.i, p.x


def h_matrix(omega) -> np.ndarray:
    """The 4x4 skew-symmetric rate matrix H of the quaternion equation."""
    w1, w2, w3 = _omega(omega)
    return np.array(
        [
            [0.0, -w1, -w2, -w3],
            [w1, 0.0, w3, -w2],
            [w2, -w3, 0.0, w1],
            [w3, w2, -w1, 0.0],
        ]
    )


def w_column(omega, i: int) -> np.ndarray:
    """Column ``i`` of H with its zero diagonal entry removed."""
    w = _omega(omega)
    return np.array(_w_column(w[0], w[1], w[2], _check_patch(i)))


def quat_rhs(q, omega) -> np.ndarray:
    """``H(omega) q / 2``; ``q`` need not be unit length."""
    q = np.asarray(q, dtype=float).reshape(4)
    w = _omega(omega)
    return np.array(_quat_rhs(q[0], q[1], q[2], q[3], w[0], w[1], w[2]))


def _w_dot(x, omega, i) -> float:
    # same summation order as the kernels
    a = w_column(omega, i)
    x = np.asarray(x, dtype=float).reshape(3)
    return float(a[0] * x[0] + a[1] * x[1] + a[2] * x[2])


def beta(x, omega, i: int) -> float:
    """Logarithmic rate of the homogeneous scale, ``(W_i . x) / 2``."""
    return 0.5 * _w_dot(x, omega, i)


def patch_rhs(p: PatchRotation, omega) -> np.ndarray:
    """Time derivative of the chart coordinates of ``p``."""
    i, xv = _unpack(p)
    w = _omega(omega)
    return np.array(_patch_rhs(xv[0], xv[1], xv[2], i, w[0], w[1], w[2]))


def patch_delta(p: PatchRotation, omega, dt: float) -> np.ndarray:
    """Chart increment reproducing one quaternion Euler step exactly.

    ``to_patch(q + H q dt / 2, i) == x + patch_delta(...)`` whenever ``q`` is
    any representative of the chart point. No renormalization is involved.
    """
    i, xv = _unpack(p)
    w = _omega(omega)
    d0, d1, d2, den = _patch_delta(xv[0], xv[1], xv[2], i, w[0], w[1], w[2], float(dt))
    if abs(den) < DEGENERATE_DENOMINATOR:
        raise StepError("patch Euler step degenerate; reduce dt or switch patch")
    return np.array([d0, d1, d2])


def scale_factor(p: PatchRotation, omega, dt: float) -> float:
    """``1 - (W_i . x) dt / 2``; ``patch_delta / dt == patch_rhs / scale_factor``."""
    i, xv = _unpack(p)
    return 1.0 - _w_dot(xv, omega, i) * dt / 2.0


# Vectorized forms used by the numpy backend of the benchmark.

_W_PERM = np.array([[0, 1, 2], [0, 2, 1], [1, 2, 0], [2, 1, 0]])
_W_SIGN = np.array([[1.0, 1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])


def patch_rhs_batch(x: np.ndarray, i: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """``patch_rhs`` over rows of ``x`` (n, 3), ``i`` (n,), ``omega`` (n, 3)."""
    a = np.take_along_axis(omega, _W_PERM[i], axis=1) * _W_SIGN[i]
    d = np.einsum("ij,ij->i", a, x)
    c = np.cross(a, x)
    c[i % 2 == 0] *= -1.0
    return 0.5 * (a + d[:, None] * x + c)


def quat_rhs_batch(q: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """``quat_rhs`` over rows of ``q`` (n, 4) and ``omega`` (n, 3)."""
    w0, w1, w2 = omega[:, 0], omega[:, 1], omega[:, 2]
    q0, q1, q2, q3 = q[:, 0], q[:, 1], q[:, 2], q[:, 3]
    out = np.empty_like(q)
    out[:, 0] = -w0 * q1 - w1 * q2 - w2 * q3
    out[:, 1] = w0 * q0 + w2 * q2 - w1 * q3
    out[:, 2] = w1 * q0 - w2 * q1 + w0 * q3
    out[:, 3] = w2 * q0 + w1 * q1 - w0 * q2
    out *= 0.5
    return out
