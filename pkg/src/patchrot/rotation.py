"""Quaternions, rotation matrices and the four affine charts of RP^3.

Quaternions are scalar-first ``(s, v1, v2, v3)`` and multiply with the
Hamilton convention, so that ``quat_to_matrix(hamilton(q, p))`` equals
``quat_to_matrix(q) @ quat_to_matrix(p)``.

Most functions broadcast over leading axes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from patchrot import projective

UNIT_TOL = 1e-12
_SMALL_ANGLE = 1e-8


def skew(a) -> np.ndarray:
    """Cross-product matrix: ``skew(a) @ b == np.cross(a, b)``."""
    a = np.asarray(a, dtype=float)
    out = np.zeros(a.shape[:-1] + (3, 3))
    out[..., 0, 1] = -a[..., 2]
    out[..., 0, 2] = a[..., 1]
    out[..., 1, 0] = a[..., 2]
    out[..., 1, 2] = -a[..., 0]
    out[..., 2, 0] = -a[..., 1]
    out[..., 2, 1] = a[..., 0]
    return out


def quat_to_matrix(q) -> np.ndarray:
    """Rotation matrix ``(2s^2 - 1) I + 2 v v^T + 2 s [v]_x`` of a quaternion.

    The formula is applied as written; a non-unit ``q`` gives a non-orthogonal
    result, which is how norm drift shows up downstream.
    """
    q = np.asarray(q, dtype=float)
    s = q[..., 0]
    v = q[..., 1:]
    eye = np.broadcast_to(np.eye(3), q.shape[:-1] + (3, 3))
    return (
        (2.0 * s * s - 1.0)[..., None, None] * eye
        + 2.0 * v[..., :, None] * v[..., None, :]
        + 2.0 * s[..., None, None] * skew(v)
    )


def _homogeneous(x, i) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return projective.from_patch(x, int(i))
    i = np.broadcast_to(np.asarray(i), x.shape[:-1])
    z = np.empty(x.shape[:-1] + (4,))
    for k in range(4):
        mask = i == k
        z[mask] = np.insert(x[mask], k, 1.0, axis=-1)
    return z


def patch_to_quat(i, x) -> np.ndarray:
    """Unit quaternion of chart point ``x`` in patch ``i``, with ``q[i] > 0``."""
    z = _homogeneous(x, i)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def quat_to_patch(q) -> tuple[int, np.ndarray]:
    """Best-patch chart coordinates of a quaternion; ``q`` and ``-q`` agree."""
    q = np.asarray(q, dtype=float)
    i = projective.best_patch(q)
    return i, projective.to_patch(q, i)


def patch_to_matrix(i, x) -> np.ndarray:
    """Rotation matrix of a chart point as a ratio of quadratics (no sqrt)."""
    z = _homogeneous(x, i)
    s = z[..., 0]
    v = z[..., 1:]
    vv = np.sum(v * v, axis=-1)
    n2 = s * s + vv
    eye = np.broadcast_to(np.eye(3), z.shape[:-1] + (3, 3))
    num = (
        (s * s - vv)[..., None, None] * eye
        + 2.0 * v[..., :, None] * v[..., None, :]
        + 2.0 * s[..., None, None] * skew(v)
    )
    return num / n2[..., None, None]


def hamilton(q, p) -> np.ndarray:
    """Hamilton product of scalar-first quaternions."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    s1, v1 = q[..., :1], q[..., 1:]
    s2, v2 = p[..., :1], p[..., 1:]
    s = s1 * s2 - np.sum(v1 * v2, axis=-1, keepdims=True)
    v = s1 * v2 + s2 * v1 + np.cross(v1, v2)
    return np.concatenate([s, v], axis=-1)


def quat_exp_body(omega, t) -> np.ndarray:
    """Rotation accumulated over time ``t`` at constant body rate ``omega``.

    Returns ``(cos(theta/2), sin(theta/2) * omega_hat)`` with
    ``theta = |omega| t``. ``t`` may be an array; the result then has a
    leading time axis.
    """
    omega = np.asarray(omega, dtype=float)
    t = np.asarray(t, dtype=float)
    rate = np.linalg.norm(omega)
    half = 0.5 * rate * t
    # sin(theta/2) / |omega|, with the t/2 limit for tiny rotations
    with np.errstate(invalid="ignore", divide="ignore"):
        k = np.where(np.abs(rate * t) < _SMALL_ANGLE, 0.5 * t, np.sin(half) / rate)
    out = np.empty(t.shape + (4,))
    out[..., 0] = np.cos(half)
    out[..., 1:] = k[..., None] * omega
    return out


def geodesic_distance(q1, q2) -> np.ndarray | float:
    """Rotation angle between two unit quaternions, in ``[0, pi]``.

    Mathematically ``2 arccos(|q1 . q2|)``; evaluated through ``atan2`` so
    that angles near zero keep full relative precision.
    """
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    sign = np.where(np.sum(q1 * q2, axis=-1, keepdims=True) < 0.0, -1.0, 1.0)
    q2 = sign * q2
    diff = np.linalg.norm(q1 - q2, axis=-1)
    summ = np.linalg.norm(q1 + q2, axis=-1)
    angle = 4.0 * np.arctan2(diff, summ)
    return float(angle) if angle.ndim == 0 else angle


def orthogonality_defect(r) -> np.ndarray | float:
    """Frobenius norm of ``R^T R - I``."""
    r = np.asarray(r, dtype=float)
    g = np.swapaxes(r, -1, -2) @ r - np.eye(3)
    out = np.sqrt(np.sum(g * g, axis=(-2, -1)))
    return float(out) if out.ndim == 0 else out


def random_unit_quaternions(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` quaternions uniformly distributed on the 3-sphere."""
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


@dataclass(frozen=True)
class UnitQuaternion:
    """A scalar-first unit quaternion. The constructor normalizes."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).reshape(4)
        n = np.linalg.norm(q)
        if not np.isfinite(n) or n == 0.0:
            raise ValueError("cannot normalize a zero or non-finite quaternion")
        object.__setattr__(self, "q", q / n)

    @classmethod
    def identity(cls) -> UnitQuaternion:
        return cls(np.array([1.0, 0.0, 0.0, 0.0]))

    @property
    def s(self) -> float:
        return float(self.q[0])

    @property
    def v(self) -> np.ndarray:
        return self.q[1:]

    def as_array(self) -> np.ndarray:
        assert abs(np.linalg.norm(self.q) - 1.0) <= UNIT_TOL
        return self.q.copy()

    def as_matrix(self) -> np.ndarray:
        return quat_to_matrix(self.q)

    def to_patch(self) -> PatchRotation:
        i, x = quat_to_patch(self.q)
        return PatchRotation(i, x)

    def __mul__(self, other: UnitQuaternion) -> UnitQuaternion:
        return UnitQuaternion(hamilton(self.q, other.q))

    def __neg__(self) -> UnitQuaternion:
        return UnitQuaternion(-self.q)


@dataclass(frozen=True)
class PatchRotation:
    """A rotation as chart point ``x`` in affine patch ``i`` of RP^3."""

    i: int
    x: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.i not in (0, 1, 2, 3):
            raise projective.PatchDomainError(f"patch index must be 0..3, got {self.i}")
        x = np.array(self.x, dtype=float).reshape(3)
        object.__setattr__(self, "i", int(self.i))
        object.__setattr__(self, "x", x)

    @property
    def homogeneous(self) -> np.ndarray:
        return projective.from_patch(self.x, self.i)

    def to_quat(self) -> UnitQuaternion:
        return UnitQuaternion(patch_to_quat(self.i, self.x))

    def as_matrix(self) -> np.ndarray:
        return patch_to_matrix(self.i, self.x)
