"""Homogeneous coordinates on real projective n-space and its affine patches.

The k-th affine patch is the set of points whose k-th homogeneous coordinate
is nonzero. Its chart divides through by that coordinate and drops the
resulting 1, which identifies the patch with R^n.
"""
from __future__ import annotations

import numpy as np

TINY_DENOMINATOR = 1e-300
DEFAULT_SWITCH_THRESHOLD = 2.0


class PatchDomainError(ValueError):
    """Raised when a point is outside the requested patch."""


def _as_vector(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise ValueError(f"expected a 1-D coordinate vector, got shape {z.shape}")
    return z


def to_patch(z, k: int, tiny: float = TINY_DENOMINATOR) -> np.ndarray:
    """Chart coordinates of the homogeneous point ``z`` in patch ``k``.

    Raises PatchDomainError when ``|z[k]|`` is zero or below ``tiny``.
    """
    z = _as_vector(z)
    if not 0 <= k < z.size:
        raise PatchDomainError(f"patch index {k} out of range for P^{z.size - 1}")
    d = z[k]
    if d == 0.0 or abs(d) < tiny:
        raise PatchDomainError(f"point not in patch {k}")
    return np.delete(z / d, k)


def from_patch(x, k: int) -> np.ndarray:
    """Homogeneous representative with a 1 inserted at slot ``k``."""
    x = _as_vector(x)
    if not 0 <= k <= x.size:
        raise PatchDomainError(f"patch index {k} out of range for R^{x.size}")
    return np.insert(x, k, 1.0)


def best_patch(z) -> int:
    """Index of the largest-magnitude component; ties go to the lowest index."""
    z = _as_vector(z)
    a = np.abs(z)
    if not np.any(a > 0.0):
        raise PatchDomainError("the zero vector is not a projective point")
    # np.argmax returns the first maximum, which is the tie-break we want.
    return int(np.argmax(a))


def needs_switch(x, threshold: float = DEFAULT_SWITCH_THRESHOLD) -> bool:
    """True when some chart coordinate has magnitude strictly above ``threshold``."""
    if threshold < 1.0:
        raise ValueError(f"switch threshold must be >= 1, got {threshold}")
    return bool(np.any(np.abs(_as_vector(x)) > threshold))


def switch_patch(x, k_from: int) -> tuple[np.ndarray, int]:
    """Re-express chart point ``x`` of patch ``k_from`` in its best patch.

    Every returned coordinate has magnitude at most 1.
    """
    z = from_patch(x, k_from)
    k = best_patch(z)
    return to_patch(z, k), k


def same_point(z, w, rtol: float = 1e-12) -> bool:
    """Whether two homogeneous vectors represent the same projective point."""
    z = _as_vector(z)
    w = _as_vector(w)
    if z.shape != w.shape:
        return False
    k = best_patch(z)
    if abs(w[k]) < TINY_DENOMINATOR:
        return False
    return bool(np.allclose(z / z[k], w / w[k], rtol=0.0, atol=rtol))
