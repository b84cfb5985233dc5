"""Backend selection for the hot kernels.

Set ``PATCHROT_BACKEND=numpy`` to run every kernel as plain Python/numpy
(useful for debugging, coverage, or machines without numba). The default is
``numba`` when it is importable.
"""
import os

BACKEND_ENV = "PATCHROT_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {_requested!r}")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = _requested == "numba" and numba is not None
BACKEND = "numba" if USE_NUMBA else "numpy"


def jit(fn):
    """Compile ``fn`` with ``numba.njit`` or return it untouched."""
    if USE_NUMBA:
        return numba.njit(cache=True)(fn)
    return fn
