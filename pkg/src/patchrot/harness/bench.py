"""Timing of the patch and quaternion right-hand sides.

Both kernels are called on the same number of pre-generated random inputs
and their results are accumulated into output buffers, so the calls cannot
be dropped by the compiler. Under the numpy backend the vectorized batch
forms are timed instead.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from patchrot import _accel, rotation
from patchrot._accel import jit
from patchrot.kinematics import _patch_rhs, _quat_rhs, patch_rhs_batch, quat_rhs_batch


@jit
def _loop_patch(x, idx, w, out, reps):
    n = x.shape[0]
    for _ in range(reps):
        for k in range(n):
            a, b, c = _patch_rhs(x[k, 0], x[k, 1], x[k, 2], idx[k], w[k, 0], w[k, 1], w[k, 2])
            out[k, 0] += a
            out[k, 1] += b
            out[k, 2] += c


@jit
def _loop_quat(q, w, out, reps):
    n = q.shape[0]
    for _ in range(reps):
        for k in range(n):
            a, b, c, d = _quat_rhs(q[k, 0], q[k, 1], q[k, 2], q[k, 3], w[k, 0], w[k, 1], w[k, 2])
            out[k, 0] += a
            out[k, 1] += b
            out[k, 2] += c
            out[k, 3] += d


@dataclass
class BenchResult:
    backend: str
    calls: int
    patch_seconds: list
    quat_seconds: list

    @property
    def patch_ns(self) -> float:
        return float(np.median(self.patch_seconds)) / self.calls * 1e9

    @property
    def quat_ns(self) -> float:
        return float(np.median(self.quat_seconds)) / self.calls * 1e9

    @property
    def ratio(self) -> float:
        return self.patch_ns / self.quat_ns

    def rows(self):
        yield ("patch_rhs", self.calls, self.patch_ns)
        yield ("quat_rhs", self.calls, self.quat_ns)


def make_inputs(batch: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2.0, 2.0, (batch, 3))
    idx = rng.integers(0, 4, batch).astype(np.int64)
    w = rng.normal(0.0, 3.0, (batch, 3))
    q = rotation.random_unit_quaternions(rng, batch)
    return x, idx, w, q


def run_bench(calls: int = 10_000_000, batch: int = 4096, trials: int = 5,
              seed: int = 0) -> BenchResult:
    """Median wall time of ``calls`` evaluations of each kernel over ``trials``.

    The two kernels alternate within each trial.
    """
    x, idx, w, q = make_inputs(batch, seed)
    reps = -(-calls // batch)
    total = reps * batch
    patch_t, quat_t = [], []
    if _accel.USE_NUMBA:
        out3 = np.zeros((batch, 3))
        out4 = np.zeros((batch, 4))
        _loop_patch(x, idx, w, out3, 1)
        _loop_quat(q, w, out4, 1)
        for _ in range(trials):
            t0 = time.perf_counter()
            _loop_patch(x, idx, w, out3, reps)
            t1 = time.perf_counter()
            _loop_quat(q, w, out4, reps)
            t2 = time.perf_counter()
            patch_t.append(t1 - t0)
            quat_t.append(t2 - t1)
        if not (np.all(np.isfinite(out3)) and np.all(np.isfinite(out4))):
            raise FloatingPointError("benchmark accumulators overflowed")
    else:
        for _ in range(trials):
            acc3 = np.zeros((batch, 3))
            acc4 = np.zeros((batch, 4))
            t0 = time.perf_counter()
            for _ in range(reps):
                acc3 += patch_rhs_batch(x, idx, w)
            t1 = time.perf_counter()
            for _ in range(reps):
                acc4 += quat_rhs_batch(q, w)
            t2 = time.perf_counter()
            patch_t.append(t1 - t0)
            quat_t.append(t2 - t1)
    return BenchResult(_accel.BACKEND, total, patch_t, quat_t)
