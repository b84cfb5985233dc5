"""The numpy fallback runs the same kernels uncompiled; results must agree."""
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from patchrot import _accel

SCRIPT = r"""
import json, sys
import numpy as np
from patchrot import BACKEND
from patchrot.harness.bench import run_bench
from patchrot.harness.profiles import TumbleProfile
from patchrot.integrate import AttitudeState, StepperConfig, propagate

out = {"backend": BACKEND}
prof = TumbleProfile(seed=5, bandwidth=0.5, rms=3.0)
for scheme in ("patch-euler", "patch-rk4", "quat-euler", "quat-rk4"):
    t = propagate(AttitudeState.identity(), prof, 0.0, 3.0, StepperConfig(scheme, 0.01))
    out[scheme] = {"coords": t.coords.tolist(), "i": t.patch_index.tolist(),
                   "switches": t.n_switches}
out["bench_calls"] = run_bench(calls=20000, batch=1000, trials=1).calls
json.dump(out, sys.stdout)
"""


def run(backend):
    env = dict(os.environ, PATCHROT_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", SCRIPT], capture_output=True, text=True, env=env)
    assert res.returncode == 0, res.stderr
    return json.loads(res.stdout)


@pytest.mark.skipif(not _accel.USE_NUMBA, reason="numba backend unavailable")
def test_numpy_fallback_matches_numba():
    a = run("numba")
    b = run("numpy")
    assert (a["backend"], b["backend"]) == ("numba", "numpy")
    for scheme in ("patch-euler", "patch-rk4", "quat-euler", "quat-rk4"):
        assert a[scheme]["i"] == b[scheme]["i"]
        assert a[scheme]["switches"] == b[scheme]["switches"]
        np.testing.assert_allclose(a[scheme]["coords"], b[scheme]["coords"], rtol=0, atol=1e-12)
    assert a["bench_calls"] == b["bench_calls"] == 20000
    assert a["patch-euler"]["switches"] > 0


def test_bad_backend_flag_rejected():
    env = dict(os.environ, PATCHROT_BACKEND="fortran")
    res = subprocess.run([sys.executable, "-c", "import patchrot"], capture_output=True, text=True, env=env)
    assert res.returncode != 0
    assert "PATCHROT_BACKEND" in res.stderr
