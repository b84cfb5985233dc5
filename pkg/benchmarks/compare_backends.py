"""Compare the numba and numpy backends.

Each backend runs in its own interpreter (the backend is fixed at import
time by ``PATCHROT_BACKEND``). Reported per backend: per-call time of the two
right-hand sides, and wall time of a tumble propagation for every scheme.

    python3 benchmarks/compare_backends.py [--calls 1e6] [--t1 10]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from patchrot import BACKEND, AttitudeState, StepperConfig, propagate
from patchrot.harness.bench import run_bench
from patchrot.harness.profiles import TumbleProfile

calls, t1, dt = int(float(sys.argv[1])), float(sys.argv[2]), float(sys.argv[3])
res = run_bench(calls=calls, trials=3)
out = {"backend": BACKEND, "patch_ns": res.patch_ns, "quat_ns": res.quat_ns, "propagate": {}}
prof = TumbleProfile(1, 0.5, 3.0)
for scheme in ("patch-euler", "patch-rk4", "quat-euler", "quat-rk4"):
    cfg = StepperConfig(scheme, dt)
    propagate(AttitudeState.identity(), prof, 0.0, 10 * dt, cfg)  # compile / warm up
    start = time.perf_counter()
    propagate(AttitudeState.identity(), prof, 0.0, t1, cfg)
    out["propagate"][scheme] = time.perf_counter() - start
print(json.dumps(out))
"""


def run_backend(backend, calls, t1, dt):
    env = dict(os.environ, PATCHROT_BACKEND=backend)
    proc = subprocess.run([sys.executable, "-c", CHILD, str(calls), str(t1), str(dt)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--calls", type=float, default=1e6, help="RHS evaluations per kernel")
    ap.add_argument("--t1", type=float, default=10.0, help="propagation horizon (s)")
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args(argv)

    results = [run_backend(b, args.calls, args.t1, args.dt) for b in ("numba", "numpy")]
    nb, npy = results
    print(f"{'measurement':<24}{'numba':>14}{'numpy':>14}{'speedup':>10}")
    for key, unit in (("patch_ns", "ns/call"), ("quat_ns", "ns/call")):
        print(f"{key[:-3] + '_rhs ' + unit:<24}{nb[key]:>14.3f}{npy[key]:>14.3f}{npy[key] / nb[key]:>10.1f}")
    for scheme in nb["propagate"]:
        a, b = nb["propagate"][scheme], npy["propagate"][scheme]
        print(f"{scheme + ' (s)':<24}{a:>14.4f}{b:>14.4f}{b / a:>10.1f}")
    print(f"patch/quat rhs ratio: numba {nb['patch_ns'] / nb['quat_ns']:.3f}, "
          f"numpy {npy['patch_ns'] / npy['quat_ns']:.3f}")


if __name__ == "__main__":
    main()
