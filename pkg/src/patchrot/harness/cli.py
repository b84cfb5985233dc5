"""``patchrot`` command line: integrate, convergence, bench.

Exit codes: 0 success, 2 usage error, 3 runtime/step error.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import os
import sys

import numpy as np

from patchrot import _accel
from patchrot.harness.bench import run_bench
from patchrot.harness.convergence import final_errors, fit_slope
from patchrot.harness.profiles import ProfileError, parse_profile
from patchrot.harness.report import build_report, reference_quaternions, write_report
from patchrot.integrate import SCHEMES, AttitudeState, StepperConfig, propagate_grid, time_grid
from patchrot.kinematics import StepError

EXIT_USAGE = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    v = float(text)
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _quaternion(text):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected s,x,y,z")
    q = np.array([float(p) for p in parts])
    if not np.linalg.norm(q) > 0:
        raise argparse.ArgumentTypeError("quaternion must be nonzero")
    return q / np.linalg.norm(q)


def _add_common(p):
    p.add_argument("--profile", required=True,
                   help="constant:x,y,z | sinusoid:ax,ay,az:f:phase | tumble:seed:bw:rms | csv:PATH")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t1", type=float, required=True)
    p.add_argument("--switch-threshold", type=float, default=2.0)
    p.add_argument("--renormalize-every", type=int, default=1, metavar="N",
                   help="quaternion schemes: renormalize every N steps (0 = never)")
    p.add_argument("--q0", type=_quaternion, default=np.array([1.0, 0.0, 0.0, 0.0]),
                   help="initial attitude quaternion s,x,y,z (default identity)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for tumble profiles given without one")
    p.add_argument("--out", default="-", help="output CSV path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="patchrot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="propagate one scheme and write a per-step report")
    p.add_argument("--scheme", choices=SCHEMES, required=True)
    p.add_argument("--dt", type=_positive_float, required=True)
    _add_common(p)

    p = sub.add_parser("convergence", help="final error versus dt for one or more schemes")
    p.add_argument("--scheme", choices=SCHEMES, action="append",
                   help="repeatable; default all schemes")
    p.add_argument("--dts", default="1e-2,5e-3,2.5e-3",
                   help="comma-separated step sizes, at least 3")
    _add_common(p)

    p = sub.add_parser("bench", help="time patch_rhs against quat_rhs")
    p.add_argument("--calls", type=float, default=1e7)
    p.add_argument("--batch", type=int, default=4096)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    return parser


@contextlib.contextmanager
def _output(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _check_common(parser, args):
    if args.t1 < args.t0:
        parser.error(f"--t1 ({args.t1}) must not be less than --t0 ({args.t0})")
    if args.switch_threshold < 1.0:
        parser.error("--switch-threshold must be >= 1")
    if args.renormalize_every < 0:
        parser.error("--renormalize-every must be >= 0")
    try:
        return parse_profile(args.profile, default_seed=args.seed)
    except ProfileError as exc:
        parser.error(f"--profile: {exc}")


def cmd_integrate(parser, args) -> int:
    profile = _check_common(parser, args)
    config = StepperConfig(args.scheme, args.dt, args.switch_threshold, args.renormalize_every)
    nodes = time_grid(args.t0, args.t1, args.dt)
    initial = AttitudeState(args.q0, args.t0)
    try:
        traj = propagate_grid(initial, profile, nodes, config)
    except StepError as exc:
        print(f"patchrot: step error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    report = build_report(traj, reference_quaternions(profile, nodes, args.q0))
    with _output(args.out) as fh:
        write_report(report, fh)
    s = report.summary
    print(f"# scheme={s['scheme']} steps={s['steps']} final_geo_err={s['final_geo_err']:.6g} "
          f"switches={s['switches']} max_ortho_defect={s['max_ortho_defect']:.3g} "
          f"ns_per_rhs={s['wall_time_per_rhs_s'] * 1e9:.4g} backend={_accel.BACKEND}",
          file=sys.stderr)
    return 0


def cmd_convergence(parser, args) -> int:
    profile = _check_common(parser, args)
    try:
        dts = sorted((float(v) for v in args.dts.split(",")), reverse=True)
    except ValueError:
        parser.error(f"--dts: not a list of numbers: {args.dts!r}")
    if len(dts) < 3 or min(dts) <= 0:
        parser.error("--dts needs at least 3 positive step sizes")
    if args.t1 <= args.t0:
        parser.error("convergence needs --t1 > --t0")
    schemes = args.scheme or list(SCHEMES)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scheme", "dt", "error", "slope"])
        for scheme in schemes:
            try:
                errs = final_errors(scheme, profile, args.t0, args.t1, dts, args.q0,
                                    args.switch_threshold, args.renormalize_every)
            except StepError as exc:
                print(f"patchrot: step error: {exc}", file=sys.stderr)
                return EXIT_RUNTIME
            slope = fit_slope(dts, errs)
            for dt, e in zip(dts, errs):
                w.writerow([scheme, "%.17g" % dt, "%.17g" % e, "%.6f" % slope])
    return 0


def cmd_bench(parser, args) -> int:
    if args.calls < 1 or args.batch < 1 or args.trials < 1:
        parser.error("--calls, --batch and --trials must be positive")
    res = run_bench(int(args.calls), args.batch, args.trials, args.seed)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kernel", "backend", "calls", "ns_per_call"])
        for name, calls, ns in res.rows():
            w.writerow([name, res.backend, calls, "%.6g" % ns])
        w.writerow(["ratio_patch_over_quat", res.backend, res.calls, "%.6g" % res.ratio])
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"integrate": cmd_integrate, "convergence": cmd_convergence, "bench": cmd_bench}
    try:
        return handler[args.command](parser, args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0


if __name__ == "__main__":
    sys.exit(main())
