"""Command-line interface: lift, reachable, census, holonomy, invariants, critical-radii.

JSON goes in, JSON (stdout) and CSV (files) come out; all angles are
radians.  Exit codes: 0 success, 1 malformed input, 2 near-critical abort
(with partial CSV when a trajectory was underway), 3 tracking divergence.
With ``--plot`` the report additionally renders a PNG figure next to the
data output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as aio
from .arm import ArmSpec, critical_radii
from .errors import ArmError, NearCritical, TrackingDiverged
from .holonomy import commutator_estimate
from .lift import LiftOptions, lift_path, monitor_invariants
from .morse import critical_points, morse_census
from .reach import reachable

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEAR_CRITICAL = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    # Argument errors are input errors: keep them on exit code 1 so code 2
    # stays reserved for near-critical aborts.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(payload) -> None:
    sys.stdout.write(aio.dump_json(payload))


def _fail(message: str, **extra) -> None:
    sys.stderr.write(aio.dump_json({"error": message, **extra}))


def _plot_path(args, default_name: str) -> Path:
    return Path(args.plot_dir) / default_name


def cmd_lift(args) -> int:
    spec = aio.load_arm(args.arm)
    curve = aio.load_curve(args.curve)
    q0 = aio.load_configuration(args.q0, dim=spec.dim)
    opts = LiftOptions(step=args.step, margin=args.margin)
    out = Path(args.out)
    try:
        traj = lift_path(spec, q0, curve, opts)
    except (NearCritical, TrackingDiverged) as err:
        partial = getattr(err, "partial", None)
        if partial is not None and len(partial.times) > 0:
            aio.write_trajectory_csv(partial, out)
        _fail(str(err), partial_rows=0 if partial is None else len(partial.times))
        return EXIT_NEAR_CRITICAL if isinstance(err, NearCritical) else EXIT_DIVERGED
    aio.write_trajectory_csv(traj, out)
    report = monitor_invariants(spec, traj)
    _emit(report.to_dict())
    if args.plot:
        from . import plotting

        plotting.trajectory_figure(spec, traj, out.with_suffix(".png"))
    return EXIT_OK


def cmd_reachable(args) -> int:
    spec = aio.load_arm(args.arm)
    z0 = aio.load_configuration(args.z0, dim=spec.dim)
    z1 = aio.load_configuration(args.z1, dim=spec.dim)
    verdict = reachable(spec, z0, z1, tol=args.tol, coincidence_tol=args.coincidence_tol)
    _emit(verdict.to_dict())
    return EXIT_OK


def cmd_census(args) -> int:
    counts = morse_census(args.m, args.b)
    _emit(aio.census_payload(args.m, args.b, counts))
    if args.plot:
        from . import plotting

        points = critical_points(args.m, args.b)
        plotting.census_figure(
            args.m, args.b, points, _plot_path(args, f"census_m{args.m}_b{args.b}.png")
        )
    return EXIT_OK


def cmd_holonomy(args) -> int:
    spec = aio.load_arm(args.arm)
    q = aio.load_configuration(args.q, dim=spec.dim)
    try:
        report = commutator_estimate(
            spec, q, side=args.side, options=LiftOptions(step=args.step)
        )
    except NearCritical as err:
        _fail(str(err))
        return EXIT_NEAR_CRITICAL
    _emit(report.to_dict())
    if args.plot:
        from . import plotting

        plotting.holonomy_figure(
            spec, report, _plot_path(args, f"holonomy_side{args.side}.png")
        )
    return EXIT_OK


def cmd_invariants(args) -> int:
    spec = aio.load_arm(args.arm)
    traj = aio.read_trajectory_csv(args.trajectory, spec)
    report = monitor_invariants(spec, traj)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_critical_radii(args) -> int:
    spec = aio.load_arm(args.arm)
    _emit(
        {
            "radii": [float(r) for r in critical_radii(spec)],
            "total_length": spec.total_length,
        }
    )
    return EXIT_OK


def _positive(value: str) -> float:
    out = float(value)
    if not out > 0.0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="armlift", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lift", help="lift a target curve to a joint trajectory (CSV)")
    p.add_argument("arm", help='arm JSON: {"lengths": [...], "dim": 2}')
    p.add_argument("curve", help='curve JSON: {"segments": [...]}')
    p.add_argument("--q0", required=True, help="start configuration JSON")
    p.add_argument("--step", type=_positive, default=1e-3, help="RK4 step (default 1e-3)")
    p.add_argument("--margin", type=float, default=0.0, help="abort margin around critical radii")
    p.add_argument("--out", default="trajectory.csv", help="CSV output path")
    p.add_argument("--plot", action="store_true", help="render a PNG next to the CSV")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("reachable", help="decide reachability between two configurations")
    p.add_argument("arm")
    p.add_argument("z0")
    p.add_argument("z1")
    p.add_argument("--tol", type=_positive, default=1e-8, help="invariant tolerance")
    p.add_argument("--coincidence-tol", type=_positive, default=1e-9)
    p.set_defaults(func=cmd_reachable)

    p = sub.add_parser("census", help="critical points of the fiber angle sum (unit arm)")
    p.add_argument("m", type=int, help="number of unit segments")
    p.add_argument("b", type=float, help="positive regular basepoint on the real axis")
    p.add_argument("--plot", action="store_true")
    p.add_argument("--plot-dir", default=".")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("holonomy", help="square-loop holonomy and curvature estimate")
    p.add_argument("arm")
    p.add_argument("q", help="start configuration JSON")
    p.add_argument("--side", type=_positive, default=0.05, help="square side length")
    p.add_argument("--step", type=_positive, default=1e-3)
    p.add_argument("--plot", action="store_true")
    p.add_argument("--plot-dir", default=".")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("invariants", help="conservation-law drift report for a saved trajectory")
    p.add_argument("arm")
    p.add_argument("trajectory", help="CSV written by the lift command")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("critical-radii", help="critical radii of the arm")
    p.add_argument("arm")
    p.set_defaults(func=cmd_critical_radii)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError, ValueError, ArmError) as err:
        # NearCritical/TrackingDiverged subclasses handled in the commands
        # that can produce them; anything else reaching here is bad input.
        if isinstance(err, (NearCritical, TrackingDiverged)):
            _fail(str(err))
            return EXIT_NEAR_CRITICAL if isinstance(err, NearCritical) else EXIT_DIVERGED
        _fail(str(err))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
