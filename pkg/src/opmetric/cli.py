"""Command-line front end.

Every command prints one JSON document on stdout whose ``value`` field holds
the headline number; floats are printed with 17 significant digits.
Diagnostics go to stderr. Exit codes: 0 success, 1 bad input, 2 numerical
failure, 3 no convergence.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import fileio
from .checks import SUITES, run_suite
from .chk import barycenter, distance, geodesic_point, midpoint
from .convexity import chebyshev_center
from .dynamics import IsometryGroup, find_fixed_point, orbit
from .errors import InputError, NoConvergence, NumericalError, UnboundedOrbitSuspected

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL, EXIT_NO_CONVERGENCE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # usage errors count as input errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _print(doc: dict) -> None:
    sys.stdout.write(fileio.dumps(doc))


def _write_operator(path, t) -> None:
    if path:
        fileio.write_operator_file(path, t)


def _cmd_dist(args) -> int:
    a, b = fileio.parse_operator_file(args.a), fileio.parse_operator_file(args.b)
    _print({"command": "dist", "value": distance(a, b)})
    return EXIT_OK


def _operator_output(command: str, q, args) -> int:
    _write_operator(args.output, q)
    _print({"command": command, "value": fileio.operator_document(q)})
    return EXIT_OK


def _cmd_midpoint(args) -> int:
    a, b = fileio.parse_operator_file(args.a), fileio.parse_operator_file(args.b)
    return _operator_output("midpoint", midpoint(a, b), args)


def _cmd_geodesic(args) -> int:
    if not 0.0 <= args.t <= 1.0:
        raise InputError(f"--t must lie in [0, 1], got {args.t}")
    a, b = fileio.parse_operator_file(args.a), fileio.parse_operator_file(args.b)
    return _operator_output("geodesic", geodesic_point(a, b, args.t), args)


def _cmd_barycenter(args) -> int:
    pts = [fileio.parse_operator_file(p) for p in args.files]
    return _operator_output("barycenter", barycenter(pts), args)


def _cmd_center(args) -> int:
    pts = [fileio.parse_operator_file(p) for p in args.files]
    res = chebyshev_center(pts, tol=args.tol, max_iter=args.max_iter, strict=True)
    _write_operator(args.output, res.center)
    _print(
        {
            "command": "center",
            "value": res.radius,
            "iterations": res.iterations,
            "center": fileio.operator_document(res.center),
        }
    )
    return EXIT_OK


def _group(paths) -> IsometryGroup:
    return IsometryGroup(tuple(fileio.parse_generator_file(p) for p in paths))


def _cmd_fixed_point(args) -> int:
    g = _group(args.gen)
    t0 = fileio.parse_operator_file(args.start)
    res = find_fixed_point(g, t0, tol=args.tol, max_iter=args.max_iter)
    _write_operator(args.output, res.point)
    _print(
        {
            "command": "fixed-point",
            "value": res.residual,
            "converged": res.converged,
            "orbit_bounded": res.orbit_bounded,
            "iterations": res.iterations,
            "point": fileio.operator_document(res.point),
        }
    )
    if not res.orbit_bounded:
        print("warning: orbit diameter keeps growing; the group may have no fixed point", file=sys.stderr)
    if not res.converged:
        print(f"error: residual {res.residual:.3e} above tolerance {args.tol:g}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def _cmd_orbit(args) -> int:
    if args.depth < 1:
        raise InputError("--depth must be at least 1")
    g = _group(args.gen)
    o = orbit(g, fileio.parse_operator_file(args.start), args.depth)
    _print(
        {
            "command": "orbit",
            "value": o.diameter_by_depth[-1],
            "points": len(o.hats),
            "truncated": o.truncated,
            "diameter_by_depth": o.diameter_by_depth,
            "radius_by_depth": o.radius_by_depth,
            "growth_per_step": o.growth_per_step(),
        }
    )
    return EXIT_OK


def _cmd_check(args) -> int:
    if args.samples < 1:
        raise InputError("--samples must be at least 1")
    results = run_suite(args.suite, args.samples, args.seed)
    failed = [r for r in results if not r.passed]
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.suite}.{r.name} worst={r.worst:.3e} tol={r.tolerance:g}", file=sys.stderr)
    _print(
        {
            "command": "check",
            "suite": args.suite,
            "seed": args.seed,
            "samples": args.samples,
            "value": len(failed),
            "passed": not failed,
            "properties": [
                {
                    "name": f"{r.suite}.{r.name}",
                    "passed": r.passed,
                    "worst": r.worst,
                    "tolerance": r.tolerance,
                    "count": r.samples,
                }
                for r in results
            ],
        }
    )
    return EXIT_OK if not failed else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opmetric", description="Hyperbolic metric on closed operators at matrix scale.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("dist", help="distance between two operators")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=_cmd_dist)

    s = sub.add_parser("midpoint", help="geodesic midpoint")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_midpoint)

    s = sub.add_parser("geodesic", help="point at fraction t along the geodesic")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_geodesic)

    s = sub.add_parser("barycenter", help="pairwise-midpoint barycenter")
    s.add_argument("files", nargs="+")
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_barycenter)

    s = sub.add_parser("center", help="Chebyshev centre of a configuration")
    s.add_argument("files", nargs="+")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=5000)
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_center)

    s = sub.add_parser("fixed-point", help="common fixed point of a generated group")
    s.add_argument("--gen", nargs="+", required=True)
    s.add_argument("--start", required=True)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=200)
    s.add_argument("-o", "--output")
    s.set_defaults(func=_cmd_fixed_point)

    s = sub.add_parser("orbit", help="orbit diameters by word length")
    s.add_argument("--gen", nargs="+", required=True)
    s.add_argument("--start", required=True)
    s.add_argument("--depth", type=int, default=6)
    s.set_defaults(func=_cmd_orbit)

    s = sub.add_parser("check", help="run the seeded property suite")
    s.add_argument("--suite", choices=SUITES + ("all",), default="all")
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        # InputError derives from ValueError
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, np.linalg.LinAlgError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (NoConvergence, UnboundedOrbitSuspected) as e:
        print(f"no convergence: {e}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
