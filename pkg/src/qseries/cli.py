"""Command-line front end.

    qseries eval SERIES --at '[0.5,0,0,0]'
    qseries star --center '[0,1,0,0]' --power 3 [--at Q] [-o OUT]
    qseries derive SERIES [--times K] [-o OUT]
    qseries reexpand SERIES --at P [--order N] [-o OUT]
    qseries region {sigma-ball,A-ball,A-sigma} --center P --radius R [--slice U] -o grid.csv [--svg fig.svg]
    qseries verify {metric,...,all} [--seed S] [--samples N]

Exit codes: 0 success, 1 a verified property failed, 2 bad input, 3 empty region.
The default seed comes from ``QSERIES_SEED`` (0 when unset).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Optional, Sequence, TextIO

from .quaternion import ImaginaryUnit, Quaternion, alignment_deviation, imaginary_unit_of
from .series import (
    DomainError,
    RegularSeries,
    derivative,
    evaluate,
    load_series,
    reexpand,
    save_series,
    star_power_eval,
    star_power_series,
)
from .sigma import (
    EmptyRegionError,
    RegionPoint,
    SigmaBall,
    cross_section,
    omega,
    omega_ball_nonempty,
    sample_boundary,
    sample_sigma_ball_boundary,
    sigma,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_EMPTY = 3
BRANCH_WARN_TOL = 1e-6
NEAR_ALIGN_TOL = 1e-6
SEED_ENV = "QSERIES_SEED"


class InputError(ValueError):
    """Malformed user input; reported with exit code 2."""


def _quaternion_arg(text: str) -> Quaternion:
    try:
        return Quaternion.from_json(text)
    except (ValueError, json.JSONDecodeError) as exc:
        raise argparse.ArgumentTypeError(f"expected a JSON 4-array [w,x,y,z]: {exc}") from exc


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _fmt(q) -> str:
    return json.dumps([float(v) for v in q])


def _fmt_float(v: float) -> str:
    return "inf" if math.isinf(v) else repr(float(v))


def _load(path: str) -> RegularSeries:
    try:
        return load_series(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit_series(f: RegularSeries, output: Optional[str], out: TextIO):
    if output:
        save_series(f, output)
    else:
        json.dump(f.to_json(), out)
        out.write("\n")


# subcommands -------------------------------------------------------------------


def cmd_eval(args, out: TextIO, err: TextIO) -> int:
    f = _load(args.series)
    q = args.at
    res = evaluate(f, q, window=args.window)
    sg = sigma(q, f.center)
    r = f.declared_radius
    print(f"value: {_fmt(res.value)}", file=out)
    print(f"sigma: {_fmt_float(sg)}", file=out)
    if r is None:
        print("ball: unknown (no declared radius)", file=out)
    else:
        print(f"ball: {'inside' if sg < r else 'outside'} (R = {_fmt_float(r)})", file=out)
    print(f"tail_bound: {_fmt_float(res.tail_bound)}", file=out)
    if r is not None and sg >= r:
        print(f"warning: sigma(q, p) = {sg:.6g} >= R = {r:.6g}; the truncated value carries no error bound", file=err)
    dev = alignment_deviation(q, f.center)
    gap = abs(omega(q, f.center) - abs(q - f.center))
    if dev <= NEAR_ALIGN_TOL and gap > BRANCH_WARN_TOL:
        print(
            f"warning: q is nearly on the slice of the center (deviation {dev:.1e}); "
            f"the two sigma branches differ by {gap:.3e}",
            file=err,
        )
    return EXIT_OK


def cmd_star(args, out: TextIO, err: TextIO) -> int:
    if args.power < 0:
        raise InputError("--power must be nonnegative")
    if args.at is not None:
        print(f"value: {_fmt(star_power_eval(args.center, args.power, args.at))}", file=out)
        print(f"sigma: {_fmt_float(sigma(args.at, args.center))}", file=out)
        return EXIT_OK
    _emit_series(star_power_series(args.center, args.power), args.output, out)
    return EXIT_OK


def cmd_derive(args, out: TextIO, err: TextIO) -> int:
    if args.times < 0:
        raise InputError("--times must be nonnegative")
    _emit_series(derivative(_load(args.series), args.times), args.output, out)
    return EXIT_OK


def cmd_reexpand(args, out: TextIO, err: TextIO) -> int:
    f = _load(args.series)
    try:
        g = reexpand(f, args.at, args.order)
    except DomainError as exc:
        raise InputError(str(exc)) from exc
    _emit_series(g, args.output, out)
    return EXIT_OK


def _slice_unit(args, center: Quaternion) -> ImaginaryUnit:
    if args.slice is not None:
        if args.slice.imag_norm() == 0.0:
            raise InputError("--slice must have a nonzero imaginary part")
        return ImaginaryUnit.normalize(args.slice)
    return imaginary_unit_of(center) or ImaginaryUnit(0.0, 1.0, 0.0, 0.0)


def _region_points(args, err: TextIO) -> tuple[list, list]:
    """Boundary curve points and grid points for ``args.kind``."""
    if not args.radius > 0:
        raise InputError("--radius must be positive")
    if args.resolution < 2:
        raise InputError("--resolution must be at least 2")
    center = args.center
    ball = SigmaBall(center, args.radius)
    unit = _slice_unit(args, center)
    if args.kind == "A-ball":
        if imaginary_unit_of(center) is not None:
            raise InputError("A-ball needs a real center")
        curves = list(sample_boundary(ball, unit, args.curve_points).points)
        grid = cross_section("A-ball", ball, unit, args.resolution)
    elif args.kind == "A-sigma":
        if not omega_ball_nonempty(ball):
            raise EmptyRegionError(
                f"Omega is empty: |Im p| = {ball.y0:.6g} >= R = {ball.radius:.6g}, so A(Sigma) is not defined"
            )
        curves = list(sample_boundary(ball, unit, args.curve_points).points)
        grid = cross_section("A-sigma", ball, unit, args.resolution)
    else:
        if not omega_ball_nonempty(ball):
            print(
                f"warning: Omega is empty (|Im p| = {ball.y0:.6g} >= R = {ball.radius:.6g}); "
                "the sigma-ball is the slice disc only",
                file=err,
            )
        curves = list(sample_sigma_ball_boundary(ball, unit, args.curve_points).points)
        grid = cross_section("sigma-ball", ball, unit, args.resolution)
    return curves, grid


def _write_csv(path: str, points: Sequence[RegionPoint]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "curve", "inside"])
        for pt in points:
            w.writerow([repr(pt.x), repr(pt.y), pt.curve, pt.inside])


_SVG_COLORS = {"H": "#c0392b", "K": "#2471a3", "circle": "#1e8449"}


def _write_svg(path: str, curves: Sequence[RegionPoint], grid: Sequence[RegionPoint], size: int = 480):
    xs = [pt.x for pt in grid] + [pt.x for pt in curves]
    ys = [pt.y for pt in grid] + [pt.y for pt in curves]
    x_lo, x_hi, y_lo, y_hi = min(xs), max(xs), min(ys), max(ys)
    span = max(x_hi - x_lo, y_hi - y_lo) or 1.0

    def px(x, y):
        return (x - x_lo) / span * size, size - (y - y_lo) / span * size

    cell = size / max(2, int(math.sqrt(len(grid))))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for pt in grid:
        if pt.inside == "1":
            u, v = px(pt.x, pt.y)
            parts.append(f'<rect x="{u - cell / 2:.2f}" y="{v - cell / 2:.2f}" width="{cell:.2f}" height="{cell:.2f}" fill="#d6eaf8"/>')
    for tag, color in _SVG_COLORS.items():
        pts = [px(pt.x, pt.y) for pt in curves if pt.curve == tag]
        if pts:
            coords = " ".join(f"{u:.2f},{v:.2f}" for u, v in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_region(args, out: TextIO, err: TextIO) -> int:
    curves, grid = _region_points(args, err)
    _write_csv(args.output, curves + grid)
    if args.svg:
        _write_svg(args.svg, curves, grid)
    inside = sum(pt.inside == "1" for pt in grid)
    print(f"wrote {len(curves)} boundary points and {len(grid)} grid points ({inside} inside) to {args.output}", file=out)
    return EXIT_OK


def cmd_verify(args, out: TextIO, err: TextIO) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    results = run_suite(args.suite, seed, args.samples)
    print(f"suite: {args.suite}  seed: {seed}", file=out)
    failed = 0
    for res in results:
        print(res.line(), file=out)
        if not res.passed:
            failed += 1
            print(f"      sample: {res.sample!r}", file=out)
    print(f"{len(results) - failed}/{len(results)} properties passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAILED


# parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qseries", description="Quaternionic regular power series toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a series file at a point")
    p.add_argument("series")
    p.add_argument("--at", type=_quaternion_arg, required=True, metavar="[w,x,y,z]")
    p.add_argument("--window", type=int, default=None, help="coefficients used by the tail model")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("star", help="star power (q - p)^{*n}: value at a point or expanded coefficients")
    p.add_argument("--center", type=_quaternion_arg, required=True, metavar="[w,x,y,z]")
    p.add_argument("--power", type=int, required=True)
    p.add_argument("--at", type=_quaternion_arg, default=None, metavar="[w,x,y,z]")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_star)

    p = sub.add_parser("derive", help="formal slice derivative of a series")
    p.add_argument("series")
    p.add_argument("--times", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("reexpand", help="re-expand a series centered at 0 about another point")
    p.add_argument("series")
    p.add_argument("--at", type=_quaternion_arg, required=True, metavar="[w,x,y,z]")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reexpand)

    p = sub.add_parser("region", help="cross-section membership grid and boundary curves as CSV")
    p.add_argument("kind", choices=["sigma-ball", "A-ball", "A-sigma"])
    p.add_argument("--center", type=_quaternion_arg, default=Quaternion(0.0), metavar="[w,x,y,z]")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--slice", type=_quaternion_arg, default=None, metavar="[0,a,b,c]",
                   help="imaginary direction of the plotted slice (default: that of the center)")
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--curve-points", type=int, default=128)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("verify", help="run a property-verification suite")
    p.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p.add_argument("--seed", type=int, default=None, help=f"defaults to ${SEED_ENV} or 0")
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out, err)
    except EmptyRegionError as exc:
        print(f"error: empty region: {exc}", file=err)
        return EXIT_EMPTY
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
