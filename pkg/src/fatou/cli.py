"""Command-line surface: rendering, orbit reports, rays, lifting, self-checks.

All reports go to stdout as single-line JSON with fixed key order and
17-significant-digit floats, so identical invocations are byte-identical.
Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import _jsonio
from . import basins as _basins
from .catalog import CATALOG_NAMES, by_name
from .lifting import circle, lift_curve, sign_change_sequence
from .orbits import critical_portrait, periodic_points
from .ratmap import RationalMap, map_from_jsonable, map_to_jsonable
from .rays import DEFAULT_DEPTH, DEFAULT_R0, RayAngle, trace_ray
from .sphere import SpherePoint, as_sphere
from .verify import groups as verify_groups
from .verify import run_checks

SCHEMA = 1


class _UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


def _angle_type(text: str) -> RayAngle:
    try:
        return RayAngle.parse(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(
            f"--angle expects an exact fraction 'a/b' or integer, got {text!r}")


def _point_type(text: str):
    s = text.strip().lower()
    if s in ("inf", "infinity"):
        return SpherePoint.infinity()
    try:
        if "," in s:
            re_s, im_s = s.split(",", 1)
            return complex(float(re_s), float(im_s))
        return complex(float(s), 0.0)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a point 're,im' or 'inf', got {text!r}")


def _bounds_type(text: str) -> _basins.Bounds:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"--bounds expects 'xmin,xmax,ymin,ymax', got {text!r}")
    try:
        xmin, xmax, ymin, ymax = (float(p) for p in parts)
        return _basins.Bounds(xmin, xmax, ymin, ymax)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--bounds: {e}")


def _resolution_type(text: str) -> tuple:
    try:
        w_s, h_s = text.lower().split("x", 1)
        w, h = int(w_s), int(h_s)
        if w < 1 or h < 1:
            raise ValueError
        return w, h
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--resolution expects 'WIDTHxHEIGHT', got {text!r}")


def _load_map(selector: str) -> RationalMap:
    try:
        return by_name(selector)
    except KeyError:
        pass
    if os.path.exists(selector):
        with open(selector, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        return map_from_jsonable(data)
    raise _UsageError("--map", f"unknown catalog name or missing file {selector!r}; "
                      f"catalog: {', '.join(CATALOG_NAMES)}")


def _thread_count(n_tasks: int) -> int:
    env = os.environ.get("FATOU_THREADS", "").strip()
    if env:
        k = int(env)
        if k < 1:
            raise ValueError(f"FATOU_THREADS must be a positive integer, got {env!r}")
    else:
        k = min(4, n_tasks)
    return max(1, min(k, n_tasks))


def _emit(report: dict):
    sys.stdout.write(_jsonio.dumps(report) + "\n")


def _point_order(p):
    if p.is_infinity:
        return (0, 0.0, 0.0)
    z = p.to_complex()
    return (1, z.real, z.imag)


# ---------------------------------------------------------------------------
# subcommands


def cmd_portrait(args) -> int:
    f = _load_map(args.map)
    port = critical_portrait(f)
    order = sorted(range(len(port.critical_points)),
                   key=lambda i: _point_order(port.critical_points[i].point))
    crit = []
    for i in order:
        c = port.critical_points[i]
        rep = port.orbits[i]
        entry = {
            "point": _jsonio.sphere_jsonable(c.point),
            "local_degree": c.local_degree,
        }
        if rep is None:
            entry["resolved"] = False
        else:
            entry["resolved"] = True
            entry["preperiod"] = rep.preperiod
            entry["period"] = rep.period
            entry["multiplier"] = _jsonio.complex_pair(rep.multiplier)
            entry["classification"] = rep.classification
        crit.append(entry)
    report = {
        "schema": SCHEMA,
        "map": args.map,
        "degree": f.degree,
        "critical_points": crit,
        "postcritical": [_jsonio.sphere_jsonable(p)
                         for p in sorted(port.postcritical, key=_point_order)],
        "postcritical_in_critical_cycles": [
            _jsonio.sphere_jsonable(p)
            for p in sorted(port.q_subset, key=_point_order)],
        "critically_finite": port.critically_finite,
        "hyperbolic": port.hyperbolic,
        "all_postcritical_periodic": port.all_postcritical_periodic,
    }
    _emit(report)
    return 0


def cmd_periodic(args) -> int:
    f = _load_map(args.map)
    pts = periodic_points(f, args.period)
    pts = sorted(pts, key=lambda q: _point_order(q.point))
    report = {
        "schema": SCHEMA,
        "map": args.map,
        "period": args.period,
        "count": sum(q.multiplicity for q in pts),
        "points": [{
            "point": _jsonio.sphere_jsonable(q.point),
            "multiplicity": q.multiplicity,
            "minimal_period": q.minimal_period,
        } for q in pts],
    }
    _emit(report)
    return 0


def cmd_ray(args) -> int:
    f = _load_map(args.map)
    angles = []
    for t in args.angle:
        if t not in angles:
            angles.append(t)
    workers = _thread_count(len(angles))

    def run(t: RayAngle):
        return trace_ray(f, args.basin, t, depth=args.depth, r0=args.r0)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(run, angles))
    else:
        traces = [run(t) for t in angles]

    rays = []
    for tr in traces:
        entry = {
            "angle": str(tr.angle),
            "landed": tr.landed,
            "landing": _jsonio.complex_pair(tr.landing) if tr.landed else None,
            "residual": tr.residual,
            "potential_sublevels": tr.sublevels,
        }
        if args.samples:
            entry["samples"] = [_jsonio.complex_pair(z) for z in tr.samples]
            entry["potentials"] = list(tr.potentials)
        rays.append(entry)
    report = {
        "schema": SCHEMA,
        "map": args.map,
        "basin": _jsonio.sphere_jsonable(as_sphere(args.basin)),
        "depth": args.depth,
        "r0": args.r0,
        "rays": rays,
    }
    _emit(report)
    return 0


def cmd_lift(args) -> int:
    f = _load_map(args.map)
    base = circle(args.center, args.radius, args.segments)
    report = {
        "schema": SCHEMA,
        "map": args.map,
        "curve": {"center": _jsonio.complex_pair(args.center),
                  "radius": args.radius, "segments": args.segments},
        "omega": _jsonio.sphere_jsonable(as_sphere(args.omega)),
    }
    if args.steps == 0:
        ls = lift_curve(f, base, args.omega, eps=args.eps)
        report["total_degree"] = ls.total_degree
        report["monodromy"] = list(ls.monodromy)
        report["lifts"] = [{
            "strand": l.strand,
            "degree": l.degree,
            "sign": l.sign,
            "vertices": [_jsonio.complex_pair(v) for v in l.curve.vertices],
        } for l in ls.lifts]
    else:
        seq = sign_change_sequence(f, base, args.omega, n=args.steps, eps=args.eps)
        report["base_sign"] = seq.base_sign
        report["signs"] = list(seq.signs)
        report["sign_changes"] = seq.change_count
        report["outermost_counts"] = [s.outermost_count for s in seq.steps]
    _emit(report)
    return 0


def cmd_catalog(args) -> int:
    maps = []
    for name in CATALOG_NAMES:
        f = by_name(name)
        entry = {"name": name, "degree": f.degree}
        if args.coeffs:
            entry.update(map_to_jsonable(f))
        maps.append(entry)
    _emit({"schema": SCHEMA, "maps": maps})
    return 0


def cmd_render(args) -> int:
    f = _load_map(args.map)
    port = critical_portrait(f)
    grid = _basins.classify_grid(f, port, args.bounds, args.resolution,
                                 trap_radius=args.trap_radius,
                                 max_iter=args.max_iter)
    labeling = _basins.label_components(grid)
    ppm = _basins.render_ppm(grid)
    with open(args.out, "wb") as fh:
        fh.write(ppm)
    unresolved = int((grid.cycle_id < 0).sum())
    report = {
        "schema": SCHEMA,
        "map": args.map,
        "resolution": [grid.width, grid.height],
        "bounds": [grid.bounds.xmin, grid.bounds.xmax,
                   grid.bounds.ymin, grid.bounds.ymax],
        "cycles": [[_jsonio.sphere_jsonable(p) for p in cyc]
                   for cyc in grid.cycles],
        "components": len(labeling.components),
        "unresolved_cells": unresolved,
        "out": args.out,
    }
    _emit(report)
    return 0


def cmd_verify(args) -> int:
    results = run_checks(only=args.only)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name:<{width}}  measured: {r.measured}  "
              f"[tolerance: {r.tolerance}]")
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed")
    return 0 if n_pass == len(results) else 1


# ---------------------------------------------------------------------------
# parser / dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fatou",
        description="Rational map dynamics: basins, rays, curve lifting.")
    sub = parser.add_subparsers(dest="subcommand", metavar="COMMAND")

    def add_map(p):
        p.add_argument("--map", required=True,
                       help="catalog name or JSON map file")

    p = sub.add_parser("portrait", help="critical points, orbits, flags")
    add_map(p)
    p.set_defaults(func=cmd_portrait)

    p = sub.add_parser("periodic", help="points of a given period")
    add_map(p)
    p.add_argument("--period", type=int, required=True)
    p.set_defaults(func=cmd_periodic)

    p = sub.add_parser("ray", help="trace rays in a superattracting basin")
    add_map(p)
    p.add_argument("--angle", type=_angle_type, action="append", required=True,
                   help="exact fraction a/b; repeatable")
    p.add_argument("--basin", type=_point_type, default=SpherePoint.infinity(),
                   help="superattracting fixed point ('inf' or 're,im')")
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--r0", type=float, default=DEFAULT_R0)
    p.add_argument("--samples", action="store_true",
                   help="include the full sample chain in the report")
    p.set_defaults(func=cmd_ray)

    p = sub.add_parser("lift", help="lift a circle through the map")
    add_map(p)
    p.add_argument("--center", type=_point_type, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--segments", type=int, default=64)
    p.add_argument("--omega", type=_point_type, default=SpherePoint.infinity(),
                   help="reference point ('inf' or 're,im')")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=0,
                   help="if > 0, iterate lifting this many times and report signs")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("catalog", help="list built-in maps")
    p.add_argument("--coeffs", action="store_true",
                   help="include numerator/denominator coefficients")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("render", help="basin classification image (P6 PPM)")
    add_map(p)
    p.add_argument("--out", required=True, help="output PPM path")
    p.add_argument("--resolution", type=_resolution_type, default=(400, 400))
    p.add_argument("--bounds", type=_bounds_type,
                   default=_basins.Bounds(-2.8, 2.8, -2.1, 2.1))
    p.add_argument("--trap-radius", type=float, default=_basins.DEFAULT_TRAP_RADIUS)
    p.add_argument("--max-iter", type=int, default=200)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run the built-in numeric fact checks")
    p.add_argument("--only", choices=verify_groups(), default=None,
                   help="run a single check group")
    p.set_defaults(func=cmd_verify)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.error("a subcommand is required")
        if getattr(args, "period", 1) < 1:
            raise _UsageError("--period", "must be a positive integer")
        if getattr(args, "depth", 1) < 1:
            raise _UsageError("--depth", "must be a positive integer")
        for flag in ("r0", "trap_radius", "eps", "radius"):
            val = getattr(args, flag, 1.0)
            if val <= 0:
                raise _UsageError("--" + flag.replace("_", "-"), "must be > 0")
        return args.func(args)
    except SystemExit as e:
        code = e.code
        if isinstance(code, int):
            return code
        return 0 if code is None else 2
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, KeyError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(dispatch())
