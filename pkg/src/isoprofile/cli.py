"""Command-line front end.

Exit codes: 0 success, 1 invalid input (diagnostics on stderr), 2 a checked
property did not hold numerically.  Output goes to ``--out`` if given, else
to ``$ISOPROFILE_OUTPUT_DIR/<default name>`` if that variable is set, else
to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import _io
from .acceptance import SuiteConfig, run_suite
from .exhaustion import build_sqrt_exhaustion, greene_wu_sandwich, verify_strict_convexity
from .limits import (load_family, left_continuity_check, pointwise_limit, remark_report,
                     right_continuity_check)
from .placement import fubini_average_check, find_witness, load_scenario
from .profile import (clip_volumes, disk_profile, inf_over_r_curve, monotone_continuity_report,
                      sublevel_profile)
from .space_forms import SpaceForm, ball_area, ball_volume, space_form_profile
from .surface import (CATALOG_NAMES, catalog_surface, gauss_curvature, load_surface,
                      pole_ball_area, pole_ball_volume)

OUTPUT_ENV = "ISOPROFILE_OUTPUT_DIR"
PROFILE_COLUMNS = ("v", "I", "kind", "r", "candidate", "candidate_param")


class InputError(Exception):
    pass


class VerificationFailure(Exception):
    def __init__(self, text: str):
        super().__init__("verification failed")
        self.text = text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _positive(kind):
    def conv(text):
        try:
            x = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not x > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return x
    return conv


def _nonneg_int(text):
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return x


def _surface(text: str):
    if text in CATALOG_NAMES:
        return catalog_surface(text)
    if Path(text).exists():
        return load_surface(text)
    raise InputError(f"unknown surface {text!r}: use one of {', '.join(CATALOG_NAMES)} or a JSON file")


def _emit(args, text: str, default_name: str):
    target = args.out
    if target is None and os.environ.get(OUTPUT_ENV):
        target = Path(os.environ[OUTPUT_ENV]) / default_name
    if target is None:
        sys.stdout.write(text)
    else:
        _io.write_text(target, text)


def _table(args, columns, rows, title, name):
    if args.format == "json":
        payload = {"title": title, "columns": list(columns),
                   "rows": [dict(zip(columns, r)) if not isinstance(r, dict) else r for r in rows]}
        _emit(args, _io.dumps_json(payload), name + ".json")
    else:
        _emit(args, _io.dumps_csv(columns, rows, title), name + ".csv")


# --- subcommands -----------------------------------------------------------

def cmd_spaceform(args):
    sf = SpaceForm(args.delta, 2)
    # stay clear of the antipodal cap, where V rounds to the total volume
    r_hi = args.rmax if sf.delta <= 0 else min(args.rmax, sf.max_radius * (1 - 1e-6))
    rows = []
    for r in np.linspace(r_hi / args.points, r_hi, args.points):
        V = ball_volume(sf, float(r))
        rows.append((float(r), V, ball_area(sf, float(r)), space_form_profile(sf, V)))
    _table(args, ("r", "V", "A", "I"), rows, f"space form delta={args.delta:.12g} n=2", "spaceform")


def cmd_surface(args):
    W = _surface(args.surface)
    t_hi = min(args.tmax, W.T_num)
    rows = []
    for t in np.linspace(t_hi / args.points, t_hi, args.points):
        t = float(t)
        rows.append((t, float(W.phi(t)), gauss_curvature(W, t), pole_ball_volume(W, t),
                     pole_ball_area(W, t)))
    _table(args, ("t", "phi", "K", "V", "A"), rows, f"surface {W.catalog_id}", "surface")


def cmd_exhaustion(args):
    W = _surface(args.surface)
    spec = build_sqrt_exhaustion(W)
    bound = None if args.bound == "none" else args.bound
    rep = verify_strict_convexity(spec, args.geodesics, args.seed, tol=args.tol, bound=bound)
    sandwich = greene_wu_sandwich(spec, np.linspace(args.rmin, args.rmax, args.points))
    rep.sandwich_constant = sandwich.K
    payload = rep.to_json()
    payload["sandwich_pass"] = sandwich.passed
    payload["pass"] = rep.passed and sandwich.passed
    text = _io.dumps_json(payload)
    _emit(args, text, "exhaustion.json")
    if not payload["pass"]:
        raise VerificationFailure(text)


def cmd_placement(args):
    try:
        sc = load_scenario(args.config)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {args.config}: {exc}") from None
    wit = find_witness(sc, args.r, args.grid_density, args.samples, args.seed)
    payload = wit.to_json()
    if args.fubini:
        fub = fubini_average_check(sc, args.r, args.fubini_centers, args.samples, args.seed)
        payload["fubini"] = fub.to_json()
        payload["pass"] = wit.passed and fub.passed
    text = _io.dumps_json(payload)
    _emit(args, text, "placement.json")
    if not payload["pass"]:
        raise VerificationFailure(text)


def cmd_profile(args):
    W = _surface(args.surface)
    if args.kind == "sublevel":
        if args.rho is None:
            raise InputError("--rho is required for --kind sublevel")
        Vrho = pole_ball_volume(W, args.rho)
        if args.vmin is None and args.vmax is None:
            grid = clip_volumes(Vrho, args.points)
        else:
            grid = np.linspace(args.vmin or 1e-4 * Vrho, args.vmax or (1 - 1e-4) * Vrho, args.points)
        curve = sublevel_profile(W, args.rho, grid)
    else:
        if args.vmin is None or args.vmax is None:
            raise InputError("--vmin and --vmax are required")
        grid = np.linspace(args.vmin, args.vmax, args.points)
        if args.kind == "disk":
            curve = disk_profile(W, grid)
        else:
            curve = inf_over_r_curve(W, build_sqrt_exhaustion(W), grid)
    rows = list(curve.rows())
    _table(args, PROFILE_COLUMNS, rows, f"{curve.kind} surface={W.catalog_id}", "profile")
    if args.check:
        rep = monotone_continuity_report(curve)
        if not rep.passed:
            raise VerificationFailure(_io.dumps_json(rep.to_json()))


def cmd_limits(args):
    if args.demo == "remark":
        payload = remark_report()
    else:
        if args.family is None:
            raise InputError("give --demo remark or --family FILE.csv")
        fam = load_family(args.family)
        lim = pointwise_limit(fam, args.tail_tol)
        g = lambda x: float(np.interp(x, lim.x, lim.y))  # noqa: E731
        x0 = args.x0
        if not lim.x[0] < x0 < lim.x[-1]:
            raise InputError(f"x0 = {x0} must lie inside the grid")
        h0 = min(0.5 * (lim.x[-1] - x0), 0.5 * (x0 - lim.x[0]))
        probes = [h0 * 2.0 ** -k for k in range(13)]
        right = right_continuity_check(g, x0, probes)
        left = left_continuity_check(g, x0, probes)
        payload = {"rows": fam.m, "grid_points": int(lim.x.size),
                   "max_tail": float(lim.tail.max()), "flagged": int(lim.flagged.sum()),
                   "limit": lim.y, "right": right.to_json(), "left": left.to_json(),
                   "note": "checks use the piecewise-linear interpolant of the sampled limit",
                   "pass": right.passed}
    text = _io.dumps_json(payload)
    _emit(args, text, "limits.json")


def cmd_verify_all(args):
    which = None
    if args.criteria:
        try:
            which = [int(c) for c in args.criteria.split(",")]
        except ValueError:
            raise InputError(f"bad --criteria {args.criteria!r}") from None
    cfg = SuiteConfig(seed=args.seed, quick=args.quick, mc_samples=args.samples)
    try:
        report = run_suite(cfg, which)
    except KeyError as exc:
        raise InputError(f"unknown criterion {exc}") from None
    text = _io.dumps_json(report)
    _emit(args, text, "verify_all.json")
    for r in report["criteria"]:
        print(f"criterion {r['id']:2d} {'PASS' if r['pass'] else 'FAIL'}  {r['name']}", file=sys.stderr)
    if not report["pass"]:
        raise VerificationFailure("")


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isoprofile", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def common(sp, fmt=True):
        sp.add_argument("--out", type=Path, help="output file (default: stdout or $%s)" % OUTPUT_ENV)
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    s = sub.add_parser("spaceform", help="ball volume/area/profile table of a space form")
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--rmax", type=_positive(float), default=2.0)
    s.add_argument("--points", type=_positive(int), default=50)
    common(s)
    s.set_defaults(func=cmd_spaceform)

    s = sub.add_parser("surface", help="curvature and pole-ball table of a warped surface")
    s.add_argument("--surface", required=True, help="catalog name or JSON config")
    s.add_argument("--tmax", type=_positive(float), default=3.0)
    s.add_argument("--points", type=_positive(int), default=50)
    common(s)
    s.set_defaults(func=cmd_surface)

    s = sub.add_parser("exhaustion", help="convexity report of the sqrt exhaustion")
    s.add_argument("--surface", required=True)
    s.add_argument("--seed", type=_nonneg_int, required=True)
    s.add_argument("--geodesics", type=_positive(int), default=100)
    s.add_argument("--bound", choices=("unit", "sharp", "none"), default="unit")
    s.add_argument("--tol", type=_positive(float), default=1e-4)
    s.add_argument("--rmin", type=_positive(float), default=1.0)
    s.add_argument("--rmax", type=_positive(float), default=10.0)
    s.add_argument("--points", type=_positive(int), default=91)
    common(s, fmt=False)
    s.set_defaults(func=cmd_exhaustion)

    s = sub.add_parser("placement", help="ball placement witness for a JSON scenario")
    s.add_argument("--config", required=True)
    s.add_argument("--r", type=_positive(float), required=True)
    s.add_argument("--seed", type=_nonneg_int, required=True)
    s.add_argument("--samples", type=_positive(int), default=100_000)
    s.add_argument("--grid-density", type=_positive(int), default=24)
    s.add_argument("--fubini", action="store_true", help="also run the averaging check")
    s.add_argument("--fubini-centers", type=_positive(int), default=64)
    common(s, fmt=False)
    s.set_defaults(func=cmd_placement)

    s = sub.add_parser("profile", help="disk, sublevel or inf-over-levels profile sweep")
    s.add_argument("--surface", required=True)
    s.add_argument("--kind", choices=("disk", "sublevel", "inf"), default="disk")
    s.add_argument("--vmin", type=_positive(float))
    s.add_argument("--vmax", type=_positive(float))
    s.add_argument("--points", type=_positive(int), default=50)
    s.add_argument("--rho", type=_positive(float), help="sublevel radius for --kind sublevel")
    s.add_argument("--check", action="store_true", help="run the monotone/continuity report")
    common(s)
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("limits", help="monotone-limit continuity checks")
    s.add_argument("--demo", choices=("remark",))
    s.add_argument("--family", help="CSV: grid row, then one row per f_i")
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--tail-tol", type=_positive(float), default=1e-6)
    common(s, fmt=False)
    s.set_defaults(func=cmd_limits)

    s = sub.add_parser("verify-all", help="run the acceptance suite")
    s.add_argument("--seed", type=_nonneg_int, required=True)
    s.add_argument("--samples", type=_positive(int), default=100_000)
    s.add_argument("--quick", action="store_true", help="reduced sample sizes and grids")
    s.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,9")
    common(s, fmt=False)
    s.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VerificationFailure as exc:
        if exc.text:
            sys.stderr.write(exc.text)
        print("verification failure", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
