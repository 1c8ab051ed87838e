"""Command-line front end: ``conemetric <subcommand> [options]``.

Every subcommand prints one JSON document (or writes it to ``--out``).
Exit status: 0 on success, 1 with ``{"error": ...}`` when a computation
fails, 2 when an input file or option does not match its schema.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from decimal import Decimal, InvalidOperation

import numpy as np

from . import __version__
from .character import (build_metric, develop, differential_divisor, monodromy_multiplier,
                        psi_value, reconstruct_rational)
from .codec import (dumps, load_json, parse_divisor, parse_map, parse_omega, parse_path,
                    parse_series)
from .cusp import PRESETS, cusp_report, preset
from .errors import ConeMetricError, SchemaError
from .feasibility import feasibility_search
from .frobenius import DEFAULT_ORDER, indicial_roots, local_solutions, resonance_obstruction
from .pullback import PullbackMetric, area_numeric, curvature_numeric, density_grid
from .schwarzian import laurent_tail, schwarzian
from .sphere import INF, SpherePoint
from .verify import run_suite, sample_regular_points

DEFAULT_TOL = 1e-10
DEFAULT_RES = 256
DEFAULT_RMIN = "1e-8"
CURVATURE_SPOTS = 8


# --------------------------------------------------------------- helpers

def _point_arg(text: str) -> SpherePoint:
    t = text.strip()
    if t.lower() in ("inf", "infinity"):
        return INF
    try:
        if "," in t:
            re_, im = t.split(",")
            return complex(float(re_), float(im))
        return complex(t.replace(" ", ""))
    except ValueError:
        raise SchemaError(f"cannot parse point {text!r}; use 'inf', 're,im' or '1+2j'") from None


def _tail_dict(tail) -> dict:
    out = {"point": tail.center, "c": tail.c, "d": tail.d}
    if tail.c != 0 or tail.d != 0:
        out["alpha"] = tail.alpha if tail.c < 0.5 else None
    return out


def _log_radius(text: str) -> float:
    """``ln(1/r)`` computed in decimal, so radii far below the float range still work."""
    try:
        r = Decimal(text)
    except InvalidOperation:
        raise SchemaError(f"--rmin: not a number: {text!r}") from None
    if not 0 < r < 1:
        raise SchemaError("--rmin must lie in (0, 1)")
    return float(-r.ln())


# ------------------------------------------------------------ subcommands

def cmd_analyze(args) -> dict:
    f = parse_map(load_json(args.map))
    m = PullbackMetric(f)
    div = m.divisor
    area = area_numeric(m, args.tol)
    rng = np.random.default_rng(0)
    spots = [{"z": z, "K": curvature_numeric(m, z)}
             for z in sample_regular_points(m, rng, CURVATURE_SPOTS)]
    if args.grid:
        rows = density_grid(m, args.res)
        with open(args.grid, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "y", "density"])
            w.writerows([[format(v, ".17g") for v in row] for row in rows])
    return {
        "map": f,
        "degree": f.degree,
        "divisor": div,
        "area": area,
        "area_expected": 4 * math.pi * f.degree,
        "gauss_bonnet": 2 * math.pi * (2 + div.degree),
        "curvature_checks": spots,
    }


def cmd_schwarzian(args) -> dict:
    f = parse_map(load_json(args.map))
    S = schwarzian(f)
    if args.at is not None:
        points = [_point_arg(args.at)]
    else:
        points = PullbackMetric(f).divisor.points if f.degree >= 1 else []
    return {"schwarzian": S, "tails": [_tail_dict(laurent_tail(S, p)) for p in points]}


def cmd_build(args) -> dict:
    w = parse_omega(load_json(args.omega))
    desc = build_metric(w)
    fd = differential_divisor(w)
    out = {
        "omega": w,
        "divisor": desc.divisor,
        "area": desc.area,
        "trivial": desc.trivial,
        "classification": [{"point": p, "kind": k} for p, k in desc.classification],
        "form_divisor": {"zeros": [{"point": p, "order": k} for p, k in fd.zeros],
                         "poles": [{"point": p, "order": k} for p, k in fd.poles]},
        "multipliers": [],
    }
    if desc.trivial:
        out["reconstruction"] = reconstruct_rational(w)
    if args.loop:
        loop = parse_path(load_json(args.loop), "loop")
        out["multipliers"].append(monodromy_multiplier(w, loop, max(args.tol, 1e-9)))
    if args.path:
        raw = load_json(args.path)
        path = parse_path(raw, "path")
        f_base = raw.get("f_base", 1.0)
        f_end = develop(w, path.start, path, f_base, args.tol)
        out["path"] = {"start": path.start, "end": path.end, "f_end": f_end,
                       "psi_end": psi_value(w, path.start, path, f_base)}
    return out


def cmd_frobenius(args) -> dict:
    q = parse_series(load_json(args.q), args.order)
    alpha = args.alpha
    s0, s1 = indicial_roots(alpha)
    sols = local_solutions(q, alpha, q.order)
    is_int = abs(alpha - round(alpha)) <= 1e-9
    r_m = resonance_obstruction(q, int(round(alpha))) if is_int else None
    return {
        "alpha": alpha,
        "roots": [s0, s1],
        "R_m": r_m,
        "logarithmic": any(s.logarithmic for s in sols),
        "solutions": [{"exponent": s.exponent, "coeffs": s.coeffs, "logarithmic": s.logarithmic,
                       "companion_coeffs": s.companion_coeffs,
                       "max_residual": float(np.max(np.abs(s.residuals(q))))} for s in sols],
    }


def cmd_feasible(args) -> dict:
    d = parse_divisor(load_json(args.divisor))
    found = feasibility_search(d)
    out = {"divisor": d, "feasible": bool(found), "assignments": [a.as_dict() for a in found]}
    if not found:
        out["result"] = "infeasible"
    return out


def cmd_cusp(args) -> dict:
    if args.preset == "hyp-cusp":
        f = preset(args.preset)
    else:
        if not args.alpha > 0:
            raise SchemaError("--alpha must be positive")
        f = preset(args.preset, args.alpha)
    depth = _log_radius(args.rmin)
    # inner half of the log range, where the tail behaviour shows
    t = -np.geomspace(depth / 2, depth, args.samples)
    out = cusp_report(f, t_values=t)
    out["preset"] = args.preset
    out["alpha"] = None if args.preset == "hyp-cusp" else args.alpha
    return out


def cmd_verify(args) -> dict:
    results = run_suite(args.corpus, args.seed)
    out = {"properties": [r.as_dict() for r in results],
           "all_passed": all(r.passed for r in results)}
    failed = [r.name for r in results if not r.passed]
    if failed:
        out["error"] = f"{len(failed)} properties failed: " + ", ".join(failed)
    return out


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stdout.write(dumps({"error": message}) + "\n")
        raise SystemExit(2)


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _int_at_least(low):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if v < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="conemetric", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write JSON here instead of stdout")
        sp.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL,
                        help=f"numerical tolerance (default {DEFAULT_TOL:g})")

    sp = sub.add_parser("analyze", help="divisor, area and curvature of a pulled-back metric")
    sp.add_argument("--map", required=True)
    sp.add_argument("--grid", help="also write a CSV density grid x,y,density")
    sp.add_argument("--res", type=_int_at_least(2), default=DEFAULT_RES,
                    help=f"grid resolution (default {DEFAULT_RES})")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("schwarzian", help="Schwarzian and its double-pole weights")
    sp.add_argument("--map", required=True)
    sp.add_argument("--at", help="single point: 'inf', 're,im' or '1+2j'")
    common(sp)
    sp.set_defaults(func=cmd_schwarzian)

    sp = sub.add_parser("build", help="abelian metric from a character form")
    sp.add_argument("--omega", required=True)
    sp.add_argument("--path", help="path JSON for developing the map")
    sp.add_argument("--loop", help="closed loop JSON for a monodromy multiplier")
    common(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("frobenius", help="local solutions at a regular singular point")
    sp.add_argument("--q", required=True)
    sp.add_argument("--alpha", type=_positive_float, required=True)
    sp.add_argument("--order", type=_int_at_least(1), default=None,
                    help=f"series order (default: file value or {DEFAULT_ORDER})")
    common(sp)
    sp.set_defaults(func=cmd_frobenius)

    sp = sub.add_parser("feasible", help="character-form assignments for a cone divisor")
    sp.add_argument("--divisor", required=True)
    common(sp)
    sp.set_defaults(func=cmd_feasible)

    sp = sub.add_parser("cusp", help="weak-cusp indicators for a preset conformal factor")
    sp.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--rmin", default=DEFAULT_RMIN,
                    help=f"smallest radius, decimal string (default {DEFAULT_RMIN})")
    sp.add_argument("--samples", type=_int_at_least(2), default=24)
    common(sp)
    sp.set_defaults(func=cmd_cusp)

    sp = sub.add_parser("verify", help="run the invariant suite on the corpus")
    sp.add_argument("--corpus", help="directory of map_*.json / omega_*.json (default: shipped)")
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def _emit(payload: dict, out_path) -> None:
    text = dumps(payload) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload = args.func(args)
    except SchemaError as exc:
        sys.stdout.write(dumps({"error": str(exc)}) + "\n")
        return 2
    except ConeMetricError as exc:
        sys.stdout.write(dumps({"error": str(exc), "type": type(exc).__name__}) + "\n")
        return 1
    _emit(payload, args.out)
    return 1 if "error" in payload else 0


if __name__ == "__main__":
    raise SystemExit(main())
