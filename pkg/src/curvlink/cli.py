"""Command-line front end.

Every verb prints one JSON document on stdout.  Exit codes: 0 success,
1 validation failure, 2 solver non-convergence, 3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import checks
from . import io as cio
from .duality import angle_equals_distance, dual_complex
from .forms import ModelPoint, hyperbolic
from .hipped import (build, cone_angle, convexity, recover_angles, sample_mesh,
                     spacelike_check)
from .holonomy import loop_holonomy
from .killing import (FootError, UmbilicSurface, killing_foot, random_killing,
                      verify_killing)
from .polygons import invariants, is_convex, regular_polygon, validate, develop, frame_of
from .sampling import random_hyperbolic_point
from .solvers import (SolverError, family_sweep, solve_polygon, tangent_dimension,
                      theta_inverse)

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def default_seed() -> int:
    raw = os.environ.get("CURVLINK_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"CURVLINK_SEED must be an integer, got {raw!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _tolist(x):
    return np.asarray(x, float).tolist()


# --- verbs ---------------------------------------------------------------------

def cmd_gen_regular(args):
    p = regular_polygon(cio.model_from_name(args.model), args.k, args.alpha)
    obj = cio.polygon_to_json(p)
    if args.out:
        cio.dump_json(obj, args.out)
        _emit({"verb": "gen-regular", "out": args.out, "k": args.k})
    else:
        _emit(obj)
    return EXIT_OK


def _load_polygon(path):
    return cio.polygon_from_json(cio.load_json(path))


def _invariants_report(p):
    errs = validate(p)
    if errs:
        return {"valid": False, "violations": errs}, EXIT_INVALID
    inv = invariants(p)
    _, _, res = develop(p.model, inv.lengths, inv.angles, frame_of(inv, 0))
    out = {"valid": True, "lengths": _tolist(inv.lengths), "angles": _tolist(inv.angles),
           "convex": is_convex(inv), "closure_residual": res}
    if p.model.kind.value == "sphere":
        out["interior_angles"] = _tolist(inv.interior_angles)
    return out, EXIT_OK


def cmd_invariants(args):
    out, code = _invariants_report(_load_polygon(args.polygon))
    _emit(out)
    return code


def cmd_tangent_dim(args):
    p = _load_polygon(args.polygon)
    errs = validate(p)
    if errs:
        _emit({"valid": False, "violations": errs})
        return EXIT_INVALID
    c = args.constraints.replace("equilateral-fixed", "equilateral_fixed_length")
    _emit({"constraints": args.constraints, "dim": tangent_dimension(p, c), "k": p.k})
    return EXIT_OK


def _solution_report(res, out_path):
    obj = cio.polygon_to_json(res.polygon)
    if out_path:
        cio.dump_json(obj, out_path)
    return {"lengths": _tolist(res.lengths), "angles": _tolist(res.angles),
            "residual": res.residual, "iterations": res.iterations,
            "polygon": obj}


def cmd_solve(args):
    spec = cio.spec_from_json(cio.load_json(args.spec))
    g = cio.load_json(args.guess)
    try:
        guess = (np.asarray(g["lengths"], float), np.asarray(g["angles"], float))
    except (KeyError, TypeError) as exc:
        raise cio.FormatError(f"bad guess JSON: {exc}") from None
    res = solve_polygon(spec, guess)
    _emit(_solution_report(res, args.out))
    return EXIT_OK


def cmd_solve_theta(args):
    res = theta_inverse(cio.model_from_name(args.model), args.k, args.targets)
    _emit(_solution_report(res, args.out))
    return EXIT_OK


def cmd_sweep(args):
    sw = family_sweep(cio.model_from_name(args.model), args.k, args.alpha_min,
                      args.alpha_max, args.steps)
    if args.csv:
        cio.write_sweep_csv(sw, args.csv)
    _emit({"rows": [[r.alpha, r.length, r.angle] for r in sw.rows],
           "truncated": sw.truncated, "reason": sw.reason, "csv": args.csv})
    return EXIT_OK


def cmd_hipped(args):
    p = _load_polygon(args.polygon)
    hd = build(args.space, args.dim, p)
    ang = recover_angles(hd)
    _, hol = loop_holonomy(hd)
    out = {"space": args.space, "d": args.dim, "wedge": _tolist(ang.wedge),
           "dihedral": _tolist(ang.dihedral), "cone_angle": cone_angle(hd),
           "convex": convexity(hd), "holonomy_residual": hol}
    if args.space == "ads":
        out["spacelike_margin"] = spacelike_check(hd, 40, args.seed).margin
    if args.mesh:
        # OBJ is 3D: for d > 2 export the slice orthogonal to the stem, which
        # is the d = 2 build of the same polygon
        hd2 = hd if hd.d == 2 else build(args.space, 2, p)
        mesh = sample_mesh(hd2, args.tmax, 0.5, args.res)
        out["mesh_vertices"] = cio.export_mesh_obj(mesh, hd2, args.mesh)
        out["mesh"] = args.mesh
    if args.dual:
        dc = dual_complex(hd)
        cio.dump_json(cio.dual_complex_to_json(dc), args.dual)
        out["dual"] = args.dual
    _emit(out)
    return EXIT_OK


def cmd_killing_foot(args):
    if args.matrix:
        u = cio.killing_from_json(cio.load_json(args.matrix))
    else:
        u = random_killing(args.d, args.seed)
    rep = verify_killing(u)
    if not rep.ok():
        _emit({"valid": False, "report": rep.__dict__})
        return EXIT_INVALID
    surf = UmbilicSurface(args.t, u.d)
    rng = np.random.default_rng(args.seed)
    starts = [np.zeros(2 * u.d)] + [rng.uniform(-2, 2, 2 * u.d) for _ in range(args.starts - 1)]
    feet = [killing_foot(u, surf, y0) for y0 in starts]
    Y = np.array([f.y for f in feet])
    _emit({"d": u.d, "t": args.t, "foot": _tolist(feet[0].y), "point": _tolist(feet[0].p),
           "f": feet[0].f, "tangential": feet[0].tangential,
           "spread": float(np.ptp(Y, axis=0).max()), "iterations": [f.iterations for f in feet]})
    return EXIT_OK


def cmd_dual_distance(args):
    if (args.y1 is None) != (args.y2 is None):
        raise UsageError("give both --y1 and --y2 or neither")
    if args.y1 is None:
        rng = np.random.default_rng(args.seed)
        a, b = random_hyperbolic_point(args.m, rng), random_hyperbolic_point(args.m, rng)
    else:
        a, b = np.asarray(args.y1), np.asarray(args.y2)
    tag = hyperbolic(len(a) - 1)
    angle, dist = angle_equals_distance(ModelPoint(a, tag), ModelPoint(b, tag))
    _emit({"y1": _tolist(a), "y2": _tolist(b), "angle": angle, "distance": dist,
           "discrepancy": abs(angle - dist)})
    return EXIT_OK


def cmd_check(args):
    res = checks.run_suite(args.suite, args.seed)
    _emit(checks.report(res, args.suite, args.seed))
    return EXIT_OK if all(r.passed for r in res) else EXIT_INVALID


# --- parser ----------------------------------------------------------------------

def make_parser(seed: int) -> Parser:
    ap = Parser(prog="curvlink", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=Parser)
    models = sorted(cio.MODELS)

    p = sub.add_parser("gen-regular", help="regular polygon")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_regular)

    p = sub.add_parser("invariants", help="lengths, angles and convexity")
    p.add_argument("polygon")
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("tangent-dim", help="moduli tangent dimension")
    p.add_argument("polygon")
    p.add_argument("--constraints", default="none",
                   choices=["none", "equilateral", "equilateral-fixed", "symmetric"])
    p.set_defaults(fn=cmd_tangent_dim)

    p = sub.add_parser("solve", help="solve a pattern spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--guess", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("solve-theta", help="symmetric polygon with prescribed angles")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--targets", type=_floats, required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_solve_theta)

    p = sub.add_parser("sweep", help="sweep the regular family")
    p.add_argument("--model", choices=models, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha-min", type=float, required=True)
    p.add_argument("--alpha-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("hipped", help="hipped hypersurface from a polygon")
    p.add_argument("polygon")
    p.add_argument("--space", choices=["ads", "hyp"], required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--mesh")
    p.add_argument("--dual")
    p.add_argument("--tmax", type=float, default=1.0)
    p.add_argument("--res", type=int, default=8)
    p.add_argument("--seed", type=int, default=seed)
    p.set_defaults(fn=cmd_hipped)

    p = sub.add_parser("killing-foot", help="foot point of a Killing field")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--t", type=float, default=0.6)
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--matrix")
    p.add_argument("--starts", type=int, default=5)
    p.set_defaults(fn=cmd_killing_foot)

    p = sub.add_parser("dual-distance", help="angle between dual hyperplanes vs distance")
    p.add_argument("--y1", type=_floats)
    p.add_argument("--y2", type=_floats)
    p.add_argument("--m", type=int, default=3, help="dimension for random points")
    p.add_argument("--seed", type=int, default=seed)
    p.set_defaults(fn=cmd_dual_distance)

    p = sub.add_parser("check", help="run the self-check suite")
    p.add_argument("--suite", default="all", choices=["all", *checks.SUITES])
    p.add_argument("--seed", type=int, default=seed)
    p.set_defaults(fn=cmd_check)
    return ap


def run(argv=None) -> int:
    start = time.perf_counter()
    try:
        args = make_parser(default_seed()).parse_args(argv)
    except UsageError as exc:
        print(f"curvlink: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code = args.fn(args)
    except (OSError, json.JSONDecodeError, cio.FormatError, UsageError) as exc:
        print(f"curvlink: {exc}", file=sys.stderr)
        code = EXIT_IO
    except (SolverError, FootError) as exc:
        print(f"curvlink: solver failed: {exc}", file=sys.stderr)
        code = EXIT_SOLVER
    except ValueError as exc:
        print(f"curvlink: invalid input: {exc}", file=sys.stderr)
        code = EXIT_INVALID
    print(f"curvlink: {args.verb} finished in {time.perf_counter() - start:.3f}s",
          file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
