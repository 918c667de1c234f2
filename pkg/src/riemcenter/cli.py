"""Command-line entry point: riemcenter {mean, radii, newton, verify, specfun, shape2d}.

Every run prints one JSON document (or a flat table) holding the resolved
configuration and the result. Exit codes: 0 success, 1 usage error,
2 no convergence, 3 domain exit or domain error, 4 verification failure.
"""
import argparse
import json
import math
import sys

import numpy as np

from . import io, oracles, radii, specfun
from .averaging import MassDistribution, best_support_point, iterate_mean
from .errors import DegeneracyError, DomainError, RiemCenterError
from .manifolds import ComplexProjective, Euclidean, ShapeSpace2D, Sphere, parse_manifold
from .newton import classify_order, iterate, mean_field, poly1d_field, radial_field
from .trace import DOMAIN_EXIT, MAX_ITER

EXIT_OK, EXIT_USAGE, EXIT_NOCONV, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _seed(text):
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--seed", type=_seed, default=0)
    return p


def _iteration(p):
    p.add_argument("--p0", help="support point index, or coordinates as a JSON array")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=_positive_int, default=200)
    p.add_argument("--trace", help="write the iteration trace as JSON lines")


def build_parser():
    common = _common()
    parser = _Parser(prog="riemcenter", description="Riemannian centers of mass and contraction bounds.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("mean", parents=[common], help="weighted Riemannian mean of a point set")
    p.add_argument("--input", required=True)
    _iteration(p)
    p.add_argument("--assume-tethered", action="store_true")

    p = sub.add_parser("radii", parents=[common], help="contraction radii and critical radius")
    p.add_argument("--variant", default="seq", choices=("seq", "full-minus", "full-plus", "full_minus", "full_plus"))
    p.add_argument("--Delta", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--r1", type=float)
    p.add_argument("--D", type=float, default=0.0)
    p.add_argument("--manifold")
    p.add_argument("--locally-symmetric", action="store_true")

    p = sub.add_parser("newton", parents=[common], help="iterate Psi_Y or Phi_X for a demo field")
    p.add_argument("--field", required=True, help="radial | mean:<dist.json> | poly1d:<c0,c1,...>")
    p.add_argument("--map", choices=("psi", "phi"), default="phi")
    p.add_argument("--manifold", help="manifold for the radial field (default euclidean with the p0 dimension)")
    _iteration(p)

    p = sub.add_parser("verify", help="numerical checks of the bounds")
    vsub = p.add_subparsers(dest="check", parser_class=_Parser)
    vsub.required = True
    v = vsub.add_parser("jacobi", parents=[common])
    v.add_argument("--lambda", dest="lam", type=float)
    v.add_argument("--r", type=float)
    v.add_argument("--dim", type=int, default=3)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--steps", type=int, default=10_000)
    v = vsub.add_parser("hessian", parents=[common])
    v.add_argument("--manifold", required=True)
    v.add_argument("--r", type=float, required=True)
    v.add_argument("--h", type=float)
    v = vsub.add_parser("nabla-y", parents=[common])
    v.add_argument("--input", required=True)
    v.add_argument("--p0")
    v.add_argument("--h", type=float)

    p = sub.add_parser("specfun", parents=[common], help="evaluate a special function")
    p.add_argument("--fn", required=True, choices=sorted(specfun.FUNCTIONS))
    p.add_argument("--z", type=float)
    p.add_argument("--x", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--Delta", type=float)

    p = sub.add_parser("shape2d", help="planar shape space utilities")
    ssub = p.add_subparsers(dest="action", parser_class=_Parser)
    ssub.required = True
    s = ssub.add_parser("embed", parents=[common])
    s.add_argument("--input", help="JSON file with 'points' (k [re, im] pairs each) or one configuration")
    s.add_argument("--landmarks", help="one configuration as a JSON array of [re, im] pairs")
    s = ssub.add_parser("mean", parents=[common])
    s.add_argument("--input", required=True)
    _iteration(s)
    s.add_argument("--assume-tethered", action="store_true")
    return parser


# output

def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    else:
        yield prefix, obj


def _emit(doc, fmt, out):
    if fmt == "json":
        out.write(io.dumps(doc, indent=2) + "\n")
        return
    rows = list(_flatten(json.loads(io.dumps(doc))))
    width = max(len(k) for k, _ in rows)
    for k, v in rows:
        out.write(f"{k.ljust(width)}  {json.dumps(v)}\n")


def _config(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


# helpers

def _load(path):
    try:
        return io.load_distribution(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read distribution {path!r}: {exc}") from exc


def _json_arg(text, name):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{name} is not valid JSON: {exc}") from exc


def _p0(Q, text):
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        pass
    raw = _json_arg(text, "p0")
    return io._point_in(Q.manifold, raw)


def _iteration_status(trace):
    if trace.converged:
        return EXIT_OK
    return EXIT_NOCONV if trace.reason == MAX_ITER else EXIT_DOMAIN


def _mean_result(Q, args):
    p0 = _p0(Q, args.p0)
    if isinstance(p0, int) and not 0 <= p0 < len(Q):
        raise UsageError(f"--p0 index {p0} out of range for {len(Q)} points")
    mean, trace = iterate_mean(Q, p0, args.tol, args.max_iter, assume_tethered=args.assume_tethered)
    if args.trace:
        io.write_trace(trace, args.trace)
    res = {
        "manifold": Q.manifold.spec,
        "n_points": len(Q),
        "mean": io.point_out(Q.manifold, mean),
        "converged": trace.converged,
        "reason": trace.reason,
        "message": trace.message,
        "n_iter": trace.n_iter,
        "summary": io.trace_summary(trace),
        "info": trace.info,
    }
    return res, _iteration_status(trace)


# subcommands

def cmd_mean(args):
    return _mean_result(_load(args.input), args)


def _bounds_from_args(args):
    if args.Delta is None or args.delta is None:
        raise UsageError("radii needs --Delta and --delta, or --manifold")
    if args.r1 is None:
        return radii.CurveBounds.regular(args.Delta, args.delta, locally_symmetric=args.locally_symmetric)
    return radii.CurveBounds.constant(args.Delta, args.delta, args.r1, args.locally_symmetric)


def cmd_radii(args):
    variant = radii.KappaVariant.parse(args.variant)
    res = {"variant": variant.value}
    if args.manifold:
        M = parse_manifold(args.manifold)
        if isinstance(M, Sphere):
            rep = radii.sphere_report(M.radius, variant, args.D)
        elif isinstance(M, ComplexProjective):
            rep = radii.cpn_report(M.n, variant, args.D)
        else:
            rep = radii.solve_radii(variant, radii.CurveBounds.constant(0.0, 0.0, math.inf), args.D)
        res["manifold"] = M.spec
        res["report"] = rep.as_dict()
        return res, EXIT_OK
    bounds = _bounds_from_args(args)
    rep = radii.solve_radii(variant, bounds, args.D)
    res["report"] = rep.as_dict()
    if args.delta >= 0:
        rc = radii.rate_constants(variant, bounds, args.D)
        res["rate_constants"] = rc.__dict__
    return res, EXIT_OK


def _poly_coeffs(text):
    try:
        return [float(c) for c in text.split(",") if c.strip()]
    except ValueError as exc:
        raise UsageError(f"bad poly1d coefficients {text!r}") from exc


def cmd_newton(args):
    kind, _, rest = args.field.partition(":")
    Q = None
    if kind == "radial":
        if args.manifold:
            M = parse_manifold(args.manifold)
            if not isinstance(M, Euclidean):
                raise UsageError("the radial field lives on euclidean manifolds")
        else:
            if args.p0 is None:
                raise UsageError("radial needs --p0 coordinates or --manifold")
            M = Euclidean(len(_json_arg(args.p0, "p0")))
        field = radial_field(M)
        p0 = np.ones(M.dim) if args.p0 is None else np.asarray(_json_arg(args.p0, "p0"), float)
    elif kind == "poly1d":
        M = Euclidean(1)
        coeffs = _poly_coeffs(rest)
        if not coeffs:
            raise UsageError("poly1d needs coefficients, e.g. poly1d:1,0,-2")
        field = poly1d_field(M, coeffs)
        if args.p0 is None:
            raise UsageError("poly1d needs --p0")
        raw = _json_arg(args.p0, "p0")
        p0 = np.atleast_1d(np.asarray(raw, float))
    elif kind == "mean":
        if not rest:
            raise UsageError("mean field needs a file: mean:<dist.json>")
        Q = _load(rest)
        M = Q.manifold
        field = mean_field(Q)
        p0 = _p0(Q, args.p0)
        if p0 is None:
            p0 = best_support_point(Q)
        if isinstance(p0, int):
            if not 0 <= p0 < len(Q):
                raise UsageError(f"--p0 index {p0} out of range")
            p0 = Q.points[p0]
    else:
        raise UsageError(f"unknown field {args.field!r}")
    tol = 1e-12 if args.tol is None else args.tol
    try:
        final, trace = iterate(args.map, field, p0, tol, args.max_iter)
    except DegeneracyError as exc:
        return {"error": str(exc), "reason": DOMAIN_EXIT}, EXIT_DOMAIN
    if args.trace:
        io.write_trace(trace, args.trace)
    fit = classify_order(trace)
    res = {
        "manifold": M.spec,
        "final": io.point_out(M, final),
        "converged": trace.converged,
        "reason": trace.reason,
        "message": trace.message,
        "n_iter": trace.n_iter,
        "summary": io.trace_summary(trace),
        "order": fit.__dict__,
    }
    return res, _iteration_status(trace)


def _hessian_expected(M, d):
    """Closed-form spectrum of the Hessian of d(., q)^2 / 2 at distance d."""
    if isinstance(M, Euclidean):
        return [1.0] * M.dim
    if isinstance(M, Sphere):
        return [1.0] + [specfun.h(M.radius ** -2, d)] * (M.dim - 1)
    # CP^n: radial 1, Hopf direction curvature 4, the rest curvature 1
    return [1.0, specfun.h(4.0, d)] + [specfun.h(1.0, d)] * (M.dim - 2)


def cmd_verify(args):
    rng = np.random.default_rng(args.seed)
    if args.check == "jacobi":
        if (args.lam is None) != (args.r is None):
            raise UsageError("give both --lambda and --r, or neither")
        if args.lam is None:
            rep = oracles.check_jacobi_bounds(args.samples, args.seed, args.dim)
            res = {"check": "jacobi-bounds", "samples": rep.samples, "violations": rep.violations,
                   "equality_max_error": rep.equality_max_error, "tangential_max": rep.tangential_max,
                   "worst_ratio": rep.worst_ratio, "passed": rep.passed}
            return res, EXIT_OK if rep.passed else EXIT_VERIFY
        v = rng.normal(size=args.dim)
        f1 = oracles.integrate_jacobi(oracles.JacobiProblem(v=v, r=args.r, lam=args.lam), args.steps)
        measured = float(np.linalg.norm(f1) / np.linalg.norm(v))
        expected = oracles.constant_curvature_value(args.lam, args.r)
        bound = oracles.jacobi_bound(args.lam, args.lam, args.r)
        err = abs(measured - expected)
        ok = err <= 1e-8 and measured <= bound + 1e-8
        res = {"check": "jacobi", "lambda": args.lam, "r": args.r, "measured": measured,
               "expected": expected, "bound": bound, "error": err, "tolerance": 1e-8, "passed": ok}
        return res, EXIT_OK if ok else EXIT_VERIFY
    if args.check == "hessian":
        M = parse_manifold(args.manifold)
        F = None
        p = _random_point(M, rng)
        u = M.frame(p) @ rng.normal(size=M.dim)
        u = u / np.linalg.norm(u)
        q = M.exp(p, args.r * u)
        H = oracles.hessian_probe(M, p, q, F, args.h)
        d = M.dist(p, q)
        ev = np.sort(np.linalg.eigvalsh((H + H.T) / 2))
        expected = np.sort(_hessian_expected(M, d))
        rel = float(np.max(np.abs(ev - expected) / np.maximum(1.0, np.abs(expected))))
        tol = 1e-8 if isinstance(M, Euclidean) else 1e-5
        ok = rel <= tol
        res = {"check": "hessian", "manifold": M.spec, "distance": d, "eigenvalues": ev,
               "expected": expected, "max_relative_error": rel, "tolerance": tol, "passed": ok}
        return res, EXIT_OK if ok else EXIT_VERIFY
    Q = _load(args.input)
    p0 = _p0(Q, args.p0)
    if p0 is None:
        p0 = best_support_point(Q)
    if isinstance(p0, int):
        p0 = Q.points[p0]
    rep = oracles.nabla_y_probe(Q, p0, None, args.h)
    res = {"check": "nabla-y", "manifold": Q.manifold.spec, "point": p0,
           "nabla_y": rep.nabla_y, "hessian_sum": rep.hessian_sum,
           "agreement": rep.agreement, "norm_plus_identity": rep.norm_plus_identity,
           "bound": rep.bound, "passed": rep.passed}
    return res, EXIT_OK if rep.passed else EXIT_VERIFY


def _random_point(M, rng):
    if isinstance(M, Euclidean):
        return rng.normal(size=M.dim)
    if isinstance(M, Sphere):
        x = rng.normal(size=M.ambient_dim)
        return M.radius * x / np.linalg.norm(x)
    x = rng.normal(size=M.ambient_dim)
    return x / np.linalg.norm(x)


_SPECFUN_ARGS = {
    "c": ("z",), "s": ("z",), "phi-minus": ("x",), "phi-plus": ("x",),
    "c1": ("lam", "r"), "h": ("lam", "r"), "psi": ("lam", "r"), "psi-max": ("delta", "Delta", "r"),
}


def cmd_specfun(args):
    names = _SPECFUN_ARGS[args.fn]
    vals = [getattr(args, n) for n in names]
    if any(v is None for v in vals):
        flags = ", ".join("--lambda" if n == "lam" else f"--{n}" for n in names)
        raise UsageError(f"{args.fn} needs {flags}")
    value = specfun.FUNCTIONS[args.fn](*vals)
    return {"fn": args.fn, "arguments": dict(zip(names, vals)), "value": value}, EXIT_OK


def cmd_shape2d(args):
    if args.action == "mean":
        Q = _load(args.input)
        if not isinstance(Q.manifold, ShapeSpace2D):
            raise UsageError("shape2d mean needs a 'shape2d:k=...' input")
        return _mean_result(Q, args)
    if (args.input is None) == (args.landmarks is None):
        raise UsageError("give exactly one of --input and --landmarks")
    if args.landmarks is not None:
        configs = [_json_arg(args.landmarks, "landmarks")]
        weights = None
    else:
        try:
            with open(args.input, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {args.input!r}: {exc}") from exc
        configs = data["points"] if isinstance(data, dict) else [data]
        weights = data.get("weights") if isinstance(data, dict) else None
    configs = [np.asarray(c, dtype=float) for c in configs]
    if any(c.ndim != 2 or c.shape[1] != 2 for c in configs):
        raise UsageError("configurations must be arrays of [re, im] pairs")
    k = configs[0].shape[0]
    M = ShapeSpace2D(k)
    pts = [M.embed(c) for c in configs]
    res = {"manifold": M.spec, "points": pts}
    if weights is not None:
        res["weights"] = MassDistribution(M, pts, weights).weights
    return res, EXIT_OK


COMMANDS = {"mean": cmd_mean, "radii": cmd_radii, "newton": cmd_newton, "verify": cmd_verify,
            "specfun": cmd_specfun, "shape2d": cmd_shape2d}


def run(argv=None, out=None, err=None):
    """Parse argv, run the subcommand and return the exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    config = _config(args)
    try:
        result, code = COMMANDS[args.command](args)
    except UsageError as exc:
        err.write(f"riemcenter: {exc}\n")
        return EXIT_USAGE
    except (DomainError, DegeneracyError) as exc:
        result, code = {"error": str(exc), "error_type": type(exc).__name__}, EXIT_DOMAIN
        if getattr(exc, "d_crit", None) is not None:
            result["D_crit"] = exc.d_crit
    except RiemCenterError as exc:
        result, code = {"error": str(exc), "error_type": type(exc).__name__}, EXIT_DOMAIN
    _emit({"config": config, "result": result, "exit_code": code}, args.format, out)
    return code


def main():
    sys.exit(run())
