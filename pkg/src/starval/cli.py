"""Command-line front end.

Exit codes: 0 success, 2 validation error, 3 numerical-contract violation,
1 internal error.
"""

from __future__ import annotations

import argparse
import importlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .approx import approximation_report, recover_theta
from .bodies import GeodesicCap, load_body, random_body
from .errors import ContractViolation, ValidationError
from .measure import estimate_content, estimate_outer_measure, proportionality_check, vanishing_check
from .report import RunConfig, emit_report, write_report
from .sphere import build_quadrature, random_rotation, surface_measure
from .theta import load_theta
from .valuation import (
    BlackBoxValuation,
    axiom_scale,
    check_rotation_invariance,
    check_valuation_axiom,
    continuity_modulus_check,
    dual_quermassintegral,
    eval_valuation,
    inclusion_exclusion_terms,
    theta_valuation,
)

EXIT_OK, EXIT_INTERNAL, EXIT_VALIDATION, EXIT_CONTRACT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _quad_args(p, degree_flag="--degree", default=20):
    p.add_argument("--n", type=int, default=3, help="ambient dimension (default 3)")
    p.add_argument("--scheme", default="product-gauss", choices=["product-gauss", "monte-carlo"])
    p.add_argument(degree_flag, dest="quad_degree", type=int, default=default, help="quadrature degree")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
    p.add_argument("--nodes", type=int, default=None, help="Monte Carlo node count")
    p.add_argument("--out", default=None, help="report path (default: stdout)")


def _valuation_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--theta", help=".theta.json file")
    g.add_argument("--valuation", help="black-box valuation as module:attribute")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="starval", description="Rotation-invariant valuations on star bodies.")
    parser.add_argument("--version", action="version", version=f"starval {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate V(K) = int theta(rho_K) dm")
    _quad_args(p)
    p.add_argument("--theta", required=True)
    p.add_argument("--body", nargs="+", required=True)

    p = sub.add_parser("quermass", help="dual quermassintegrals (1/n) int rho^k dm")
    _quad_args(p)
    p.add_argument("--body", nargs="+", required=True)
    p.add_argument("--k", type=int, nargs="+", default=None)

    p = sub.add_parser("approx", help="approximate V by dual quermassintegrals")
    _quad_args(p, "--quad-degree", 30)
    _valuation_args(p)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--degree", dest="fit_degree", type=int, required=True, help="polynomial fit degree")
    p.add_argument("--probes", nargs="*", default=[], help="probe .body.json files or directories")
    p.add_argument("--random-probes", type=int, default=0)
    p.add_argument("--probe-seed", type=int, default=0)
    p.add_argument("--quad-tol", type=float, default=1e-9)

    p = sub.add_parser("recover-theta", help="recover theta(lambda) = V(lambda B) / sigma")
    _quad_args(p)
    _valuation_args(p)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--grid-size", type=int, default=21)

    p = sub.add_parser("check", help="residual checks of the valuation identities")
    p.add_argument("kind", choices=["axiom", "inclusion-exclusion", "rotation", "continuity"])
    _quad_args(p)
    _valuation_args(p)
    p.add_argument("--bodies", nargs="+", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--rotations", type=int, default=20)
    p.add_argument("--rotation-seed", type=int, default=0)
    p.add_argument("--eta", type=float, nargs="+", default=[0.1, 0.01, 0.001])

    p = sub.add_parser("measure-lab", help="outer measure / content estimates over cap bumps")
    p.add_argument("op", choices=["outer", "content", "proportionality", "vanishing"])
    _quad_args(p, default=40)
    p.add_argument("--theta", required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--angle", type=float, nargs="+", required=True, help="cap angles in radians")
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--mode", choices=["aligned", "global"], default="aligned")
    p.add_argument("--center", type=float, nargs="+", default=None)
    p.add_argument("--center-seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--trace", action="store_true")
    return parser


def _quadrature(args):
    return build_quadrature(args.n, args.quad_degree, args.scheme, args.seed, args.nodes)


def _config(args, q, inputs, tolerances=None, **params) -> RunConfig:
    quad = {"scheme": args.scheme, "degree": args.quad_degree}
    if args.scheme == "monte-carlo":
        quad.update(seed=q.params.get("seed"), n_nodes=q.params.get("n_nodes"))
    return RunConfig(args.command, args.n, quad, tolerances or {}, inputs, args.out, params)


def _read(loader, path, *a):
    try:
        return loader(path, *a)
    except OSError as exc:
        raise ValidationError(f"cannot read input {path}: {exc.strerror or exc}") from None


def _theta_input(path):
    theta = _read(load_theta, path)
    return theta, {"path": str(path), "spec": theta.to_spec()}


def _bodies_input(paths, n):
    bodies = [_read(load_body, p, n) for p in paths]
    return bodies, [{"path": str(p), "spec": b.to_spec()} for p, b in zip(paths, bodies)]


def _load_valuation(args, q):
    if args.theta:
        theta, spec = _theta_input(args.theta)
        return theta_valuation(theta, q), theta, {"theta": spec}
    mod, _, attr = args.valuation.partition(":")
    if not attr:
        raise ValidationError("--valuation must look like module:attribute")
    try:
        obj = getattr(importlib.import_module(mod), attr)
    except (ImportError, AttributeError) as exc:
        raise ValidationError(f"cannot load valuation {args.valuation!r}: {exc}") from None
    if not isinstance(obj, BlackBoxValuation):
        M = getattr(args, "M", None)
        if M is None:
            raise ValidationError("a plain callable valuation needs --M")
        obj = BlackBoxValuation(obj, M, args.n, label=args.valuation)
    return obj, None, {"valuation": args.valuation}


def _cmd_eval(args):
    q = _quadrature(args)
    theta, tspec = _theta_input(args.theta)
    bodies, bspec = _bodies_input(args.body, args.n)
    values = [{"body": s["path"], "value": eval_valuation(theta, K, q)} for K, s in zip(bodies, bspec)]
    result = {"surface_measure": surface_measure(args.n), "values": values}
    return result, _config(args, q, {"theta": tspec, "bodies": bspec}), True


def _cmd_quermass(args):
    q = _quadrature(args)
    bodies, bspec = _bodies_input(args.body, args.n)
    ks = args.k if args.k is not None else list(range(args.n + 1))
    rows = []
    for K, s in zip(bodies, bspec):
        rows.append({"body": s["path"],
                     "quermassintegrals": [{"k": k, "index": args.n - k,
                                            "value": dual_quermassintegral(K, k, q)} for k in ks]})
    result = {"surface_measure": surface_measure(args.n), "bodies": rows}
    return result, _config(args, q, {"bodies": bspec}, k=ks), True


def _probe_paths(items):
    out = []
    for item in items:
        p = Path(item)
        out.extend(sorted(p.glob("*.body.json")) if p.is_dir() else [p])
    return out


def _cmd_approx(args):
    q = _quadrature(args)
    V, theta, vin = _load_valuation(args, q)
    paths = _probe_paths(args.probes)
    probes, pspec = _bodies_input(paths, args.n)
    if args.random_probes:
        rng = np.random.default_rng(args.probe_seed)
        kinds = ("harmonic", "ellipsoid", "cap_bump")
        probes += [random_body(rng, args.n, kinds[i % 3], max_radius=args.M) for i in range(args.random_probes)]
    if not probes:
        raise ValidationError("no probe bodies: pass --probes and/or --random-probes")
    family = f"{len(paths)} file probes + {args.random_probes} random probes (seed {args.probe_seed})"
    report = approximation_report(theta if theta is not None else V, args.M, args.fit_degree, probes, q,
                                  probe_family=family, quadrature_tolerance=args.quad_tol, strict=False)
    cfg = _config(args, q, {**vin, "probes": pspec}, {"quadrature": args.quad_tol},
                  M=args.M, fit_degree=args.fit_degree, random_probes=args.random_probes,
                  probe_seed=args.probe_seed)
    return report.to_dict(), cfg, report.bound_holds


def _cmd_recover(args):
    q = _quadrature(args)
    V, theta, vin = _load_valuation(args, q)
    rec = recover_theta(V, args.M, args.grid_size)
    result = {"surface_measure": surface_measure(args.n), "lambda_grid": rec.lambda_grid,
              "theta_values": rec.theta_values}
    if theta is not None:
        result["max_abs_error_vs_theta"] = float(np.max(np.abs(rec.theta_values - theta(rec.lambda_grid))))
    return result, _config(args, q, vin, M=args.M, grid_size=args.grid_size), True


def _cmd_check(args):
    q = _quadrature(args)
    args.M = None
    V, theta, vin = _load_valuation(args, q)
    bodies, bspec = _bodies_input(args.bodies, args.n)
    inputs = {**vin, "bodies": bspec}
    if args.kind == "axiom":
        if len(bodies) != 2:
            raise ValidationError("axiom check needs exactly two bodies")
        thr = 1e-12 if args.threshold is None else args.threshold
        res = check_valuation_axiom(V, *bodies)
        rel = res / axiom_scale(V, *bodies)
        result = {"residual": res, "relative_residual": rel, "threshold": thr}
        ok = rel <= thr
    elif args.kind == "inclusion-exclusion":
        thr = 1e-12 if args.threshold is None else args.threshold
        top, terms = inclusion_exclusion_terms(V, bodies)
        res = abs(top - math.fsum(terms))
        rel = res / (1.0 + math.fsum(abs(t) for t in terms))
        result = {"residual": res, "relative_residual": rel, "threshold": thr, "terms": len(terms)}
        ok = rel <= thr
    elif args.kind == "rotation":
        thr = 1e-9 if args.threshold is None else args.threshold
        rots = [random_rotation(args.n, args.rotation_seed + i) for i in range(args.rotations)]
        rows = []
        for K, s in zip(bodies, bspec):
            res = check_rotation_invariance(V, K, rots)
            rows.append({"body": s["path"], "residual": res, "per_unit": res / max(1.0, abs(V(K)))})
        result = {"rotations": args.rotations, "rotation_seed": args.rotation_seed, "threshold": thr,
                  "bodies": rows}
        ok = all(r["per_unit"] <= thr for r in rows)
    else:
        if theta is None:
            raise ValidationError("continuity check needs --theta (a declared modulus)")
        rows = []
        for K, s in zip(bodies, bspec):
            for eta in args.eta:
                c = continuity_modulus_check(theta, K, eta, q)
                rows.append({"body": s["path"], "eta": eta, "difference": c.difference,
                             "bound": c.bound, "holds": c.holds})
        result = {"rows": rows}
        thr = None
        ok = all(r["holds"] for r in rows)
    result["passed"] = bool(ok)
    cfg = _config(args, q, inputs, {"threshold": thr}, kind=args.kind, rotations=args.rotations,
                  rotation_seed=args.rotation_seed, eta=args.eta)
    return result, cfg, ok


def _cmd_measure(args):
    theta, tspec = _theta_input(args.theta)
    q = _quadrature(args) if args.mode == "global" else None
    kw = {"rule": args.mode, "degree": args.quad_degree}
    center = tuple(args.center) if args.center else tuple(np.eye(args.n)[-1])
    ok = True
    if args.op in ("outer", "content"):
        fn = estimate_outer_measure if args.op == "outer" else estimate_content
        ests = [fn(theta, GeodesicCap(center, a), args.lam, args.budget, q, **kw) for a in args.angle]
        result = {"estimates": [e.to_dict(args.trace) for e in ests]}
    elif args.op == "proportionality":
        rep = proportionality_check(theta, args.lam, args.angle, args.budget, q, n=args.n,
                                    center_seed=args.center_seed, **kw)
        scale = max(abs(rep.theta_direct), theta.max_on(args.lam))
        ok = rep.max_deviation_from_theta <= args.tolerance * scale
        result = {**rep.to_dict(args.trace), "tolerance": args.tolerance, "passed": ok}
    else:
        rows = vanishing_check(theta, args.lam, args.angle, args.budget, q, n=args.n, **kw)
        ok = all(r.holds for r in rows)
        result = {"rows": [{"angle": r.angle, "cap_measure": r.cap_measure, "bound": r.bound,
                            "estimate": r.estimate, "holds": r.holds} for r in rows], "passed": ok}
    quad = {"scheme": "cap-aligned" if args.mode == "aligned" else args.scheme, "degree": args.quad_degree}
    cfg = RunConfig(args.command, args.n, quad, {"tolerance": args.tolerance}, {"theta": tspec}, args.out,
                    {"op": args.op, "lambda": args.lam, "angles": args.angle, "budget": args.budget,
                     "mode": args.mode, "center": list(center), "center_seed": args.center_seed})
    return result, cfg, ok


COMMANDS = {"eval": _cmd_eval, "quermass": _cmd_quermass, "approx": _cmd_approx,
            "recover-theta": _cmd_recover, "check": _cmd_check, "measure-lab": _cmd_measure}


def run_command(argv=None) -> int:
    started = time.time()
    try:
        args = build_parser().parse_args(argv)
        result, cfg, ok = COMMANDS[args.command](args)
        text = emit_report(result, cfg, started)
        if args.out:
            write_report(text, args.out)
        else:
            sys.stdout.write(text)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"starval: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ContractViolation as exc:
        print(f"starval: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except Exception as exc:
        print(f"starval: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if ok else EXIT_CONTRACT


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
