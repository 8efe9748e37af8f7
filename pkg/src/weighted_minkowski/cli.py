"""Command-line front end: ``wmink <command> ...``.

Every JSON document carries a ``metadata`` block (version, command, seed,
tolerances, timestamp). Exit status: 0 when all checks pass, 1 when a check
fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .acceptance import RUNNERS
from .body import is_zonotope, random_symmetric_polytope
from .density import check_evenness, check_homogeneity, check_implied_concavity, check_p_concavity
from .errors import CheckFailed, FaceCollapsed, GeometryError, NoConvergence
from .integrate import body_measure_cone, body_measure_mc, gaussian_body_measure
from .mixed import first_inequality_check, mixed_measure, mixed_measure_oracle
from .projection import projection_profile
from .schema import InputError, load_body, load_density, load_json, load_problem
from .shephard import shephard_batch, shephard_verify, stability_batch, stability_check
from .solver import solve, uniqueness_probe
from .surface import sigma

SEED_ENV = "WMINK_SEED"


class Failed(Exception):
    """Raised by a command whose check did not pass; carries the payload."""

    def __init__(self, payload):
        super().__init__("check failed")
        self.payload = payload


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer", None)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _metadata(args, tolerances: dict) -> dict:
    meta = {"version": __version__, "command": args.command_path, "seed": args.seed, "tolerances": tolerances}
    if not args.no_timestamp:
        meta["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return meta


def _emit(args, result, tolerances: Optional[dict] = None, csv_rows: Optional[list] = None) -> None:
    """Write JSON (default) or CSV to ``--output`` or stdout."""
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        for k, v in _metadata(args, tolerances or {}).items():
            buf.write(f"# {k}: {json.dumps(v, default=_jsonable, sort_keys=True)}\n")
        if csv_rows and isinstance(csv_rows, str):
            buf.write(csv_rows)
        elif csv_rows:
            w = csv.DictWriter(buf, fieldnames=list(csv_rows[0]), lineterminator="\n")
            w.writeheader()
            for row in csv_rows:
                w.writerow({k: json.dumps(v, default=_jsonable) if isinstance(v, (list, dict)) else v
                            for k, v in row.items()})
        text = buf.getvalue()
    else:
        doc = {"metadata": _metadata(args, tolerances or {}), "result": result}
        text = json.dumps(doc, default=_jsonable, sort_keys=True, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------------

def cmd_density_validate(args):
    d = load_density(args.density, args.dim)
    checks = []
    if d.r is not None:
        checks.append(check_homogeneity(d, args.samples, args.seed, args.dim))
    if d.even:
        checks.append(check_evenness(d, args.samples, args.seed, args.dim))
    if d.p is not None:
        checks.append(check_p_concavity(d, args.samples, args.seed, args.dim))
    if d.r is not None and d.r > 0:
        checks.append(check_implied_concavity(d, args.samples, args.seed, args.dim))
    rows = [{"check": c.check, "passed": c.passed, "value": c.value, "tolerance": c.tolerance,
             "samples": c.samples, "detail": c.detail} for c in checks]
    result = {"density": d.label, "checks": rows, "passed": all(c.passed for c in checks)}
    _emit(args, result, {"declaration_checks": "per check"}, rows)
    if not result["passed"]:
        raise Failed(result)


def cmd_body_info(args):
    P = load_body(args.body)
    empty = [f.index for f in P.faces if f.empty]
    _emit(args, {
        "n": P.n, "facets": P.N, "pairs": len(P.pair_representatives()), "vertices": P.vertices,
        "volume": P.volume, "circumradius": P.circumradius, "empty_faces": empty,
        "normals": P.normals, "offsets": P.offsets,
    })


def cmd_body_is_zonotope(args):
    P = load_body(args.body)
    cert = is_zonotope(P)
    _emit(args, {"is_zonotope": cert.is_zonotope, "violating_face": cert.violating_face,
                 "face_normals": list(cert.face_normals)})


def cmd_sigma(args):
    P = load_body(args.body)
    s = sigma(P, load_density(args.density, P.n))
    _emit(args, s.to_dict(), {}, s.to_csv())


def cmd_measure(args):
    P = load_body(args.body)
    d = load_density(args.density, P.n)
    out = {"cone": body_measure_cone(P, d) if d.homogeneous else None}
    if args.mc or not d.homogeneous:
        n = args.mc or 10**6
        mc = gaussian_body_measure(P, n, args.seed) if d.kind == "gaussian" else body_measure_mc(P, d, n, args.seed)
        out["mc"] = {"estimate": mc.estimate, "se": mc.se, "samples": n}
    _emit(args, out, {"mc_agreement_se": 3.0})


def cmd_mixed(args):
    K, L = load_body(args.K), load_body(args.L)
    d = load_density(args.density, K.n)
    res = mixed_measure(K, L, d)
    out = {"mu1": res.value, "route": res.route, "V_mu1": res.v_mu1}
    passed = True
    if args.oracle:
        o = mixed_measure_oracle(K, L, d, samples=args.samples, seed=args.seed)
        allowed = max(0.02 * abs(o.value), 3.0 * o.se)
        passed = abs(o.value - res.value) <= allowed
        out["oracle"] = {"value": o.value, "se": o.se, "allowed": allowed, "agrees": passed}
    _emit(args, out, {"oracle_relative": 0.02, "oracle_se": 3.0})
    if not passed:
        raise Failed(out)


def _t_grid(spec: Optional[str]):
    if spec is None:
        return None
    if "," in spec or "." in spec:
        return [float(t) for t in spec.split(",") if t]
    count = int(spec)
    return list(np.arange(1, count + 1) / count)


def cmd_project(args):
    P = load_body(args.body)
    d = load_density(args.density, P.n)
    prof = projection_profile(P, d, args.directions, args.seed, _t_grid(args.t_grid), body_id=args.body)
    args.format = args.format or "csv"
    result = {"body": prof.body, "density": prof.density, "directions": prof.directions, "P": prof.values}
    if prof.t_grid is not None:
        result.update({"t_grid": prof.t_grid, "p": prof.t_values})
    _emit(args, result, {}, prof.to_csv())


def cmd_solve(args):
    problem = load_problem(args.problem)
    tol = {"tol": args.tol, "max_iter": args.max_iter}
    try:
        if args.starts > 1:
            probe = uniqueness_probe(problem, args.starts, args.tol, args.seed)
            out = {**probe.reports[0].to_dict(), "uniqueness": {"distance": probe.distance,
                                                               "tolerance": probe.tolerance,
                                                               "passed": probe.passed}}
            _emit(args, out, tol)
            if not probe.passed:
                raise Failed(out)
        else:
            rep = solve(problem, tol=args.tol, max_iter=args.max_iter,
                        seed=args.seed if args.random_start else None)
            _emit(args, rep.to_dict(), tol)
    except (NoConvergence, FaceCollapsed) as exc:
        out = {"status": type(exc).__name__, "message": str(exc)}
        _emit(args, out, tol)
        raise Failed(out)


def cmd_shephard_check(args):
    K, L = load_body(args.K), load_body(args.L)
    rep = shephard_verify(K, L, load_density(args.density, K.n), args.directions, args.seed)
    _emit(args, rep.to_dict(), {"measure": 1e-9})
    if not rep.passed:
        raise Failed(rep.to_dict())


def cmd_shephard_stability(args):
    K, L = load_body(args.K), load_body(args.L)
    rep = stability_check(K, L, load_density(args.density, K.n), args.eps, args.directions, args.seed)
    _emit(args, rep.to_dict(), {"inequality": 1e-9})
    if not rep.passed:
        raise Failed(rep.to_dict())


def cmd_shephard_batch(args):
    densities = [s.strip() for s in args.densities.split(",")]
    dims = [int(s) for s in args.dims.split(",")]
    if args.kind == "comparison":
        rows = shephard_batch(args.trials, densities, dims, args.directions, args.seed)
        passed = all(r["verdict"] != "violated" for r in rows)
    else:
        from .density import named

        rows = []
        for name in densities:
            for n in dims:
                rows += stability_batch(args.trials, named(name, n), n, args.directions, args.seed)
        passed = all(r["passed"] for r in rows)
    _emit(args, {"rows": rows, "passed": passed}, {"measure": 1e-9}, rows)
    if not passed:
        raise Failed(rows)


def cmd_verify_first(args):
    n = args.dim
    d = load_density(args.density, n) if args.density else load_density("LEB", n)
    if d.dim is not None:
        n = d.dim
    rng = np.random.default_rng(args.seed)
    rows = []
    for k in range(args.trials):
        K, L = random_symmetric_polytope(rng, n), random_symmetric_polytope(rng, n)
        first, second = first_inequality_check(K, L, d)
        rows.append({"trial": k, "lhs": first.lhs, "rhs": first.rhs, "slack": first.slack,
                     "v_slack": second.slack, "passed": first.passed and second.passed})
    passed = all(r["passed"] for r in rows)
    args.format = args.format or "csv"
    _emit(args, {"rows": rows, "passed": passed}, {"slack": 1e-9}, rows)
    if not passed:
        raise Failed(rows)


def cmd_verify_suite(args):
    only = None if args.only is None else {int(s) for s in args.only.split(",")}
    results = []
    for k, runner in enumerate(RUNNERS, start=1):
        if only is not None and k not in only:
            continue
        kw = {} if k == 1 or not args.explicit_seed else {"seed": args.seed}
        c = runner(**kw)
        print(c.line, file=sys.stderr)
        results.append(c.to_dict())
    passed = all(r["passed"] for r in results)
    _emit(args, {"criteria": results, "passed": passed})
    if not passed:
        raise Failed(results)


# -- parser ----------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, stochastic: bool = False):
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None, help="output format (default json)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp so outputs are byte-comparable")
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV} or 0)" if stochastic else "seed for sampled directions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wmink", description="Weighted surface measures, mixed measures, "
                                     "projection functions and Minkowski problems for symmetric polytopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    dens = sub.add_parser("density", help="density utilities").add_subparsers(dest="sub", required=True)
    p = dens.add_parser("validate", help="sample the declared homogeneity, evenness and concavity")
    p.add_argument("density", help="density JSON file or shorthand LEB/X1/GAUSS")
    p.add_argument("--samples", type=int, default=1000, help="sample count per check (default 1000)")
    p.add_argument("--dim", type=int, default=None, help="ambient dimension for densities without one")
    _common(p, True)
    p.set_defaults(func=cmd_density_validate)

    body = sub.add_parser("body", help="body utilities").add_subparsers(dest="sub", required=True)
    p = body.add_parser("info", help="vertices, facets, volume, circumradius")
    p.add_argument("body", help="body JSON file")
    _common(p)
    p.set_defaults(func=cmd_body_info)
    p = body.add_parser("is-zonotope", help="certify all 2-faces centrally symmetric")
    p.add_argument("body", help="body JSON file")
    _common(p)
    p.set_defaults(func=cmd_body_is_zonotope)

    p = sub.add_parser("sigma", help="weighted surface area measure as an atom list")
    p.add_argument("body")
    p.add_argument("density", help="density JSON file or shorthand")
    _common(p)
    p.set_defaults(func=cmd_sigma)

    p = sub.add_parser("measure", help="mu(P) by the cone formula, optionally by Monte Carlo")
    p.add_argument("body")
    p.add_argument("density")
    p.add_argument("--mc", type=int, default=0, metavar="N", help="also run Monte Carlo with N samples")
    _common(p, True)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("mixed", help="mixed measure mu_1(K, L)")
    p.add_argument("K")
    p.add_argument("L")
    p.add_argument("density")
    p.add_argument("--oracle", action="store_true", help="cross-check against finite differences")
    p.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples for the oracle")
    _common(p, True)
    p.set_defaults(func=cmd_mixed)

    p = sub.add_parser("project", help="projection-function profile (CSV by default)")
    p.add_argument("body")
    p.add_argument("density")
    p.add_argument("--directions", type=int, default=256, metavar="M", help="sampled directions (default 256)")
    p.add_argument("--t-grid", default=None, metavar="T",
                   help="also tabulate p(theta, t): a count T (t = 1/T..1) or a comma list")
    _common(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("solve-minkowski", help="solve a discrete weighted Minkowski problem")
    p.add_argument("problem", help='JSON {"density": ..., "normals": [...], "targets": [...]}')
    p.add_argument("--tol", type=float, default=1e-7, help="relative residual tolerance (default 1e-7)")
    p.add_argument("--max-iter", type=int, default=10**4, help="iteration cap (default 10000)")
    p.add_argument("--starts", type=int, default=1, help="random starts for the uniqueness probe (default 1)")
    p.add_argument("--random-start", action="store_true", help="single solve from a seeded random start")
    _common(p, True)
    p.set_defaults(func=cmd_solve)

    sh = sub.add_parser("shephard", help="projection comparison harness").add_subparsers(dest="sub", required=True)
    for name, func, helptext in (("check", cmd_shephard_check, "P_K <= P_L and L zonotope => mu(K) <= mu(L)"),
                                 ("stability", cmd_shephard_stability, "stability inequality with explicit constant")):
        p = sh.add_parser(name, help=helptext)
        p.add_argument("K")
        p.add_argument("L")
        p.add_argument("density")
        p.add_argument("--directions", type=int, default=256, metavar="M", help="sampled directions (default 256)")
        if name == "stability":
            p.add_argument("--eps", type=float, default=None, help="override eps (default: measured margin)")
        _common(p)
        p.set_defaults(func=func)
    p = sh.add_parser("batch", help="randomized sweep")
    p.add_argument("--trials", type=int, default=25, help="pairs per (density, dimension)")
    p.add_argument("--densities", default="LEB,X1", help="comma list of shorthands (default LEB,X1)")
    p.add_argument("--dims", default="2,3", help="comma list of dimensions (default 2,3)")
    p.add_argument("--kind", choices=("comparison", "stability"), default="comparison")
    p.add_argument("--directions", type=int, default=256, metavar="M")
    _common(p, True)
    p.set_defaults(func=cmd_shephard_batch)

    ver = sub.add_parser("verify", help="inequality sweeps").add_subparsers(dest="sub", required=True)
    p = ver.add_parser("first-inequality", help="first inequality on random pairs (CSV of slacks)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--density", default=None, help="density file or shorthand (default LEB)")
    p.add_argument("--dim", type=int, default=2, help="dimension when the density has none (default 2)")
    _common(p, True)
    p.set_defaults(func=cmd_verify_first)

    p = sub.add_parser("verify-suite", help="run every acceptance criterion")
    p.add_argument("--only", default=None, help="comma list of criterion numbers")
    _common(p, True)
    p.set_defaults(func=cmd_verify_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.command_path = " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)
    try:
        args.explicit_seed = args.seed is not None
        if args.seed is None:
            args.seed = _default_seed()
        if args.format is None and args.func not in (cmd_project, cmd_verify_first):
            args.format = "json"
        args.func(args)
    except Failed:
        return 1
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (InputError, GeometryError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
