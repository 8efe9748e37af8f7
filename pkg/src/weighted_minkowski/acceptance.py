"""One runner per acceptance criterion, shared by the test-suite and ``verify-suite``.

Every runner returns a :class:`Criterion` carrying pass/fail, the elapsed
time against its budget and a small dictionary of diagnostics. Seeds are
fixed so that repeated runs are bit-identical.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .body import (
    cross_polytope,
    cube,
    diamond,
    random_symmetric_polytope,
    scale,
    square,
)
from .density import abs_linear, check_implied_concavity, gaussian, named, power_cone
from .integrate import body_measure_cone, body_measure_mc
from .mixed import (
    FConcavity,
    f_concave_first_check,
    first_inequality_check,
    isoperimetric_check,
    mixed_measure,
    mixed_measure_oracle,
)
from .projection import P_mu, projection_distance
from .shephard import ball_pair_regression, shephard_batch, stability_batch
from .solver import MinkowskiProblem, round_trip, solve, uniqueness_probe
from .surface import perturbation_continuity_check, sigma

MC_SAMPLES = 10**6


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool = False
    seconds: float = 0.0
    budget: float = math.inf
    detail: dict = field(default_factory=dict)

    @property
    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"[{verdict}] criterion {self.number}: {self.title} ({self.seconds:.1f}s / {self.budget:g}s)"

    def to_dict(self) -> dict:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "seconds": self.seconds, "budget": self.budget, "detail": self.detail}


def _timed(number: int, title: str, budget: float):
    """Decorator: time the body, fold the budget into the verdict."""

    def wrap(fn: Callable[..., tuple[bool, dict]]):
        def run(**kw) -> Criterion:
            t0 = time.perf_counter()
            ok, detail = fn(**kw)
            dt = time.perf_counter() - t0
            within = dt < budget
            detail = {**detail, "within_budget": within}
            return Criterion(number, title, bool(ok and within), dt, budget, detail)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


# -- closed forms for the fixture bodies (derived by hand) ----------------------------

def _fixtures():
    """``(name, body, density, face measures, mu, mu_1(P, P), P_mu(theta))``."""
    r2 = math.sqrt(2.0)
    a = np.abs
    return [
        ("SQ2/LEB", square(), named("LEB", 2), [2, 2, 2, 2], 4.0, 8.0, lambda t: 2 * (a(t[:, 0]) + a(t[:, 1]))),
        ("SQ2/X1", square(), named("X1", 2), [2, 1, 2, 1], 2.0, 6.0, lambda t: (4 * a(t[:, 0]) + 2 * a(t[:, 1])) / 3),
        ("CU3/LEB", cube(3), named("LEB", 3), [4] * 6, 8.0, 24.0, lambda t: 4 * a(t).sum(axis=1)),
        ("CU3/X1", cube(3), named("X1", 3), [4, 2, 2, 4, 2, 2], 4.0, 16.0,
         lambda t: 3 * a(t[:, 0]) + 1.5 * (a(t[:, 1]) + a(t[:, 2]))),
        ("DIA2/LEB", diamond(), named("LEB", 2), [r2] * 4, 2.0, 4.0, lambda t: 2 * a(t).max(axis=1)),
        ("DIA2/X1", diamond(), named("X1", 2), [r2 / 2] * 4, 2.0 / 3.0, 2.0, lambda t: 2 * a(t).max(axis=1) / 3),
    ]


def _test_directions(n: int) -> np.ndarray:
    rng = np.random.default_rng(7)
    v = np.vstack([np.eye(n), np.ones((1, n)), rng.standard_normal((8, n))])
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@_timed(1, "fixture closed forms within 1e-9", budget=1.0)
def criterion_1():
    worst = 0.0
    rows = {}
    for name, P, d, faces, mu, mu1, proj in _fixtures():
        th = _test_directions(P.n)
        s = sigma(P, d)
        errs = [
            np.abs(s.weights - faces).max(),
            np.abs(s.directions - P.normals).max(),
            abs(body_measure_cone(P, d) - mu),
            abs(mixed_measure(P, P, d).value - mu1),
            np.abs(P_mu(P, d, th) - proj(th)).max(),
        ]
        rows[name] = float(max(errs))
        worst = max(worst, rows[name])
    return worst < 1e-9, {"max_error": worst, "per_fixture": rows}


def _random_bodies(count: int, seed: int):
    rng = np.random.default_rng(seed)
    return [random_symmetric_polytope(rng, 2 + (k % 2)) for k in range(count)]


@_timed(2, "cone formula vs Monte Carlo; surface vs finite-difference mixed measures", budget=120.0)
def criterion_2(seed: int = 2):
    fixtures = [(name, P, d) for name, P, d, *_ in _fixtures()]
    bodies = _random_bodies(50, seed)
    worst_z = 0.0
    fails = []
    count = 0
    for dname in ("LEB", "X1"):
        cases = [(n, P, d) for n, P, d in fixtures if n.endswith(dname)]
        cases += [(f"rand{k:02d}/{dname}", P, named(dname, P.n)) for k, P in enumerate(bodies)]
        for k, (name, P, d) in enumerate(cases):
            mc = body_measure_mc(P, d, MC_SAMPLES, seed=1000 * seed + k)
            exact = body_measure_cone(P, d)
            if mc.se == 0.0:
                # the body fills its sampling box and the density is constant: the estimate is exact
                z = 0.0 if abs(mc.estimate - exact) <= 1e-9 * max(1.0, exact) else math.inf
            else:
                z = abs(mc.estimate - exact) / mc.se
            worst_z = max(worst_z, float(z))
            count += 1
            if z > 3.0:
                fails.append({"case": name, "z": z})
    # mixed measures: 10 pairs for each of LEB, X1 and the Gaussian
    rng = np.random.default_rng([seed, 1])
    worst_mixed = 0.0
    mixed_fails = []
    for k in range(30):
        n = 2 + (k % 2)
        K = random_symmetric_polytope(rng, n, pairs=n + 1 + int(rng.integers(0, 2)))
        L = random_symmetric_polytope(rng, n, pairs=n + 1)
        d = [named("LEB", n), named("X1", n), gaussian()][k % 3]
        surf = mixed_measure(K, L, d).value
        fd = mixed_measure_oracle(K, L, d, samples=MC_SAMPLES, seed=5000 + k)
        allowed = max(0.02 * abs(fd.value), 3.0 * fd.se)
        gap = abs(surf - fd.value)
        worst_mixed = max(worst_mixed, gap / allowed)
        if gap > allowed:
            mixed_fails.append({"pair": k, "density": d.label, "surface": surf, "oracle": fd.value, "se": fd.se})
    detail = {"measure_checks": count, "max_z": worst_z, "measure_failures": fails,
              "mixed_pairs": 30, "max_mixed_ratio": worst_mixed, "mixed_failures": mixed_fails}
    return not fails and not mixed_fails, detail


def _axis_problem(n: int, targets) -> MinkowskiProblem:
    e = np.eye(n)
    return MinkowskiProblem(named("X1", n), np.vstack([e, -e]), targets)


def _round_trip_bodies(count: int, seed: int):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = 2 + (len(out) % 2)
        P = random_symmetric_polytope(rng, n, pairs=int(rng.integers(n + 1, 9)))
        if not any(f.empty for f in P.faces):
            dname = "X1" if len(out) % 4 < 2 else "LEB"
            out.append((P, named(dname, n) if dname == "LEB" else abs_linear(rng.standard_normal(n))))
    return out


@_timed(3, "Minkowski solver: fixtures, 25 round trips, uniqueness", budget=180.0)
def criterion_3(seed: int = 3):
    sq = solve(_axis_problem(2, [2, 1, 2, 1]), seed=seed)
    sq2 = solve(_axis_problem(2, [4, 2, 4, 2]), seed=seed + 1)
    cu = solve(_axis_problem(3, [4, 2, 2, 4, 2, 2]), seed=seed + 2)
    fixture_res = max(sq.max_residual, sq2.max_residual, cu.max_residual)
    fixture_err = float(max(np.abs(sq.offsets - 1).max(), np.abs(sq2.offsets - math.sqrt(2)).max(), np.abs(cu.offsets - 1).max()))
    trips = [round_trip(P, d, seed=k) for k, (P, d) in enumerate(_round_trip_bodies(25, seed))]
    trip_res = max(t.solver.max_residual for t in trips)
    trip_err = max(t.error for t in trips)
    probes = [uniqueness_probe(_axis_problem(2, [2, 1, 2, 1]), seed=seed),
              uniqueness_probe(_axis_problem(3, [4, 2, 2, 4, 2, 2]), seed=seed)]
    dist = max(p.distance for p in probes)
    ok = fixture_res < 1e-6 and fixture_err < 1e-6 and trip_res < 1e-5 and trip_err < 1e-5 and dist < 1e-5
    return ok, {"fixture_residual": fixture_res, "fixture_offset_error": fixture_err, "round_trip_residual": trip_res,
                "round_trip_offset_error": trip_err, "uniqueness_distance": dist}


def _gaussian_pair(rng: np.random.Generator, n: int):
    """Random bodies of moderate Gaussian measure so that quantiles stay tame."""
    K = random_symmetric_polytope(rng, n, offset_range=(0.4, 1.6))
    L = random_symmetric_polytope(rng, n, offset_range=(0.4, 1.6))
    return K, L


@_timed(4, "first-inequality family on random pairs", budget=300.0)
def criterion_4(seed: int = 4):
    rng = np.random.default_rng(seed)
    min_slack = math.inf
    for dname in ("LEB", "X1"):
        for k in range(200):
            n = 2 + (k % 2)
            K = random_symmetric_polytope(rng, n)
            L = random_symmetric_polytope(rng, n)
            for rep in first_inequality_check(K, L, named(dname, n)):
                min_slack = min(min_slack, rep.slack)
    max_dilate = 0.0
    for k in range(20):
        n = 2 + (k % 2)
        K = random_symmetric_polytope(rng, n)
        for dname in ("LEB", "X1"):
            for rep in first_inequality_check(K, scale(K, float(rng.uniform(0.3, 3.0))), named(dname, n)):
                max_dilate = max(max_dilate, abs(rep.slack))
    transforms = {"log": FConcavity.log(), "ehrhard": FConcavity.ehrhard()}
    g_fail = []
    worst = {name: math.inf for name in (*transforms, "isoperimetric")}
    for k in range(50):
        n = 2 + (k % 2)
        K, L = _gaussian_pair(rng, n)
        for name, F in transforms.items():
            rep = f_concave_first_check(K, L, gaussian(), F, samples=MC_SAMPLES, seed=10 * k)
            worst[name] = min(worst[name], rep.slack + rep.tolerance)
            if not rep.passed:
                g_fail.append({"pair": k, "check": name, "slack": rep.slack, "tolerance": rep.tolerance})
        rep, _ = isoperimetric_check(K, L, samples=MC_SAMPLES, seed=10 * k + 5)
        worst["isoperimetric"] = min(worst["isoperimetric"], rep.slack + rep.tolerance)
        if not rep.passed:
            g_fail.append({"pair": k, "check": "isoperimetric", "slack": rep.slack, "tolerance": rep.tolerance})
    ok = min_slack >= -1e-9 and max_dilate <= 1e-8 and not g_fail
    return ok, {"min_slack": min_slack, "max_dilate_gap": max_dilate, "gaussian_failures": g_fail,
                "gaussian_min_margin": worst}


@_timed(5, "Shephard comparison on random (K, zonotope L) pairs", budget=300.0)
def criterion_5(seed: int = 5, trials: int = 100):
    rows = shephard_batch(trials, ("LEB", "X1"), (2, 3), seed=seed)
    dominated = [r for r in rows if r["delta"] >= 0]
    bad = [r["case"] for r in dominated if r["verdict"] != "theorem-consistent"]
    return len(dominated) == len(rows) and not bad, {
        "pairs": len(rows), "dominated": len(dominated), "falsifying": bad,
        "max_mu_excess": max(r["mu_K"] - r["mu_L"] for r in rows),
    }


@_timed(6, "stability with the explicit constant", budget=120.0)
def criterion_6(seed: int = 6, trials: int = 30):
    rows = []
    for dname in ("LEB", "X1"):
        for n in (2, 3):
            rows += stability_batch(trials, named(dname, n), n, seed=seed)
    bad = [r["case"] for r in rows if not r["passed"]]
    return not bad, {"pairs": len(rows), "failures": bad, "min_slack": min(r["slack"] for r in rows),
                     "min_eps": min(r["eps"] for r in rows)}


@_timed(7, "ball-indicator regression: dominance with reversed measures", budget=60.0)
def criterion_7(seed: int = 7):
    rep = ball_pair_regression(n=2, r=0.5, pairs=32, samples=MC_SAMPLES, seed=seed)
    return rep.passed, rep.to_dict()


@_timed(8, "implied concavity and perturbation continuity", budget=120.0)
def criterion_8(seed: int = 8):
    conc = {}
    for name, d, dim in [("X1/2", named("X1", 2), 2), ("X1/3", named("X1", 3), 3),
                         ("power_cone^0.5", power_cone([0, 0, 1], 0.5), 3),
                         ("power_cone^2", power_cone([1, 1, 0], 2.0), 3)]:
        rep = check_implied_concavity(d, samples=10**4, seed=seed, dim=dim)
        conc[name] = {"passed": rep.passed, "value": rep.value}
    tests = {"const": lambda u: np.ones(len(u)), "|u1|": lambda u: np.abs(u[:, 0]), "u1^2": lambda u: u[:, 0] ** 2}
    cont = {}
    grid = (0.04, 0.02, 0.01, 0.005)
    for name, P, d, *_ in _fixtures():
        # DIA2 has offsets 1/sqrt(2): the largest step would break eps <= 0.05 * min offset
        eps = [e for e in grid if e <= 0.05 * P.offsets.min()]
        for tname, a in tests.items():
            rep = perturbation_continuity_check(P, d, a, epsilons=eps, seed=seed)
            cont[f"{name}/{tname}"] = {"gaps": rep.gaps, "monotone": rep.monotone, "final": rep.final_gap}
    conc_ok = all(v["passed"] for v in conc.values())
    cont_ok = all(v["monotone"] and v["final"] < 1e-3 for v in cont.values())
    worst = max(v["final"] for v in cont.values())
    return conc_ok and cont_ok, {"concavity": conc, "continuity_ok": cont_ok, "max_final_gap": worst,
                                 "continuity": cont}


@_timed(9, "projection-function distance separates distinct bodies", budget=60.0)
def criterion_9(seed: int = 9):
    same = projection_distance(square(), square(), named("X1", 2), M=512, seed=seed).distance
    pairs = {
        "SQ2-DIA2/LEB": (square(), diamond(), named("LEB", 2)),
        "SQ2-DIA2/X1": (square(), diamond(), named("X1", 2)),
        "CU3-CR3/LEB": (cube(3), cross_polytope(3), named("LEB", 3)),
        "CU3-CR3/X1": (cube(3), cross_polytope(3), named("X1", 3)),
    }
    dist = {k: projection_distance(K, L, d, M=512, seed=seed).distance for k, (K, L, d) in pairs.items()}
    return same <= 1e-9 and all(v > 0 for v in dist.values()), {"self_distance": same, "pair_distances": dist}


RUNNERS = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
           criterion_6, criterion_7, criterion_8, criterion_9]


def run_all(only=None) -> list[Criterion]:
    return [r() for k, r in enumerate(RUNNERS, start=1) if only is None or k in only]
