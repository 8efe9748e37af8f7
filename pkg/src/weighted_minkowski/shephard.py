"""Comparison of bodies through their weighted projection functions.

If ``L`` is a projection body (for polytopes: a zonotope) and
``P_{mu,K} <= P_{mu,L}`` everywhere, then ``mu(K) <= mu(L)`` for densities
with positive homogeneity and concavity degrees. The harness samples the
hypothesis, certifies ``L`` and checks the conclusion; it also covers the
stability form with an explicit constant, verification of supplied
counterexample pairs, and a regression showing that the density
hypotheses cannot be dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .body import (
    SymmetricPolytope,
    ZonotopeCertificate,
    ball_polytope,
    is_zonotope,
    random_symmetric_polytope,
    random_zonotope,
    scale,
    zonotope_realize,
)
from .density import WeightedDensity, ball_indicator, named
from .errors import CheckFailed, DomainError, RejectedPair
from .integrate import body_measure, body_measure_cone
from .projection import P_mu, integrated_face_weights, sphere_directions

MEASURE_TOL = 1e-9
DOMINANCE_TOL = 1e-12


def unit_ball_volume(n: int) -> float:
    """``nu_n = pi^(n/2) / Gamma(n/2 + 1)``."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def critical_directions(K: SymmetricPolytope, L: SymmetricPolytope) -> np.ndarray:
    """Directions where a planar projection function can have a kink.

    In the plane ``P(theta)`` is piecewise linear in ``theta`` with breaks
    where ``theta`` is orthogonal to a facet normal, so the extremes of a
    difference of two such functions sit at these rotated normals.
    Higher dimensions have no finite critical set; an empty array is returned.
    """
    if K.n != 2:
        return np.empty((0, K.n))
    u = np.vstack([K.normals, L.normals])
    return np.column_stack([-u[:, 1], u[:, 0]])


@dataclass
class Dominance:
    delta: float
    argmin: np.ndarray
    directions: int

    def to_dict(self) -> dict:
        return {"delta": self.delta, "argmin": self.argmin.tolist(), "directions": self.directions}


def dominance(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, M: int = 256, seed: int = 0,
              extra: Optional[np.ndarray] = None) -> Dominance:
    """Sampled margin ``delta = min_theta (P_{mu,L}(theta) - P_{mu,K}(theta))``.

    Directions: ``M`` deterministic points, the coordinate axes and
    diagonals, the planar critical directions and any ``extra`` rows.
    """
    if not d.even:
        raise DomainError("dominance needs an even density")
    dirs = [sphere_directions(K.n, M, seed), critical_directions(K, L)]
    if extra is not None:
        e = np.atleast_2d(np.asarray(extra, dtype=float))
        dirs.append(e / np.linalg.norm(e, axis=1, keepdims=True))
    dirs = np.vstack(dirs)
    margin = P_mu(L, d, dirs, integrated_face_weights(L, d)) - P_mu(K, d, dirs, integrated_face_weights(K, d))
    j = int(np.argmin(margin))
    return Dominance(float(margin[j]), dirs[j], len(dirs))


def _require_degrees(d: WeightedDensity) -> float:
    r = d.require_homogeneous()
    if r < 0 or d.p is None or d.p <= 0:
        raise DomainError(f"density {d.label} lacks positive concavity/homogeneity degrees")
    if not d.even:
        raise DomainError("comparison needs an even density")
    return r


@dataclass
class ComparisonReport:
    K: SymmetricPolytope
    L: SymmetricPolytope
    density: str
    directions: int
    delta: float
    argmin: np.ndarray
    certificate: ZonotopeCertificate
    mu_K: float
    mu_L: float
    verdict: str

    @property
    def hypotheses_met(self) -> bool:
        return self.certificate.is_zonotope and self.delta >= -DOMINANCE_TOL

    @property
    def passed(self) -> bool:
        return self.verdict != "violated"

    def require(self) -> "ComparisonReport":
        if not self.passed:
            raise CheckFailed(f"mu(K) = {self.mu_K:.12g} exceeds mu(L) = {self.mu_L:.12g} under the hypotheses")
        return self

    def to_dict(self) -> dict:
        return {
            "density": self.density, "directions": self.directions, "delta": self.delta,
            "argmin": self.argmin.tolist(), "L_is_zonotope": self.certificate.is_zonotope,
            "mu_K": self.mu_K, "mu_L": self.mu_L, "verdict": self.verdict,
        }


def shephard_verify(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, M: int = 256,
                    seed: int = 0) -> ComparisonReport:
    """Check ``mu(K) <= mu(L) + 1e-9`` whenever ``L`` is a zonotope and ``delta >= 0``.

    The verdict is ``"theorem-consistent"``, ``"violated"`` or
    ``"hypotheses not met"`` (no assertion is made in that case).
    """
    _require_degrees(d)
    dom = dominance(K, L, d, M, seed)
    cert = is_zonotope(L)
    mk, ml = body_measure_cone(K, d), body_measure_cone(L, d)
    rep = ComparisonReport(K, L, d.label, dom.directions, dom.delta, dom.argmin, cert, mk, ml, "")
    if not rep.hypotheses_met:
        rep.verdict = "hypotheses not met"
    elif mk <= ml + MEASURE_TOL * max(1.0, ml):
        rep.verdict = "theorem-consistent"
    else:
        rep.verdict = "violated"
    return rep


def counterexample_verify(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, M: int = 256,
                          seed: int = 0) -> ComparisonReport:
    """Certify a supplied pair with ``P_K <= P_L`` but ``mu(K) > mu(L)``.

    Raises
    ------
    RejectedPair
        Naming the first clause that fails: ``L`` must not be a zonotope,
        the sampled margin must be nonnegative, and ``mu(K) > mu(L)``.
    """
    _require_degrees(d)
    cert = is_zonotope(L)
    if cert.is_zonotope:
        raise RejectedPair("L is a zonotope (a projection body); the comparison theorem applies")
    dom = dominance(K, L, d, M, seed)
    if dom.delta < -DOMINANCE_TOL:
        raise RejectedPair(f"projection dominance fails: delta = {dom.delta:.3e} at {dom.argmin.tolist()}")
    mk, ml = body_measure_cone(K, d), body_measure_cone(L, d)
    if not mk > ml:
        raise RejectedPair(f"mu(K) = {mk:.12g} does not exceed mu(L) = {ml:.12g}")
    return ComparisonReport(K, L, d.label, dom.directions, dom.delta, dom.argmin, cert, mk, ml, "certified")


@dataclass
class StabilityConstant:
    R: float
    nu_n: float
    nu_n1: float
    q: float
    C: float

    @classmethod
    def of(cls, L: SymmetricPolytope, d: WeightedDensity) -> "StabilityConstant":
        r = d.require_homogeneous()
        n = L.n
        q = 1.0 / (n + r)
        R = L.circumradius
        nu_n, nu_n1 = unit_ball_volume(n), unit_ball_volume(n - 1)
        C = nu_n / nu_n1 * R * body_measure_cone(L, d) ** (-q)
        out = cls(R, nu_n, nu_n1, q, C)
        if not all(math.isfinite(v) and v > 0 for v in (R, nu_n, nu_n1, q, C)):
            raise DomainError(f"degenerate stability constant {out}")
        return out


@dataclass
class StabilityReport:
    eps: float
    lhs: float
    rhs: float
    constant: StabilityConstant
    delta: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack >= -MEASURE_TOL

    def require(self) -> "StabilityReport":
        if not self.passed:
            raise CheckFailed(f"stability inequality fails by {-self.slack:.3e}")
        return self

    def to_dict(self) -> dict:
        return {"eps": self.eps, "delta": self.delta, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "C": self.constant.C, "R": self.constant.R, "q": self.constant.q, "passed": self.passed}


def stability_check(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, eps: Optional[float] = None,
                    M: int = 256, seed: int = 0) -> StabilityReport:
    """``mu(K)^(1-q) <= mu(L)^(1-q) + C(L, mu) eps``, with ``eps = max(0, -delta)`` by default."""
    _require_degrees(d)
    if not is_zonotope(L).is_zonotope:
        raise DomainError("stability check needs a zonotope L")
    dom = dominance(K, L, d, M, seed)
    if eps is None:
        eps = max(0.0, -dom.delta)
    c = StabilityConstant.of(L, d)
    lhs = body_measure_cone(K, d) ** (1.0 - c.q)
    rhs = body_measure_cone(L, d) ** (1.0 - c.q) + c.C * eps
    return StabilityReport(float(eps), lhs, rhs, c, dom.delta)


@dataclass
class SeparationReport:
    eps: float
    ratio: Optional[float]
    applicable: bool

    def to_dict(self) -> dict:
        return {"eps": self.eps, "ratio": self.ratio, "applicable": self.applicable}


def separation_report(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, M: int = 256,
                      seed: int = 0) -> SeparationReport:
    """Empirical ``(mu(L)^(1-q) - mu(K)^(1-q)) / eps`` for a strict margin ``eps = delta > 0``.

    This is a sample of a lower bound for the separation constant; no
    pass/fail is attached.
    """
    r = _require_degrees(d)
    if not is_zonotope(L).is_zonotope:
        raise DomainError("separation report needs a zonotope L")
    dom = dominance(K, L, d, M, seed)
    if dom.delta <= 0:
        return SeparationReport(dom.delta, None, False)
    q = 1.0 / (K.n + r)
    gap = body_measure_cone(L, d) ** (1.0 - q) - body_measure_cone(K, d) ** (1.0 - q)
    return SeparationReport(dom.delta, gap / dom.delta, True)


# -- necessity of the density hypotheses -----------------------------------------------

def ball_projection_closed_form(n: int, s: float) -> float:
    """``P_{mu, sB}`` for ``mu`` the restriction of Lebesgue measure to the unit ball.

    ``nu_{n-1} s^(n-1)`` for ``s <= 1`` and ``nu_{n-1} / s`` for ``s >= 1``;
    constant in ``theta``.
    """
    nu = unit_ball_volume(n - 1)
    return nu * s ** (n - 1) if s <= 1.0 else nu / s


@dataclass
class BallRegressionReport:
    r: float
    R: float
    facets: int
    max_excess: float
    approx_error: float
    mu_K: float
    mu_K_se: float
    mu_L: float
    mu_L_se: float

    @property
    def dominance_holds(self) -> bool:
        return self.max_excess <= 3.0 * self.approx_error

    @property
    def reversed_measures(self) -> bool:
        return self.mu_K - self.mu_L >= 3.0 * math.hypot(self.mu_K_se, self.mu_L_se)

    @property
    def passed(self) -> bool:
        return self.dominance_holds and self.reversed_measures

    def to_dict(self) -> dict:
        return {"r": self.r, "R": self.R, "facets": self.facets, "max_excess": self.max_excess,
                "approx_error": self.approx_error, "mu_K": self.mu_K, "mu_K_se": self.mu_K_se,
                "mu_L": self.mu_L, "mu_L_se": self.mu_L_se, "dominance_holds": self.dominance_holds,
                "reversed_measures": self.reversed_measures, "passed": self.passed}


def ball_pair_regression(n: int = 2, r: float = 0.5, R: Optional[float] = None, pairs: int = 32,
                         M: int = 256, samples: int = 10**6, seed: int = 0) -> BallRegressionReport:
    """Without homogeneity the comparison fails: a larger body, smaller projections.

    With ``mu`` the unit-ball indicator, ``L = r Q`` and ``K = R Q`` for a
    polytope ``Q`` circumscribed about the unit ball. Dominance
    ``P_K <= P_L`` is checked against three times the discretization error
    (measured against the smooth-ball closed form) while ``mu(K) >= mu(L)``.
    """
    if R is None:
        R = r ** (-1.0 / (n - 1))
    if not (r <= 1.0 <= R and R >= r ** (-1.0 / (n - 1)) - 1e-12):
        raise DomainError("need r <= 1 <= R and R >= r^(-1/(n-1))")
    d = ball_indicator(1.0)
    Q = ball_polytope(n, pairs)
    K, L = scale(Q, R), scale(Q, r)
    dirs = sphere_directions(n, M, seed)
    pk = P_mu(K, d, dirs, integrated_face_weights(K, d))
    pl = P_mu(L, d, dirs, integrated_face_weights(L, d))
    err = max(float(np.abs(pk - ball_projection_closed_form(n, R)).max()),
              float(np.abs(pl - ball_projection_closed_form(n, r)).max()))
    mk, sk = body_measure(K, d, samples, seed)
    ml, sl = body_measure(L, d, samples, seed + 1)
    return BallRegressionReport(r, R, Q.N, float((pk - pl).max()), err, float(mk), float(sk), float(ml), float(sl))


# -- randomized sweeps ----------------------------------------------------------------

def random_dominated_pair(rng: np.random.Generator, n: int, d: WeightedDensity, M: int = 256, seed: int = 0):
    """A random ``K`` shrunk until its sampled projection function lies below a random zonotope's.

    Half of the bodies ``K`` are generic polytopes, half zonotopes; the shrink
    factor leaves a random margin, sometimes none at all.
    """
    r = d.require_homogeneous()
    L = zonotope_realize(random_zonotope(rng, n))
    K = random_symmetric_polytope(rng, n) if rng.random() < 0.5 else zonotope_realize(random_zonotope(rng, n))
    dirs = np.vstack([sphere_directions(n, M, seed), critical_directions(K, L)])
    ratio = float(np.min(P_mu(L, d, dirs) / P_mu(K, d, dirs)))
    shrink = 1.0 - 1e-9 if rng.random() < 0.3 else rng.uniform(0.8, 1.0 - 1e-6)
    t = (ratio * shrink) ** (1.0 / (n + r - 1.0))
    return scale(K, t), L


def shephard_batch(trials: int, densities: Sequence[str] = ("LEB", "X1"), dims: Sequence[int] = (2, 3),
                   M: int = 256, seed: int = 0) -> list[dict]:
    """Run ``shephard_verify`` on ``trials`` random pairs per (density shorthand, dimension)."""
    rows = []
    for di, name in enumerate(densities):
        for n in dims:
            d = named(name, n)
            rng = np.random.default_rng([seed, di, n])
            for k in range(trials):
                K, L = random_dominated_pair(rng, n, d, M, seed)
                rep = shephard_verify(K, L, d, M, seed)
                rows.append({"case": f"{name}/n{n}/{k:03d}", "n": n, **rep.to_dict()})
    return sorted(rows, key=lambda row: row["case"])


def stability_batch(trials: int, d: WeightedDensity, n: int = 2, M: int = 256, seed: int = 0) -> list[dict]:
    """Perturbed pairs: ``K`` is a zonotope ``L`` with enlarged, jittered offsets so that ``eps > 0``."""
    rng = np.random.default_rng([seed, n])
    rows = []
    for k in range(trials):
        L = zonotope_realize(random_zonotope(rng, n))
        jitter = np.exp(rng.uniform(-0.05, 0.1, len(L.pair_representatives())))
        off = L.offsets.copy()
        reps = L.pair_representatives()
        off[reps] *= jitter
        off[L.antipode[reps]] = off[reps]
        K = L.with_offsets(off)
        rep = stability_check(K, L, d, M=M, seed=seed)
        rows.append({"case": f"{d.label}/n{n}/{k:03d}", **rep.to_dict()})
    return rows
