"""Mixed measures ``mu_1(K, L)`` and the first-inequality family built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .body import SymmetricPolytope, minkowski_sum, scale, support_function
from .density import WeightedDensity
from .errors import CheckFailed, DimensionTooLarge
from .integrate import (
    DEFAULT_SPEC,
    QuadratureSpec,
    _chunk_rng,
    body_measure,
    body_measure_cone,
    face_measures,
    gaussian_cdf,
    gaussian_quantile,
    mc_linear_estimates,
    normal_pdf,
)

ORACLE_EPS = (0.04, 0.02, 0.01)


@dataclass
class MixedMeasureResult:
    value: float
    route: str
    v_mu1: Optional[float] = None
    se: float = 0.0


def mixed_measure(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> MixedMeasureResult:
    """``mu_1(K, L) = Σ_i h_L(u_i) mu_{n-1}(F_i(K))`` (surface-integral route)."""
    w = face_measures(K, d, spec)
    value = float(np.dot(support_function(L, K.normals), w))
    v = value / (K.n + d.r) if d.homogeneous else None
    return MixedMeasureResult(value, "surface-integral", v)


def richardson(diffs: Sequence[float]) -> float:
    """Extrapolate difference quotients taken at ``h, h/2, h/4`` to ``h -> 0``."""
    d_h, d_h2, d_h4 = diffs
    return (8.0 * d_h4 - 6.0 * d_h2 + d_h) / 3.0


def mixed_measure_oracle(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity,
                         eps: Sequence[float] = ORACLE_EPS, samples: int = 10**6, seed: int = 0) -> MixedMeasureResult:
    """Finite-difference route: ``(mu(K + eps L) - mu(K)) / eps`` with Richardson extrapolation.

    ``eps`` must be a halving sequence ``h, h/2, h/4``. Homogeneous densities
    use the cone formula; others use Monte Carlo with common random
    numbers, so the reported ``se`` covers the whole extrapolated quotient.
    """
    if K.n > 3:
        raise DimensionTooLarge("finite-difference oracle needs n <= 3")
    h = list(eps)
    if len(h) != 3 or not np.allclose([h[1] / h[0], h[2] / h[1]], 0.5):
        raise ValueError("eps grid must be h, h/2, h/4")
    sums = [minkowski_sum(K, scale(L, e)) for e in h]
    if d.homogeneous:
        base = body_measure_cone(K, d)
        diffs = [(body_measure_cone(S, d) - base) / e for S, e in zip(sums, h)]
        return MixedMeasureResult(richardson(diffs), "finite-difference-oracle", None, 0.0)
    coef = np.array([1.0 / (3 * h[0]), -6.0 / (3 * h[1]), 8.0 / (3 * h[2])])
    weights = np.concatenate([[-coef.sum()], coef])[None, :]
    est = mc_linear_estimates([K, *sums], d, weights, samples, seed)[0]
    return MixedMeasureResult(est.estimate, "finite-difference-oracle", None, est.se)


# -- F-concavity ------------------------------------------------------------------

@dataclass(frozen=True)
class FConcavity:
    """Monotone transform ``F`` under which the measure is concave."""

    name: str
    F: Callable[[float], float]
    dF: Callable[[float], float]
    inverse: Callable[[float], float]

    @classmethod
    def power(cls, q: float) -> "FConcavity":
        return cls(f"power({q:g})", lambda t: t**q, lambda t: q * t ** (q - 1.0), lambda y: y ** (1.0 / q))

    @classmethod
    def log(cls) -> "FConcavity":
        return cls("log", math.log, lambda t: 1.0 / t, math.exp)

    @classmethod
    def ehrhard(cls) -> "FConcavity":
        # d/da psi^{-1}(a) = 1 / psi'(psi^{-1}(a)) = sqrt(2 pi) exp(psi^{-1}(a)^2 / 2)
        return cls(
            "ehrhard", gaussian_quantile,
            lambda t: 1.0 / float(normal_pdf(gaussian_quantile(t))),
            gaussian_cdf,
        )


@dataclass
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    tolerance: float
    se: float = 0.0
    detail: dict = None

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tolerance

    def require(self) -> "InequalityReport":
        if not self.passed:
            raise CheckFailed(f"{self.name}: slack {self.slack:.3e} below -{self.tolerance:.1e}")
        return self

    def to_dict(self) -> dict:
        return {"check": self.name, "lhs": self.lhs, "rhs": self.rhs, "slack": self.slack,
                "se": self.se, "tolerance": self.tolerance, "passed": self.passed, **(self.detail or {})}


def first_inequality_check(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity,
                           tol: float = 1e-9) -> tuple[InequalityReport, InequalityReport]:
    """``mu_1(K,L) >= (1/q) mu(K)^(1-q) mu(L)^q`` and its ``V_{mu,1}`` form.

    The tolerance is scaled by ``max(1, rhs)``.
    """
    r = d.require_homogeneous()
    q = 1.0 / (K.n + r)
    mu1 = mixed_measure(K, L, d).value
    mk, ml = body_measure_cone(K, d), body_measure_cone(L, d)
    core = mk ** (1.0 - q) * ml**q
    first = InequalityReport("mixed-first", mu1, core / q, tol * max(1.0, core / q), detail={"q": q})
    second = InequalityReport("v-first", q * mu1, core, tol * max(1.0, core), detail={"q": q})
    return first, second


def _propagate(func, values, ses, rel_step: float = 1e-6) -> float:
    """Delta-method standard error of ``func(*values)`` for independent inputs."""
    var = 0.0
    for k, (v, s) in enumerate(zip(values, ses)):
        if s == 0:
            continue
        h = rel_step * max(abs(v), 1e-12)
        up = list(values)
        dn = list(values)
        up[k] += h
        dn[k] -= h
        grad = (func(*up) - func(*dn)) / (2 * h)
        var += (grad * s) ** 2
    return math.sqrt(var)


def f_concave_first_check(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity, F: FConcavity,
                          samples: int = 10**6, seed: int = 0, k_se: float = 3.0) -> InequalityReport:
    """``mu_1(K,L) >= mu_1(K,K) + (F(mu(L)) - F(mu(K))) / F'(mu(K))``.

    Mixed measures come from exact face quadrature; non-homogeneous body
    measures from Monte Carlo with independent seeds, whose error is
    propagated into the tolerance ``k_se * se``.
    """
    mu1_kl = mixed_measure(K, L, d).value
    mu1_kk = mixed_measure(K, K, d).value
    mk, sk = body_measure(K, d, samples, seed)
    ml, sl = body_measure(L, d, samples, seed + 1)

    def slack(a, b):
        return mu1_kl - mu1_kk - (F.F(b) - F.F(a)) / F.dF(a)

    se = _propagate(slack, [mk, ml], [sk, sl])
    rhs = mu1_kk + (F.F(ml) - F.F(mk)) / F.dF(mk)
    return InequalityReport(
        f"f-concave[{F.name}]", mu1_kl, rhs, k_se * se + 1e-9 * max(1.0, abs(rhs)), se,
        {"mu_K": mk, "mu_L": ml, "mu1_KK": mu1_kk},
    )


def gauge(L: SymmetricPolytope, x: np.ndarray) -> np.ndarray:
    """Minkowski functional ``||x||_L = max_i <x, u_i> / alpha_i``."""
    return np.max(x @ (L.normals / L.offsets[:, None]).T, axis=1)


def isoperimetric_check(K: SymmetricPolytope, L: SymmetricPolytope, samples: int = 10**6, seed: int = 0,
                        match_tol: float = 1e-4, k_se: float = 3.0):
    """Gaussian isoperimetric-type check ``gamma_1(K, sL) >= gamma_1(K, K)``.

    ``s`` is chosen so that the Monte Carlo estimates of ``gamma(sL)`` and
    ``gamma(K)`` agree on a shared sample (to within ``match_tol``). The
    tolerance is ``k_se`` times the standard error of the measure mismatch.
    Returns ``(report, rescaled L)``.
    """
    from .density import gaussian

    g = gaussian()
    x = np.concatenate([
        _chunk_rng(seed, k).standard_normal((min(1 << 17, samples - k * (1 << 17)), K.n))
        for k in range((samples + (1 << 17) - 1) >> 17)
    ])
    in_k = K.contains(x)
    target = int(in_k.sum())
    rho = np.sort(gauge(L, x))
    lo = rho[target - 1] if target > 0 else 0.0
    hi = rho[target] if target < len(rho) else rho[-1] * 1.01
    s = 0.5 * (lo + hi)
    sL = scale(L, s)
    in_l = gauge(L, x) <= s
    mismatch = abs(in_l.mean() - in_k.mean())
    if mismatch >= match_tol:
        raise CheckFailed(f"could not match Gaussian measures ({mismatch:.2e})")
    diff = in_l.astype(float) - in_k.astype(float)
    se = float(diff.std(ddof=1) / math.sqrt(len(diff)))
    lhs = mixed_measure(K, sL, g).value
    rhs = mixed_measure(K, K, g).value
    rep = InequalityReport("isoperimetric", lhs, rhs, k_se * se + 1e-12, se,
                           {"scale": s, "gamma_K": float(in_k.mean()), "gamma_L": float(in_l.mean())})
    return rep, sL
