"""Weighted surface area measures of polytopes as atomic spherical measures."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .body import SymmetricPolytope, scale
from .density import WeightedDensity
from .integrate import DEFAULT_SPEC, QuadratureSpec, face_measures


@dataclass(frozen=True, eq=False)
class SphericalAtomicMeasure:
    """Atoms ``(u_i, w_i)``; zero-weight atoms are kept on purpose."""

    directions: np.ndarray
    weights: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def barycenter(self) -> np.ndarray:
        return self.weights @ self.directions

    def integrate(self, a: Callable[[np.ndarray], np.ndarray]) -> float:
        """``∫ a(u) dsigma(u)`` for a vectorized test function ``a``."""
        return float(np.dot(np.asarray(a(self.directions), dtype=float), self.weights))

    def scaled(self, factor: float) -> "SphericalAtomicMeasure":
        return SphericalAtomicMeasure(self.directions, self.weights * factor, dict(self.provenance))

    def to_dict(self) -> dict:
        return {
            "atoms": [{"u": u.tolist(), "weight": float(w)} for u, w in zip(self.directions, self.weights)],
            "provenance": self.provenance,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.directions.shape[1]
        w.writerow([f"u{k + 1}" for k in range(n)] + ["weight"])
        for u, wt in zip(self.directions, self.weights):
            w.writerow([repr(float(c)) for c in u] + [repr(float(wt))])
        return buf.getvalue()


def sigma(P: SymmetricPolytope, d: WeightedDensity, spec: QuadratureSpec = DEFAULT_SPEC) -> SphericalAtomicMeasure:
    """One atom per facet normal, weighted by ``mu_{n-1}(F_i)``."""
    return SphericalAtomicMeasure(
        P.normals.copy(), face_measures(P, d, spec), {"density": d.label, "scale": 1.0, "n": P.n},
    )


def sigma_scaled(P: SymmetricPolytope, d: WeightedDensity, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SphericalAtomicMeasure:
    """``sigma(tP, d)`` from ``sigma(P, d)`` by the factor ``t**(n + r - 1)``."""
    r = d.require_homogeneous()
    out = sigma(P, d, spec).scaled(t ** (P.n + r - 1.0))
    out.provenance["scale"] = t
    return out


def cosine_transform(s: SphericalAtomicMeasure, theta) -> np.ndarray | float:
    """``Σ_i |<theta, u_i>| w_i`` at one direction or at each row of ``theta``."""
    th = np.asarray(theta, dtype=float)
    vals = np.abs(np.atleast_2d(th) @ s.directions.T) @ s.weights
    return float(vals[0]) if th.ndim == 1 else vals


@dataclass
class ContinuityReport:
    epsilons: list
    gaps: list
    monotone: bool

    @property
    def final_gap(self) -> float:
        return self.gaps[-1]


def perturbation_continuity_check(
    P: SymmetricPolytope,
    d: WeightedDensity,
    test_function: Callable[[np.ndarray], np.ndarray],
    epsilons: Sequence[float] = (0.04, 0.02, 0.01, 0.005),
    seed: int = 0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> ContinuityReport:
    """Gap ``|∫a dsigma_P - ∫a dsigma_{P_eps}|`` as offsets are perturbed by ``eps``.

    One noise pattern in [-1, 1] per antipodal pair is drawn from ``seed``
    and scaled by each ``eps``, so the perturbed bodies stay symmetric and
    shrink towards P along a fixed direction.
    """
    eps_list = list(epsilons)
    min_off = float(P.offsets.min())
    if max(eps_list, default=0.0) > 0.05 * min_off:
        raise ValueError("eps must not exceed 0.05 * min offset")
    rng = np.random.default_rng(seed)
    noise = np.zeros(P.N)
    reps = P.pair_representatives()
    pair_noise = rng.uniform(-1.0, 1.0, len(reps))
    noise[reps] = pair_noise
    noise[P.antipode[reps]] = pair_noise
    base = sigma(P, d, spec).integrate(test_function)
    gaps = []
    for eps in eps_list:
        if eps == 0:
            gaps.append(0.0)
            continue
        Q = P.with_offsets(P.offsets + eps * noise)
        gaps.append(abs(sigma(Q, d, spec).integrate(test_function) - base))
    order = np.argsort(eps_list)[::-1]
    g = np.asarray(gaps)[order]
    monotone = bool(np.all(np.diff(g) <= 1e-12))
    return ContinuityReport(eps_list, gaps, monotone)
