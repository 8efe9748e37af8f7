"""Weighted projection functions ``p_{mu,K}(theta, t)`` and ``P_{mu,K}(theta)``.

For a homogeneous density of degree ``r`` the t-integral is closed form,
``P = p(theta, 1) / (n + r)``. Otherwise the face weights
``W_i = ∫_0^1 mu_{n-1}(t F_i) dt`` are integrated by adaptive Simpson
quadrature, once per body, and reused for every direction.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .body import SymmetricPolytope, fibonacci_sphere, orthonormal_complement, random_rotation, scale
from .density import WeightedDensity, evaluate
from .errors import CheckFailed
from .integrate import DEFAULT_SPEC, QuadratureSpec, _chunk_rng, face_measure, face_measures
from .surface import cosine_transform, sigma

T_TOL = 1e-8
MAX_PANELS = 1 << 14


def _as_directions(theta) -> tuple[np.ndarray, bool]:
    th = np.asarray(theta, dtype=float)
    return np.atleast_2d(th), th.ndim == 1


def symmetry_directions(n: int) -> np.ndarray:
    """Coordinate axes and all ±1 diagonals (normalized), up to sign."""
    out = list(np.eye(n))
    for k in range(2, n + 1):
        for idx in itertools.combinations(range(n), k):
            for signs in itertools.product((1.0, -1.0), repeat=k - 1):
                v = np.zeros(n)
                v[list(idx)] = (1.0, *signs)
                out.append(v / np.linalg.norm(v))
    return np.array(out)


def sphere_directions(n: int, M: int, seed: int = 0, include_symmetry: bool = True) -> np.ndarray:
    """Deterministic direction set: ``M`` low-discrepancy points plus symmetry axes.

    The plane uses equally spaced angles with a seeded phase; R^3 a
    seeded rotation of a Fibonacci spiral; R^4 seeded Gaussian points.
    """
    rng = np.random.default_rng(seed)
    if n == 2:
        ang = 2.0 * np.pi * (np.arange(M) + rng.random()) / M
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
    elif n == 3:
        pts = fibonacci_sphere(M, 3) @ random_rotation(rng, 3).T
    else:
        pts = rng.standard_normal((M, n))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    if include_symmetry:
        sym = symmetry_directions(n)
        pts = np.vstack([pts, sym, -sym])
    return pts


# -- adaptive Simpson on [a, b] for vector-valued integrands ------------------------

def adaptive_simpson(f, a: float, b: float, tol: float = T_TOL, max_panels: int = MAX_PANELS,
                     breakpoints=()) -> tuple[np.ndarray, float, int]:
    """Composite adaptive Simpson for a vector-valued ``f``.

    Returns ``(integral, error estimate, panels used)``. Breakpoints split
    the interval at known kinks first.
    """
    knots = sorted({a, b, *[x for x in breakpoints if a < x < b]})
    total = None
    err = 0.0
    panels = 0
    length = b - a
    stack = []
    for lo, hi in zip(knots[:-1], knots[1:]):
        mid = 0.5 * (lo + hi)
        flo, fmid, fhi = f(lo), f(mid), f(hi)
        stack.append((lo, hi, flo, fmid, fhi))
    while stack:
        lo, hi, flo, fmid, fhi = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = f(0.5 * (lo + mid)), f(0.5 * (mid + hi))
        whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi)
        left = (mid - lo) / 6.0 * (flo + 4 * fl + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * fr + fhi)
        e = float(np.max(np.abs(left + right - whole))) / 15.0
        local_tol = tol * (hi - lo) / length
        if e <= local_tol or panels + len(stack) >= max_panels or hi - lo < 1e-12:
            piece = left + right + (left + right - whole) / 15.0
            total = piece if total is None else total + piece
            err += e
            panels += 2
        else:
            stack.append((lo, mid, flo, fl, fmid))
            stack.append((mid, hi, fmid, fr, fhi))
    return total, err, panels


def _t_breakpoints(K: SymmetricPolytope, d: WeightedDensity) -> list:
    if d.kind != "ball_indicator":
        return []
    R = d.radius
    pts = [R / a for a in K.offsets]
    pts += [R / r for r in np.linalg.norm(K.vertices, axis=1) if r > 0]
    return [t for t in pts if 0.0 < t < 1.0]


@dataclass
class IntegratedWeights:
    weights: np.ndarray
    error: float
    panels: int


def integrated_face_weights(K: SymmetricPolytope, d: WeightedDensity, tol: float = T_TOL,
                            spec: QuadratureSpec = DEFAULT_SPEC) -> IntegratedWeights:
    """``W_i = ∫_0^1 mu_{n-1}(t F_i) dt`` for every face."""
    if d.homogeneous:
        return IntegratedWeights(face_measures(K, d, spec) / (K.n + d.r), 0.0, 0)

    def f(t):
        if t <= 0.0:
            return np.zeros(K.N)
        return face_measures(scale(K, t), d, spec)

    W, err, panels = adaptive_simpson(f, 0.0, 1.0, tol, MAX_PANELS, _t_breakpoints(K, d))
    return IntegratedWeights(W, err, panels)


def p_mu(K: SymmetricPolytope, d: WeightedDensity, theta, t: float = 1.0,
         spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray | float:
    """``p_{mu,K}(theta, t) = (n/2) ∫ |<theta, u>| dsigma_{mu, tK}(u)``."""
    if not 0.0 < t <= 1.0:
        raise ValueError("t must lie in (0, 1]")
    th, single = _as_directions(theta)
    if d.homogeneous:
        s = sigma(K, d, spec).scaled(t ** (K.n + d.r - 1.0))
    else:
        s = sigma(scale(K, t), d, spec)
    vals = 0.5 * K.n * cosine_transform(s, th)
    return float(vals[0]) if single else vals


def P_mu(K: SymmetricPolytope, d: WeightedDensity, theta, weights: Optional[IntegratedWeights] = None,
         spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray | float:
    """``P_{mu,K}(theta) = ∫_0^1 p_{mu,K}(theta, t) dt``."""
    th, single = _as_directions(theta)
    W = weights or integrated_face_weights(K, d, spec=spec)
    vals = 0.5 * K.n * (np.abs(th @ K.normals.T) @ W.weights)
    return float(vals[0]) if single else vals


@dataclass
class ProjectionProfile:
    body: str
    density: str
    directions: np.ndarray
    values: np.ndarray
    t_grid: Optional[np.ndarray] = None
    t_values: Optional[np.ndarray] = field(default=None, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.directions.shape[1]
        head = [f"theta{k + 1}" for k in range(n)] + ["P"]
        if self.t_grid is not None:
            head += [f"p(t={t:g})" for t in self.t_grid]
        w.writerow(head)
        for j, (th, v) in enumerate(zip(self.directions, self.values)):
            row = [repr(float(c)) for c in th] + [repr(float(v))]
            if self.t_grid is not None:
                row += [repr(float(x)) for x in self.t_values[j]]
            w.writerow(row)
        return buf.getvalue()


def projection_profile(K: SymmetricPolytope, d: WeightedDensity, M: int = 256, seed: int = 0,
                       t_grid=None, body_id: str = "K") -> ProjectionProfile:
    dirs = sphere_directions(K.n, M, seed)
    vals = P_mu(K, d, dirs)
    tg = tv = None
    if t_grid is not None:
        tg = np.asarray(t_grid, dtype=float)
        tv = np.column_stack([p_mu(K, d, dirs, t) for t in tg])
    return ProjectionProfile(body_id, d.label, dirs, vals, tg, tv)


def lebesgue_projection_volume(K: SymmetricPolytope, theta) -> float:
    """``|K | theta^perp|_{n-1}`` by projecting vertices and measuring their hull."""
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)
    y = K.vertices @ orthonormal_complement(theta)
    if y.shape[1] == 1:
        return float(np.ptp(y[:, 0]))
    return float(ConvexHull(y).volume)


@dataclass
class MarginalReport:
    estimate: float
    se: float
    expected: float
    samples: int

    @property
    def passed(self) -> bool:
        return abs(self.estimate - self.expected) <= 3.0 * self.se


def marginal_check(K: SymmetricPolytope, d: WeightedDensity, theta, t: float = 1.0,
                   samples: int = 10**6, seed: int = 0) -> MarginalReport:
    """Monte Carlo of the projected boundary weight of ``tK`` against ``p_mu``.

    Boundary points are drawn face-by-face in proportion to area, weighted
    by ``g``, and projected along ``theta``; the marginal mass is
    ``∫_{∂tK} g |<theta, nu>|``. It is multiplied by ``n/2`` before being
    compared with ``p_mu``, which equals it exactly in the plane.
    """
    if not d.even:
        raise ValueError("marginal check needs an even density")
    if K.n > 3:
        raise ValueError("marginal check supports n <= 3")
    theta = np.asarray(theta, dtype=float)
    theta = theta / np.linalg.norm(theta)
    tK = scale(K, t)
    simp = [(i, s) for i, F in enumerate(tK.faces) for s in F.simplices]
    idx = np.array([i for i, _ in simp])
    S = np.array([s for _, s in simp])
    from .body import simplex_volumes

    vol = simplex_volumes(S)
    area = vol.sum()
    prob = vol / area
    cos = np.abs(tK.normals[idx] @ theta)
    m = S.shape[1] - 1
    total = total_sq = 0.0
    done = 0
    k = 0
    while done < samples:
        size = min(1 << 17, samples - done)
        rng = _chunk_rng(seed, k)
        pick = rng.choice(len(S), size=size, p=prob)
        bary = rng.dirichlet(np.ones(m + 1), size=size)
        pts = np.einsum("sk,skn->sn", bary, S[pick])
        f = area * evaluate(d, pts) * cos[pick] * (K.n / 2.0)
        total += f.sum()
        total_sq += np.dot(f, f)
        done += size
        k += 1
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    return MarginalReport(mean, math.sqrt(var / samples), p_mu(K, d, theta, t), samples)


@dataclass
class DistanceReport:
    distance: float
    argmax: np.ndarray
    directions: int


def projection_distance(K: SymmetricPolytope, L: SymmetricPolytope, d: WeightedDensity,
                        M: int = 512, seed: int = 0) -> DistanceReport:
    """Sampled ``max_theta |P_{mu,K}(theta) - P_{mu,L}(theta)|``."""
    dirs = sphere_directions(K.n, M, seed)
    diff = np.abs(P_mu(K, d, dirs) - P_mu(L, d, dirs))
    j = int(np.argmax(diff))
    return DistanceReport(float(diff[j]), dirs[j], len(dirs))
