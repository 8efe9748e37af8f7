"""Weighted integration over faces and bodies.

Face integrals ``mu_{n-1}(F) = ∫_F g`` are exact for the built-in
homogeneous kinds: each simplex of the face is first cut along the zero
hyperplane of the density, after which ``|<x, theta>|**k`` is a polynomial
on every piece and is integrated in closed form.  Monte Carlo estimators
serve as independent oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import erfc, ndtri, roots_jacobi

from .body import Face, SymmetricPolytope, minkowski_sum, orthonormal_complement, scale, simplex_volumes
from .density import WeightedDensity, evaluate
from .errors import DomainError, NonHomogeneousDensity

SQRT2 = math.sqrt(2.0)
MC_CHUNK = 1 << 17


@dataclass(frozen=True)
class QuadratureSpec:
    """Fixed rule for densities without a closed-form face integral.

    ``order`` is the number of Gauss-Jacobi points per simplex coordinate
    (exact for polynomials of degree ``2*order - 1``), ``refine`` the number
    of midpoint subdivisions applied first, ``split_planes`` extra
    hyperplane normals (through the origin) along which to cut.
    """

    order: int = 6
    refine: int = 1
    split_planes: tuple = ()
    gaussian_tol: float = 1e-12


DEFAULT_SPEC = QuadratureSpec()


# -- simplex splitting -------------------------------------------------------

def _cross(p, q, lp, lq):
    return p + (lp / (lp - lq)) * (q - p)


def _prism(a, b):
    """Three tetrahedra filling the prism with triangles ``a`` and ``b``."""
    return [
        [a[0], a[1], a[2], b[2]],
        [a[0], a[1], b[1], b[2]],
        [a[0], b[0], b[1], b[2]],
    ]


def _positive_part(simplex: np.ndarray, ell: np.ndarray) -> list:
    """Simplices covering ``simplex ∩ {ell >= 0}``; ``ell`` holds vertex values."""
    pos = [i for i in range(len(ell)) if ell[i] >= 0]
    neg = [i for i in range(len(ell)) if ell[i] < 0]
    if not neg:
        return [simplex]
    if not pos:
        return []
    m = len(ell) - 1
    x = {(i, j): _cross(simplex[i], simplex[j], ell[i], ell[j]) for i in pos for j in neg}
    if len(pos) == 1:
        i = pos[0]
        return [np.array([simplex[i], *[x[i, j] for j in neg]])]
    if m == 2:  # two positive vertices, one negative: quadrilateral
        (i, k), j = pos, neg[0]
        return [np.array([simplex[i], simplex[k], x[k, j]]), np.array([simplex[i], x[k, j], x[i, j]])]
    if m == 3 and len(neg) == 1:
        j = neg[0]
        a = [simplex[i] for i in pos]
        b = [x[i, j] for i in pos]
        return [np.array(t) for t in _prism(a, b)]
    if m == 3:  # two and two: wedge between the triangles at each positive vertex
        (i, k), (j, l) = pos, neg
        a = [simplex[i], x[i, j], x[i, l]]
        b = [simplex[k], x[k, j], x[k, l]]
        return [np.array(t) for t in _prism(a, b)]
    raise ValueError(f"cannot split a {m}-simplex")


def split_simplex(simplex: np.ndarray, normal: np.ndarray):
    """Cut a simplex by the hyperplane ``<x, normal> = 0``.

    Returns ``(positive_pieces, negative_pieces)``; each piece is a simplex
    of the same dimension.
    """
    ell = simplex @ normal
    return _positive_part(simplex, ell), _positive_part(simplex, -ell)


def _split_all(simplices: Sequence[np.ndarray], normals: Sequence[np.ndarray]) -> list:
    pieces = list(simplices)
    for v in normals:
        nxt = []
        for s in pieces:
            a, b = split_simplex(s, v)
            nxt.extend(a)
            nxt.extend(b)
        pieces = nxt
    return pieces


# -- exact polynomial integration ------------------------------------------

def _complete_homogeneous(vals: np.ndarray, k: int) -> np.ndarray:
    """``h_k`` of the rows of ``vals`` (shape (S, m+1))."""
    S, cols = vals.shape
    h = np.zeros((cols + 1, k + 1, S))
    h[:, 0, :] = 1.0
    for c in range(1, cols + 1):
        for d in range(1, k + 1):
            h[c, d] = h[c - 1, d] + vals[:, c - 1] * h[c, d - 1]
    return h[cols, k]


def integrate_linear_power(simplices: np.ndarray, normal: np.ndarray, k: int) -> float:
    """``Σ_S ∫_S <x, normal>**k`` for simplices where the form is >= 0.

    Uses ``∫_S l**k = vol(S) k! m! / (k+m)! h_k(l_0, ..., l_m)``.
    """
    if len(simplices) == 0:
        return 0.0
    simplices = np.asarray(simplices)
    m = simplices.shape[1] - 1
    vol = simplex_volumes(simplices)
    vals = np.maximum(simplices @ normal, 0.0)
    coef = math.factorial(k) * math.factorial(m) / math.factorial(k + m)
    return float(np.sum(vol * coef * _complete_homogeneous(vals, k)))


# -- generic simplex rule -----------------------------------------------------

@lru_cache(maxsize=None)
def simplex_rule(m: int, order: int):
    """Conical-product Gauss-Jacobi rule on the reference m-simplex.

    Returns barycentric coordinates (Q, m+1) and weights summing to 1.
    """
    if m == 0:
        return np.ones((1, 1)), np.ones(1)
    nodes, weights = [], []
    for k in range(m):
        alpha = m - 1 - k
        x, w = roots_jacobi(order, alpha, 0.0)
        nodes.append((1.0 + x) / 2.0)
        weights.append(w / 2.0 ** (alpha + 1))
    grids = np.meshgrid(*nodes, indexing="ij")
    wgrid = np.meshgrid(*weights, indexing="ij")
    s = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrid], axis=1), axis=1)
    bary = np.zeros((len(s), m + 1))
    rest = np.ones(len(s))
    for k in range(m):
        bary[:, k + 1] = rest * s[:, k]
        rest = rest * (1.0 - s[:, k])
    bary[:, 0] = rest
    w = w * math.factorial(m)
    return bary, w / w.sum()


def _subdivide(simplex: np.ndarray) -> list:
    m = len(simplex) - 1
    if m == 0:
        return [simplex]
    mid = {(i, j): 0.5 * (simplex[i] + simplex[j]) for i in range(m + 1) for j in range(i, m + 1)}
    v = lambda i, j: mid[min(i, j), max(i, j)]
    if m == 1:
        return [np.array([v(0, 0), v(0, 1)]), np.array([v(0, 1), v(1, 1)])]
    if m == 2:
        return [np.array(t) for t in (
            [v(0, 0), v(0, 1), v(0, 2)], [v(1, 1), v(0, 1), v(1, 2)],
            [v(2, 2), v(0, 2), v(1, 2)], [v(0, 1), v(1, 2), v(0, 2)])]
    if m == 3:
        return [np.array(t) for t in (
            [v(0, 0), v(0, 1), v(0, 2), v(0, 3)], [v(1, 1), v(0, 1), v(1, 2), v(1, 3)],
            [v(2, 2), v(0, 2), v(1, 2), v(2, 3)], [v(3, 3), v(0, 3), v(1, 3), v(2, 3)],
            [v(0, 1), v(0, 2), v(0, 3), v(1, 3)], [v(0, 1), v(0, 2), v(1, 2), v(1, 3)],
            [v(0, 2), v(0, 3), v(1, 3), v(2, 3)], [v(0, 2), v(1, 2), v(1, 3), v(2, 3)])]
    raise ValueError("subdivision supports m <= 3")


def integrate_on_simplices(func: Callable[[np.ndarray], np.ndarray], simplices, order: int = 6, refine: int = 0) -> float:
    """Fixed-rule integral of a vectorized ``func`` over simplices in R^n."""
    pieces = list(simplices)
    if not pieces:
        return 0.0
    for _ in range(refine):
        pieces = [c for s in pieces for c in _subdivide(s)]
    arr = np.asarray(pieces)
    m = arr.shape[1] - 1
    bary, w = simplex_rule(m, order)
    pts = np.einsum("qk,skn->sqn", bary, arr)
    vals = np.asarray(func(pts.reshape(-1, arr.shape[2]))).reshape(len(arr), -1)
    return float(np.sum(simplex_volumes(arr) * (vals @ w)))


# -- Gaussian face integrals ----------------------------------------------------

def normal_pdf(a):
    return np.exp(-0.5 * np.square(a)) / math.sqrt(2.0 * math.pi)


def gaussian_cdf(a):
    """Standard normal CDF ``psi(a)``."""
    if np.ndim(a) == 0:
        return 0.5 * math.erfc(-float(a) / SQRT2)
    return 0.5 * erfc(-np.asarray(a, dtype=float) / SQRT2)


def gaussian_quantile(u: float) -> float:
    """Inverse of :func:`gaussian_cdf` (``scipy.special.ndtri``)."""
    u = float(u)
    if not 0.0 < u < 1.0:
        raise DomainError(f"quantile needs u in (0, 1), got {u}")
    return float(ndtri(u))


def _polygon_gaussian_measure(z: np.ndarray, tol: float) -> float:
    """2-D standard Gaussian measure of a convex polygon (vertices in order)."""
    total = 0.0
    k = len(z)
    for i in range(k):
        a, b = z[i], z[(i + 1) % k]
        cross = a[0] * b[1] - a[1] * b[0]
        if abs(cross) < 1e-300:
            continue
        edge = b - a
        nu = np.array([edge[1], -edge[0]]) / np.linalg.norm(edge)
        h = float(a @ nu)
        phi_nu = math.atan2(nu[1], nu[0])
        t0 = math.atan2(a[1], a[0])
        sweep = math.atan2(cross, float(a @ b))

        def integrand(phi):
            rho = h / math.cos(phi - phi_nu)
            return -math.expm1(-0.5 * rho * rho)

        val, _ = sp_integrate.quad(integrand, t0, t0 + sweep, epsabs=tol, epsrel=tol, limit=200)
        total += val / (2.0 * math.pi)
    return abs(total)


def _gaussian_face_measure(F: Face, spec: QuadratureSpec) -> float:
    n = len(F.normal)
    alpha = F.offset
    base = F.normal * alpha
    basis = orthonormal_complement(F.normal)
    z = (F.vertices - base) @ basis
    if n == 2:
        y0, y1 = z[:, 0].min(), z[:, 0].max()
        return float(normal_pdf(alpha)) * (gaussian_cdf(y1) - gaussian_cdf(y0))
    if n == 3:
        c = z.mean(axis=0)
        order = np.argsort(np.arctan2(z[:, 1] - c[1], z[:, 0] - c[0]))
        return float(normal_pdf(alpha)) * _polygon_gaussian_measure(z[order], spec.gaussian_tol)
    g = lambda pts: evaluate_gaussian(pts)
    return integrate_on_simplices(g, F.simplices, order=max(spec.order, 8), refine=spec.refine + 1)


def evaluate_gaussian(pts: np.ndarray) -> np.ndarray:
    n = pts.shape[1]
    return np.exp(-0.5 * np.einsum("ij,ij->i", pts, pts)) / (2.0 * math.pi) ** (n / 2)


def _ball_face_measure(F: Face, radius: float, spec: QuadratureSpec) -> float:
    n = len(F.normal)
    alpha = F.offset
    if alpha >= radius:
        return 0.0
    if n == 2:
        basis = orthonormal_complement(F.normal)
        y = (F.vertices - F.normal * alpha) @ basis
        half = math.sqrt(radius * radius - alpha * alpha)
        lo, hi = max(y[:, 0].min(), -half), min(y[:, 0].max(), half)
        return max(hi - lo, 0.0)
    g = lambda pts: (np.einsum("ij,ij->i", pts, pts) <= radius * radius).astype(float)
    return integrate_on_simplices(g, F.simplices, order=spec.order, refine=spec.refine + 3)


# -- public face / body measures -------------------------------------------------

def face_measure(F: Face, d: WeightedDensity, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``mu_{n-1}(F) = ∫_F g``.

    Exact (to rounding) for lebesgue, abs_linear and power_cone with integer
    exponent; the Gaussian uses 1-D CDF differences in the plane and an
    angular quadrature for polygons; other kinds use the fixed rule in
    ``spec``.
    """
    if F.empty:
        return 0.0
    simp = F.simplices
    if d.kind == "lebesgue":
        return float(simplex_volumes(simp).sum())
    if d.kind == "abs_linear":
        pos, neg = split_simplex_batch(simp, d.theta)
        return integrate_linear_power(pos, d.theta, 1) + integrate_linear_power(neg, -d.theta, 1)
    if d.kind == "power_cone":
        pos, _ = split_simplex_batch(simp, d.theta)
        k = d.inv_p
        if float(k).is_integer():
            return integrate_linear_power(pos, d.theta, int(k))
        g = lambda pts: np.maximum(pts @ d.theta, 0.0) ** k
        return integrate_on_simplices(g, pos, order=spec.order, refine=spec.refine)
    if d.kind == "gaussian":
        return _gaussian_face_measure(F, spec)
    if d.kind == "ball_indicator":
        return _ball_face_measure(F, d.radius, spec)
    pieces = _split_all(simp, spec.split_planes)
    return integrate_on_simplices(lambda pts: evaluate(d, pts), pieces, order=spec.order, refine=spec.refine)


def split_simplex_batch(simplices, normal):
    pos, neg = [], []
    for s in simplices:
        a, b = split_simplex(s, normal)
        pos.extend(a)
        neg.extend(b)
    return pos, neg


def face_measures(P: SymmetricPolytope, d: WeightedDensity, spec: QuadratureSpec = DEFAULT_SPEC) -> np.ndarray:
    """Vector of ``mu_{n-1}(F_i)`` over all faces (zeros for empty faces)."""
    if d.even and d.kind != "custom":
        out = np.zeros(P.N)
        for i in P.pair_representatives():
            out[i] = out[P.antipode[i]] = face_measure(P.faces[i], d, spec)
        return out
    return np.array([face_measure(F, d, spec) for F in P.faces])


def body_measure_cone(P: SymmetricPolytope, d: WeightedDensity, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``mu(P) = (1/(n+r)) Σ alpha_i mu_{n-1}(F_i)`` for homogeneous densities."""
    if not d.homogeneous:
        raise NonHomogeneousDensity(f"cone formula needs a homogeneous density, got {d.label}")
    return float(np.dot(P.offsets, face_measures(P, d, spec))) / (P.n + d.r)


def body_measure(P: SymmetricPolytope, d: WeightedDensity, samples: int = 10**6, seed: int = 0):
    """Cone formula when available, otherwise a Monte Carlo estimate (value, se)."""
    if d.homogeneous:
        return body_measure_cone(P, d), 0.0
    if d.kind == "gaussian":
        est = gaussian_body_measure(P, samples, seed)
    else:
        est = body_measure_mc(P, d, samples, seed)
    return est.estimate, est.se


# -- Monte Carlo ------------------------------------------------------------------

@dataclass
class MCOracle:
    """Monte Carlo estimate with its standard error (sample std / sqrt(count))."""

    samples: int
    seed: int
    estimate: float
    se: float
    box: Optional[tuple] = field(default=None, repr=False)

    def agrees(self, value: float, k: float = 3.0) -> bool:
        return abs(self.estimate - value) <= k * self.se

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "se": self.se, "samples": self.samples, "seed": self.seed}


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    # Counter-based stream keyed by (seed, chunk): results do not depend on how
    # chunks are distributed among workers.
    return np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, chunk]))


def _chunks(samples: int):
    k = 0
    done = 0
    while done < samples:
        size = min(MC_CHUNK, samples - done)
        yield k, size
        k += 1
        done += size


def _mean_se(total: float, total_sq: float, count: int) -> tuple[float, float]:
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0) * count / max(count - 1, 1)
    return mean, math.sqrt(var / count)


def body_measure_mc(P: SymmetricPolytope, d: WeightedDensity, samples: int = 10**6, seed: int = 0) -> MCOracle:
    """Rejection sampling of ``∫_P g`` uniformly on the bounding box of P."""
    if samples < 2:
        raise ValueError("need at least two samples")
    lo, hi = P.vertices.min(axis=0), P.vertices.max(axis=0)
    vol = float(np.prod(hi - lo))
    s = s2 = 0.0
    for k, size in _chunks(samples):
        x = lo + (hi - lo) * _chunk_rng(seed, k).random((size, P.n))
        f = np.where(P.contains(x), evaluate(d, x), 0.0) * vol
        s += f.sum()
        s2 += np.dot(f, f)
    mean, se = _mean_se(s, s2, samples)
    return MCOracle(samples, seed, mean, se, (lo, hi))


def gaussian_body_measure(P: SymmetricPolytope, samples: int = 10**6, seed: int = 0) -> MCOracle:
    """``gamma(P)`` as the fraction of standard normal samples inside P."""
    est = gaussian_linear_estimates([P], np.ones((1, 1)), samples, seed)
    return est[0]


def gaussian_linear_estimates(bodies: Sequence[SymmetricPolytope], weights, samples: int, seed: int) -> list[MCOracle]:
    """Estimates of ``Σ_k w_jk gamma(B_k)`` sharing one set of normal samples.

    Each row of ``weights`` defines one linear combination; the standard
    error accounts for the correlation between bodies.
    """
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    n = bodies[0].n
    s = np.zeros(len(weights))
    s2 = np.zeros(len(weights))
    for k, size in _chunks(samples):
        x = _chunk_rng(seed, k).standard_normal((size, n))
        ind = np.stack([B.contains(x) for B in bodies], axis=1).astype(float)
        f = ind @ weights.T
        s += f.sum(axis=0)
        s2 += np.einsum("ij,ij->j", f, f)
    out = []
    for j in range(len(weights)):
        mean, se = _mean_se(s[j], s2[j], samples)
        out.append(MCOracle(samples, seed, mean, se))
    return out


def mc_linear_estimates(bodies: Sequence[SymmetricPolytope], d: WeightedDensity, weights, samples: int, seed: int) -> list[MCOracle]:
    """Like :func:`gaussian_linear_estimates` for ``∫_B g`` with uniform box sampling."""
    if d.kind == "gaussian":
        return gaussian_linear_estimates(bodies, weights, samples, seed)
    weights = np.atleast_2d(np.asarray(weights, dtype=float))
    allv = np.vstack([B.vertices for B in bodies])
    lo, hi = allv.min(axis=0), allv.max(axis=0)
    vol = float(np.prod(hi - lo))
    n = bodies[0].n
    s = np.zeros(len(weights))
    s2 = np.zeros(len(weights))
    for k, size in _chunks(samples):
        x = lo + (hi - lo) * _chunk_rng(seed, k).random((size, n))
        g = evaluate(d, x) * vol
        ind = np.stack([B.contains(x) for B in bodies], axis=1) * g[:, None]
        f = ind @ weights.T
        s += f.sum(axis=0)
        s2 += np.einsum("ij,ij->j", f, f)
    out = []
    for j in range(len(weights)):
        mean, se = _mean_se(s[j], s2[j], samples)
        out.append(MCOracle(samples, seed, mean, se, (lo, hi)))
    return out


# -- concavity averages ----------------------------------------------------------

def power_mean(a: float, b: float, lam: float, q: float) -> float:
    """``M_q(a, b, lam)``; ``q = 0`` is the geometric mean ``a**lam b**(1-lam)``."""
    if a <= 0 or b <= 0:
        return 0.0 if q >= 0 else min(a, b)
    if q == 0:
        return a**lam * b ** (1.0 - lam)
    if math.isinf(q):
        return max(a, b) if q > 0 else min(a, b)
    return (lam * a**q + (1.0 - lam) * b**q) ** (1.0 / q)


@dataclass
class BrunnMinkowskiReport:
    lam: float
    q: float
    measure_mix: float
    mean_q: float
    se: float

    @property
    def slack(self) -> float:
        return self.measure_mix - self.mean_q

    @property
    def passed(self) -> bool:
        return self.slack >= -3.0 * self.se - 1e-9 * max(1.0, self.mean_q)


def brunn_minkowski_check(A: SymmetricPolytope, B: SymmetricPolytope, d: WeightedDensity, lam: float) -> BrunnMinkowskiReport:
    """``mu(lam A + (1-lam) B) >= M_q(mu(A), mu(B), lam)`` with ``q = 1/(n+r)``."""
    r = d.require_homogeneous()
    q = 1.0 / (A.n + r)
    mix = minkowski_sum(scale(A, lam), scale(B, 1.0 - lam))
    return BrunnMinkowskiReport(
        lam, q, body_measure_cone(mix, d),
        power_mean(body_measure_cone(A, d), body_measure_cone(B, d), lam, q), 0.0,
    )
