"""Centrally symmetric polytopes in H-representation, faces and zonotopes.

Bodies are given by antipodally paired unit normals ``u_i`` and positive
offsets ``alpha_i``::

    P = {x : <x, u_i> <= alpha_i for all i}

Vertices are enumerated exactly by solving every n-subset of constraints
(desk scale: N <= ~40, n <= 4). Faces carry a simplicial decomposition
that the quadrature in :mod:`weighted_minkowski.integrate` consumes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from .errors import DegenerateGenerators, DegenerateInput, DimensionTooLarge, UnboundedBody

VERTEX_TOL = 1e-9
UNIT_TOL = 1e-12
MAX_DIM = 4


@dataclass(frozen=True, eq=False)
class Face:
    """Facet ``F(u_i) = P ∩ {<x, u_i> = alpha_i}``.

    ``simplices`` has shape ``(S, n, n)``: S simplices of dimension n-1,
    each given by its n vertices in ambient coordinates. An empty face
    (redundant constraint, or a lower-dimensional contact) has S = 0.
    """

    index: int
    normal: np.ndarray
    offset: float
    vertices: np.ndarray
    simplices: np.ndarray

    @property
    def empty(self) -> bool:
        return len(self.simplices) == 0

    @property
    def volume(self) -> float:
        return float(simplex_volumes(self.simplices).sum()) if not self.empty else 0.0

    def scaled(self, t: float) -> "Face":
        return Face(self.index, self.normal, self.offset * t, self.vertices * t, self.simplices * t)


def simplex_volumes(simplices: np.ndarray) -> np.ndarray:
    """(k)-volumes of k-simplices embedded in R^n; input shape (S, k+1, n)."""
    simplices = np.asarray(simplices, dtype=float)
    if len(simplices) == 0:
        return np.zeros(0)
    k = simplices.shape[1] - 1
    edges = simplices[:, 1:, :] - simplices[:, :1, :]
    gram = np.einsum("sik,sjk->sij", edges, edges)
    det = np.linalg.det(gram) if k > 0 else np.ones(len(simplices))
    return np.sqrt(np.maximum(det, 0.0)) / math.factorial(k)


def orthonormal_complement(u: np.ndarray) -> np.ndarray:
    """Columns form an orthonormal basis of ``u^perp`` (shape n x (n-1))."""
    n = len(u)
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
    return q[:, 1:n]


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    if len(points) < 2:
        return points
    parent = np.arange(len(points))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in cKDTree(points).query_pairs(tol):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = np.array([find(i) for i in range(len(points))])
    keep = np.unique(roots)
    return np.array([points[roots == k].mean(axis=0) for k in keep])


def _face_decomposition(verts: np.ndarray, u: np.ndarray, tol: float):
    """Order face vertices and split the face into (n-1)-simplices."""
    n = len(u)
    if len(verts) < n:
        return verts, np.zeros((0, n, n))
    basis = orthonormal_complement(u)
    c = verts.mean(axis=0)
    y = (verts - c) @ basis
    if n == 2:
        order = np.argsort(y[:, 0])
        ordered = verts[order]
        seg = np.array([[ordered[0], ordered[-1]]])
        if np.ptp(y[:, 0]) <= tol:
            return ordered, np.zeros((0, n, n))
        return ordered, seg
    if np.linalg.matrix_rank(y, tol=tol) < n - 1:
        return verts, np.zeros((0, n, n))
    if n == 3:
        order = np.argsort(np.arctan2(y[:, 1], y[:, 0]))
        ordered = verts[order]
        tris = np.array([[ordered[0], ordered[k], ordered[k + 1]] for k in range(1, len(ordered) - 1)])
        return ordered, tris
    hull = ConvexHull(y)
    ordered = verts[hull.vertices]
    tets = np.array([[c, *verts[s]] for s in hull.simplices])
    return ordered, tets


class SymmetricPolytope:
    """Origin-symmetric polytope ``P(A) = ∩ {|<x, u_i>| <= alpha_i}``.

    Instances are immutable; vertices and faces are computed once at
    construction. Prefer :func:`from_halfspaces`.
    """

    def __init__(self, normals, offsets, *, _cache=None):
        normals = np.array(normals, dtype=float, ndmin=2)
        offsets = np.array(offsets, dtype=float, ndmin=1)
        self.n = normals.shape[1]
        if _cache is None:
            antipode = _validate_hrep(normals, offsets)
            vertices, faces = _enumerate(normals, offsets)
        else:
            antipode, vertices, faces = _cache
        self.normals = normals
        self.offsets = offsets
        self.antipode = antipode
        self.vertices = vertices
        self.faces = faces
        for arr in (self.normals, self.offsets, self.vertices, self.antipode):
            arr.setflags(write=False)

    @property
    def N(self) -> int:
        return len(self.offsets)

    def __repr__(self) -> str:
        return f"SymmetricPolytope(n={self.n}, N={self.N}, vertices={len(self.vertices)})"

    def support(self, x) -> np.ndarray | float:
        return support_function(self, x)

    @property
    def circumradius(self) -> float:
        return float(np.linalg.norm(self.vertices, axis=1).max())

    @property
    def volume(self) -> float:
        return float(np.dot(self.offsets, [f.volume for f in self.faces])) / self.n

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(points)
        return np.all(pts @ self.normals.T <= self.offsets + tol, axis=1)

    def pair_representatives(self) -> np.ndarray:
        """Indices ``i`` with ``i < antipode[i]``: one normal per pair."""
        idx = np.arange(self.N)
        return idx[idx < self.antipode]

    def with_offsets(self, offsets) -> "SymmetricPolytope":
        return SymmetricPolytope(self.normals, offsets)

    def to_dict(self) -> dict:
        return {"normals": self.normals.tolist(), "offsets": self.offsets.tolist()}


def _validate_hrep(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    N, n = normals.shape
    if not 2 <= n <= MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} outside 2..{MAX_DIM}")
    if len(offsets) != N:
        raise DegenerateInput("normals and offsets differ in length")
    if np.any(np.abs(np.linalg.norm(normals, axis=1) - 1.0) > UNIT_TOL):
        raise DegenerateInput("normals must be unit vectors")
    if np.any(offsets <= 0) or not np.all(np.isfinite(offsets)):
        raise DegenerateInput("offsets must be positive and finite")
    dots = normals @ normals.T
    np.fill_diagonal(dots, -2.0)
    if np.any(dots > 1.0 - UNIT_TOL):
        raise DegenerateInput("two normals coincide")
    np.fill_diagonal(dots, 2.0)
    antipode = np.argmin(dots, axis=1)
    if np.any(dots[np.arange(N), antipode] > -1.0 + VERTEX_TOL) or np.any(antipode[antipode] != np.arange(N)):
        raise DegenerateInput("normals are not antipodally paired")
    if np.any(np.abs(offsets - offsets[antipode]) > VERTEX_TOL * np.maximum(1.0, offsets)):
        raise DegenerateInput("paired offsets differ")
    if np.linalg.matrix_rank(normals, tol=1e-10) < n:
        raise UnboundedBody("normals do not positively span the space")
    return antipode


def _enumerate(normals: np.ndarray, offsets: np.ndarray):
    N, n = normals.shape
    scale = offsets.max()
    b = offsets / scale
    combos = np.array(list(itertools.combinations(range(N), n)))
    A = normals[combos]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-12
    A, rhs = A[ok], b[combos[ok]]
    x = np.linalg.solve(A, rhs[..., None])[..., 0]
    feasible = np.all(x @ normals.T <= b + VERTEX_TOL, axis=1)
    verts = _dedupe(x[feasible], VERTEX_TOL)
    if len(verts) == 0:
        raise UnboundedBody("no vertices found")
    faces = []
    for i in range(N):
        active = np.abs(verts @ normals[i] - b[i]) < VERTEX_TOL
        fv, simp = _face_decomposition(verts[active], normals[i], VERTEX_TOL)
        faces.append(Face(i, normals[i], offsets[i], fv * scale, simp * scale))
    return verts * scale, faces


def from_halfspaces(normals, offsets) -> SymmetricPolytope:
    """Build ``P = {x : <x, u_i> <= alpha_i}`` with exact vertex enumeration.

    Raises
    ------
    UnboundedBody
        If the normals do not span R^n.
    DegenerateInput
        On non-unit or coincident normals, broken antipodal pairing or
        non-positive offsets.
    """
    return SymmetricPolytope(normals, offsets)


def from_pairs(half_normals, half_offsets) -> SymmetricPolytope:
    """Build from one normal per antipodal pair; normals are normalized."""
    u = np.array(half_normals, dtype=float, ndmin=2)
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    a = np.asarray(half_offsets, dtype=float)
    return SymmetricPolytope(np.vstack([u, -u]), np.concatenate([a, a]))


def support_function(P: SymmetricPolytope, x) -> np.ndarray | float:
    """``h_P(x) = max_{y in P} <x, y>`` via the cached vertices."""
    arr = np.asarray(x, dtype=float)
    vals = np.max(np.atleast_2d(arr) @ P.vertices.T, axis=1)
    return float(vals[0]) if arr.ndim == 1 else vals


def scale(P: SymmetricPolytope, t: float) -> SymmetricPolytope:
    if t <= 0:
        raise ValueError("scale factor must be positive")
    faces = [f.scaled(t) for f in P.faces]
    return SymmetricPolytope(P.normals, P.offsets * t, _cache=(P.antipode, P.vertices * t, faces))


def linear_image(P: SymmetricPolytope, M) -> SymmetricPolytope:
    """Image ``M P`` for an invertible matrix ``M`` (used for rotations)."""
    M = np.asarray(M, dtype=float)
    Minv_T = np.linalg.inv(M).T
    u = P.normals @ Minv_T.T
    nrm = np.linalg.norm(u, axis=1)
    return from_halfspaces(u / nrm[:, None], P.offsets / nrm)


def from_points(points, tol: float = VERTEX_TOL) -> SymmetricPolytope:
    """H-representation of the convex hull of an origin-symmetric point set."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]
    nrm = np.linalg.norm(normals, axis=1)
    normals, offsets = normals / nrm[:, None], offsets / nrm
    # Qhull triangulates facets; merge coplanar pieces.
    keep = []
    for i in range(len(normals)):
        if all(np.linalg.norm(normals[i] - normals[j]) > 1e-7 for j in keep):
            keep.append(i)
    normals, offsets = normals[keep], offsets[keep]
    return _symmetrized(normals, offsets)


def _symmetrized(normals: np.ndarray, offsets: np.ndarray) -> SymmetricPolytope:
    dots = normals @ normals.T
    partner = np.argmin(dots, axis=1)
    if np.any(dots[np.arange(len(normals)), partner] > -1.0 + 1e-7) or np.any(partner[partner] != np.arange(len(normals))):
        raise DegenerateInput("point set is not origin-symmetric")
    half_u, half_a = [], []
    for i, j in enumerate(partner):
        if i < j:
            u = normals[i] - normals[j]
            half_u.append(u / np.linalg.norm(u))
            half_a.append(0.5 * (offsets[i] + offsets[j]))
    return from_pairs(half_u, half_a)


def minkowski_sum(P: SymmetricPolytope, Q: SymmetricPolytope) -> SymmetricPolytope:
    """``P + Q`` as the hull of pairwise vertex sums (n <= 3)."""
    if P.n != Q.n:
        raise ValueError("dimension mismatch")
    if P.n > 3:
        raise DimensionTooLarge("minkowski_sum supports n <= 3")
    sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, P.n)
    return from_points(sums)


@dataclass
class ZonotopeCertificate:
    is_zonotope: bool
    violating_face: Optional[np.ndarray] = None
    face_normals: tuple = ()


def _centrally_symmetric(verts: np.ndarray, tol: float) -> bool:
    c = verts.mean(axis=0)
    refl = 2.0 * c - verts
    dist, _ = cKDTree(verts).query(refl)
    return bool(np.all(dist <= tol))


def two_faces(P: SymmetricPolytope):
    """Yield ``(normal indices, vertices)`` of every 2-dimensional face."""
    scale_ = P.offsets.max()
    tol = VERTEX_TOL * scale_
    active = np.abs(P.vertices @ P.normals.T - P.offsets) < tol
    if P.n == 3:
        for i in range(P.N):
            if not P.faces[i].empty:
                yield (i,), P.vertices[active[:, i]]
    elif P.n == 4:
        seen = set()
        for i, j in itertools.combinations(range(P.N), 2):
            if P.antipode[i] == j:
                continue
            mask = active[:, i] & active[:, j]
            if mask.sum() < 3:
                continue
            key = tuple(np.flatnonzero(mask))
            if key in seen:
                continue
            verts = P.vertices[mask]
            if np.linalg.matrix_rank(verts[1:] - verts[0], tol=tol) == 2:
                seen.add(key)
                yield (i, j), verts


def is_zonotope(P: SymmetricPolytope) -> ZonotopeCertificate:
    """Zonotope test: every 2-face must be centrally symmetric.

    In the plane every symmetric polygon passes.
    """
    if P.n == 2:
        return ZonotopeCertificate(True)
    tol = VERTEX_TOL * P.offsets.max()
    for idx, verts in two_faces(P):
        if not _centrally_symmetric(verts, tol):
            return ZonotopeCertificate(False, verts, idx)
    return ZonotopeCertificate(True)


@dataclass(frozen=True, eq=False)
class Zonotope:
    """Minkowski sum of the segments ``[-g_j, g_j]``."""

    generators: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "generators", np.array(self.generators, dtype=float, ndmin=2))

    def realize(self) -> SymmetricPolytope:
        return zonotope_realize(self)

    def support(self, x) -> np.ndarray:
        return np.abs(np.atleast_2d(x) @ self.generators.T).sum(axis=1)


def zonotope_realize(Z: Zonotope) -> SymmetricPolytope:
    G = Z.generators[np.linalg.norm(Z.generators, axis=1) > 0]
    m, n = G.shape
    if n > MAX_DIM:
        raise DimensionTooLarge(f"dimension {n} > {MAX_DIM}")
    if np.linalg.matrix_rank(G, tol=1e-10) < n:
        raise DegenerateGenerators("generators do not span the space")
    if m > 16:
        raise DimensionTooLarge("too many generators for exact realization")
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=m)))
    pts = _dedupe(signs @ G, VERTEX_TOL * np.abs(G).sum())
    return from_points(pts)


# -- fixtures and generators -------------------------------------------------

def cube(n: int, half_width: float = 1.0) -> SymmetricPolytope:
    return from_pairs(np.eye(n), np.full(n, half_width))


def cross_polytope(n: int, radius: float = 1.0) -> SymmetricPolytope:
    """``conv{±radius e_i}``."""
    signs = np.array([s for s in itertools.product((-1.0, 1.0), repeat=n) if s[0] > 0])
    return from_pairs(signs, np.full(len(signs), radius / math.sqrt(n)))


def square() -> SymmetricPolytope:
    """SQ2 = [-1, 1]^2."""
    return cube(2)


def diamond() -> SymmetricPolytope:
    """DIA2 = conv{±e1, ±e2}."""
    return cross_polytope(2)


def regular_polygon(m: int, inradius: float = 1.0, phase: float = 0.0) -> SymmetricPolytope:
    """Regular polygon with ``2m`` edges (m antipodal pairs)."""
    ang = phase + np.pi * np.arange(m) / m
    return from_pairs(np.column_stack([np.cos(ang), np.sin(ang)]), np.full(m, inradius))


def fibonacci_sphere(count: int, n: int = 3) -> np.ndarray:
    """Deterministic, roughly uniform unit vectors (n = 2 or 3)."""
    if n == 2:
        ang = np.pi * (np.arange(count) + 0.5) / count
        return np.column_stack([np.cos(ang), np.sin(ang)])
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    phi = np.pi * (1.0 + 5**0.5) * i
    rho = np.sqrt(1.0 - z * z)
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def ball_polytope(n: int, pairs: int, inradius: float = 1.0) -> SymmetricPolytope:
    """Circumscribed polytope approximating ``inradius * B_2^n``."""
    if n == 2:
        return regular_polygon(pairs, inradius)
    u = fibonacci_sphere(2 * pairs, n)
    u = u[u[:, -1] > 0]
    return from_pairs(u, np.full(len(u), inradius))


def random_unit_vectors(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_symmetric_polytope(rng: np.random.Generator, n: int, pairs: Optional[int] = None,
                              offset_range=(0.6, 1.4)) -> SymmetricPolytope:
    """Random symmetric polytope with ``pairs`` antipodal normal pairs.

    Redundant constraints are allowed; they produce empty faces.
    """
    if pairs is None:
        pairs = int(rng.integers(n + 1, 8 if n == 2 else 7))
    while True:
        u = random_unit_vectors(rng, pairs, n)
        if np.linalg.matrix_rank(u) == n and np.min(1 - np.abs(u @ u.T) + 2 * np.eye(pairs)) > 1e-3:
            break
    a = rng.uniform(*offset_range, pairs)
    return from_pairs(u, a)


def random_zonotope(rng: np.random.Generator, n: int, m: Optional[int] = None) -> Zonotope:
    if m is None:
        m = int(rng.integers(n, n + 4))
    while True:
        G = rng.standard_normal((m, n))
        G /= np.linalg.norm(G, axis=1, keepdims=True)
        G *= rng.uniform(0.3, 1.0, (m, 1))
        if np.linalg.matrix_rank(G) == n and np.min(1 - np.abs((G / np.linalg.norm(G, axis=1, keepdims=True)) @ (G / np.linalg.norm(G, axis=1, keepdims=True)).T) + 2 * np.eye(m)) > 1e-3:
            return Zonotope(G)


def random_rotation(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
