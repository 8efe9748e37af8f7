"""Weighted densities with declared homogeneity and concavity degrees.

A density ``g`` on R^n is described by its kind plus two declared numbers:
the homogeneity degree ``r`` (``g(a x) = a**r g(x)`` for ``a > 0``) and the
concavity degree ``p`` of its restriction to the half-space
``{<x, v> > 0}``.  The declarations are not inferred; the ``check_*``
functions only cross-check them on random samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CheckFailed, NonHomogeneousDensity

TINY = 1e-300
HOMOGENEITY_TOL = 1e-9
CONCAVITY_TOL = 1e-10

KINDS = ("lebesgue", "abs_linear", "power_cone", "gaussian", "ball_indicator", "custom")


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("direction must be nonzero")
    return v / nrm


@dataclass(frozen=True, eq=False)
class WeightedDensity:
    """Immutable description of a density ``g``.

    Use the factory functions (:func:`lebesgue`, :func:`abs_linear`, ...)
    rather than calling the constructor directly.
    """

    kind: str
    r: Optional[float] = None
    p: Optional[float] = None
    half_space_normal: Optional[np.ndarray] = None
    even: bool = True
    theta: Optional[np.ndarray] = None
    inv_p: Optional[float] = None
    radius: Optional[float] = None
    func: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    support: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    name: str = ""

    @property
    def homogeneous(self) -> bool:
        return self.r is not None

    @property
    def dim(self) -> Optional[int]:
        for v in (self.theta, self.half_space_normal):
            if v is not None:
                return len(v)
        return None

    def __call__(self, x) -> np.ndarray:
        return evaluate(self, x)

    def require_homogeneous(self) -> float:
        if self.r is None:
            raise NonHomogeneousDensity(f"density {self.label} has no homogeneity degree")
        return self.r

    def in_support(self, x) -> np.ndarray:
        """Declared support cone (closure of {g > 0}) as a boolean mask."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "power_cone":
            return x @ self.theta >= 0.0
        if self.kind == "ball_indicator":
            return np.einsum("ij,ij->i", x, x) <= self.radius**2
        if self.support is not None:
            return np.asarray(self.support(x), dtype=bool)
        return np.ones(len(x), dtype=bool)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "abs_linear":
            return f"abs_linear{tuple(np.round(self.theta, 6).tolist())}"
        if self.kind == "power_cone":
            return f"power_cone{tuple(np.round(self.theta, 6).tolist())}^{self.inv_p:g}"
        if self.kind == "ball_indicator":
            return f"ball_indicator(R={self.radius:g})"
        return self.kind

    def zero_hyperplanes(self) -> list[np.ndarray]:
        """Normals of hyperplanes across which ``g`` is only piecewise smooth."""
        if self.kind in ("abs_linear", "power_cone"):
            return [self.theta]
        return []

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise TypeError("custom densities are not serializable")
        out: dict = {"kind": self.kind}
        if self.theta is not None:
            out["theta"] = self.theta.tolist()
        if self.inv_p is not None and self.kind == "power_cone":
            out["inv_p"] = self.inv_p
        if self.radius is not None:
            out["radius"] = self.radius
        if self.half_space_normal is not None and self.kind != "lebesgue":
            out["half_space_normal"] = self.half_space_normal.tolist()
        return out


def lebesgue() -> WeightedDensity:
    """Constant density 1: ``r = 0`` and the ``p = inf`` convention."""
    return WeightedDensity("lebesgue", r=0.0, p=math.inf, even=True)


def abs_linear(theta, half_space_normal=None) -> WeightedDensity:
    """``g(x) = |<x, theta>|``: even, 1-homogeneous, linear on a half-space."""
    theta = _unit(theta)
    v = theta if half_space_normal is None else _unit(half_space_normal)
    return WeightedDensity("abs_linear", r=1.0, p=1.0, half_space_normal=v, even=True, theta=theta)


def power_cone(theta, inv_p: float) -> WeightedDensity:
    """``g(x) = <x, theta>_+ ** inv_p``; supported on a half-space, not even."""
    if inv_p <= 0:
        raise ValueError("inv_p must be positive")
    theta = _unit(theta)
    return WeightedDensity(
        "power_cone", r=float(inv_p), p=1.0 / inv_p, half_space_normal=theta,
        even=False, theta=theta, inv_p=float(inv_p),
    )


def gaussian() -> WeightedDensity:
    """Standard Gaussian density; carries no homogeneity or concavity degree."""
    return WeightedDensity("gaussian", even=True)


def ball_indicator(radius: float = 1.0) -> WeightedDensity:
    """Indicator of the centered Euclidean ball: even, not homogeneous."""
    return WeightedDensity("ball_indicator", even=True, radius=float(radius))


def custom(func, r=None, p=None, half_space_normal=None, even=False, support=None, name="custom") -> WeightedDensity:
    """Wrap a vectorized evaluator ``func(points[M, n]) -> values[M]``.

    The declared ``r``, ``p`` and ``even`` are trusted until checked.
    """
    v = None if half_space_normal is None else _unit(half_space_normal)
    return WeightedDensity(
        "custom", r=None if r is None else float(r), p=None if p is None else float(p),
        half_space_normal=v, even=even, func=func, support=support, name=name,
    )


def evaluate(d: WeightedDensity, x) -> np.ndarray | float:
    """Evaluate ``g`` at a point or at each row of a point array.

    Returns a float for a single point. Values outside the declared support
    cone are zero.
    """
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = np.atleast_2d(arr)
    if d.kind == "lebesgue":
        vals = np.ones(len(pts))
    elif d.kind == "abs_linear":
        vals = np.abs(pts @ d.theta)
    elif d.kind == "power_cone":
        vals = np.maximum(pts @ d.theta, 0.0) ** d.inv_p
    elif d.kind == "gaussian":
        n = pts.shape[1]
        vals = np.exp(-0.5 * np.einsum("ij,ij->i", pts, pts)) / (2.0 * math.pi) ** (n / 2)
    elif d.kind == "ball_indicator":
        vals = (np.einsum("ij,ij->i", pts, pts) <= d.radius**2).astype(float)
    else:
        vals = np.asarray(d.func(pts), dtype=float).reshape(len(pts))
        if d.support is not None:
            vals = np.where(d.in_support(pts), vals, 0.0)
    return float(vals[0]) if single else vals


@dataclass(frozen=True)
class ConcavityProfile:
    """Concavity exponent ``q = 1/(n + r)`` inherited by the measure."""

    n: int
    r: float

    @property
    def q(self) -> float:
        return 1.0 / (self.n + self.r)

    @classmethod
    def of(cls, d: WeightedDensity, n: int) -> "ConcavityProfile":
        return cls(n=n, r=d.require_homogeneous())


@dataclass
class CheckReport:
    """Outcome of a sampled declaration check."""

    check: str
    passed: bool
    value: float
    tolerance: float
    samples: int
    seed: int
    detail: str = ""

    def require(self) -> "CheckReport":
        if not self.passed:
            raise CheckFailed(f"{self.check} failed: {self.value:.3e} > {self.tolerance:.1e} {self.detail}".rstrip())
        return self


def _sample_dim(d: WeightedDensity, dim: Optional[int]) -> int:
    return dim or d.dim or 3


def _support_samples(d: WeightedDensity, rng: np.random.Generator, count: int, n: int, half_space: bool) -> np.ndarray:
    """Gaussian points inside the support (and the declared half-space)."""
    out = []
    have = 0
    while have < count:
        x = rng.standard_normal((2 * count, n))
        if half_space and d.half_space_normal is not None:
            v = d.half_space_normal
            s = x @ v
            x = x - 2.0 * np.minimum(s, 0.0)[:, None] * v
            x = x[x @ v > 0]
        if d.kind == "ball_indicator":
            x *= d.radius / max(np.sqrt(n) + 3.0, 1.0)
        x = x[d.in_support(x)]
        out.append(x)
        have += len(x)
    return np.concatenate(out)[:count]


def check_homogeneity(d: WeightedDensity, samples: int = 1000, seed: int = 0, dim=None) -> CheckReport:
    """Max relative deviation of ``g(a x)`` from ``a**r g(x)`` for ``a`` in [0.1, 10]."""
    r = d.require_homogeneous()
    n = _sample_dim(d, dim)
    rng = np.random.default_rng(seed)
    x = _support_samples(d, rng, samples, n, half_space=False)
    a = np.exp(rng.uniform(math.log(0.1), math.log(10.0), samples))
    gax = evaluate(d, a[:, None] * x)
    gx = evaluate(d, x)
    dev = np.abs(gax - a**r * gx) / np.maximum(gax, TINY)
    worst = float(dev.max()) if samples else 0.0
    return CheckReport("homogeneity", worst <= HOMOGENEITY_TOL, worst, HOMOGENEITY_TOL, samples, seed)


def check_evenness(d: WeightedDensity, samples: int = 10_000, seed: int = 0, dim=None) -> CheckReport:
    n = _sample_dim(d, dim)
    x = np.random.default_rng(seed).standard_normal((samples, n))
    a, b = evaluate(d, x), evaluate(d, -x)
    worst = float(np.max(np.abs(a - b) / np.maximum(np.maximum(a, b), 1.0)))
    return CheckReport("evenness", (worst <= 1e-12) == d.even, worst, 1e-12, samples, seed)


def _powered(vals: np.ndarray, p: float) -> np.ndarray:
    if p == 0:
        with np.errstate(divide="ignore"):
            return np.log(vals)
    return vals**p


def check_p_concavity(d: WeightedDensity, samples: int = 1000, seed: int = 0, dim=None) -> CheckReport:
    """Worst violation of ``g^p(l x + (1-l) y) >= l g^p(x) + (1-l) g^p(y)``.

    Points are drawn from the declared half-space intersected with the
    support; ``p = 0`` means log-concavity.
    """
    if d.kind == "lebesgue":
        return CheckReport("p_concavity", True, 0.0, CONCAVITY_TOL, 0, seed, "constant density")
    if d.p is None or d.half_space_normal is None:
        raise NonHomogeneousDensity(f"density {d.label} declares no concavity degree")
    n = _sample_dim(d, dim)
    rng = np.random.default_rng(seed)
    x = _support_samples(d, rng, samples, n, half_space=True)
    y = _support_samples(d, rng, samples, n, half_space=True)
    lam = rng.uniform(0.0, 1.0, samples)[:, None]
    z = lam * x + (1.0 - lam) * y
    lhs = _powered(evaluate(d, z), d.p)
    rhs = lam[:, 0] * _powered(evaluate(d, x), d.p) + (1.0 - lam[:, 0]) * _powered(evaluate(d, y), d.p)
    viol = np.nan_to_num(rhs - lhs, nan=0.0, neginf=0.0)
    worst = float(max(viol.max(), 0.0))
    return CheckReport("p_concavity", worst <= CONCAVITY_TOL, worst, CONCAVITY_TOL, samples, seed)


def check_implied_concavity(d: WeightedDensity, samples: int = 10_000, seed: int = 0, dim=None) -> CheckReport:
    """Check the superadditivity ``g(x+y) >= (g(x)**(1/r) + g(y)**(1/r))**r``.

    This is what a p-concave, 1/p-homogeneous density must satisfy on its
    half-space; a violation signals an inconsistent declaration. The
    tolerance is relative to ``max(1, rhs)``.
    """
    r = d.require_homogeneous()
    if r <= 0 or d.p is None or d.p <= 0:
        raise ValueError("implied concavity needs r > 0 and p > 0")
    n = _sample_dim(d, dim)
    rng = np.random.default_rng(seed)
    x = _support_samples(d, rng, samples, n, half_space=True)
    y = _support_samples(d, rng, samples, n, half_space=True)
    lhs = evaluate(d, x + y)
    rhs = (evaluate(d, x) ** (1.0 / r) + evaluate(d, y) ** (1.0 / r)) ** r
    viol = (rhs - lhs) / np.maximum(1.0, np.abs(rhs))
    worst = float(max(viol.max(), 0.0))
    return CheckReport("implied_concavity", worst <= CONCAVITY_TOL, worst, CONCAVITY_TOL, samples, seed)


def from_dict(data: dict) -> WeightedDensity:
    kind = data["kind"]
    if kind == "lebesgue":
        return lebesgue()
    if kind == "abs_linear":
        return abs_linear(data["theta"], data.get("half_space_normal"))
    if kind == "power_cone":
        return power_cone(data["theta"], data["inv_p"])
    if kind == "gaussian":
        return gaussian()
    if kind == "ball_indicator":
        return ball_indicator(data.get("radius", 1.0))
    raise ValueError(f"unknown density kind {kind!r}")



def named(name: str, n: int) -> WeightedDensity:
    """Shorthand densities in R^n: ``LEB``, ``X1`` (``|x_1|``), ``GAUSS``."""
    key = name.upper()
    if key == "LEB":
        return lebesgue()
    if key == "X1":
        return abs_linear(np.eye(n)[0])
    if key == "GAUSS":
        return gaussian()
    raise KeyError(f"unknown density shorthand {name!r}")
