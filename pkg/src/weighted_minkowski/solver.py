"""Discrete weighted Minkowski problem for origin-symmetric polytopes.

Given antipodally paired unit normals ``u_i`` and positive even targets
``f_i``, find offsets ``beta`` with ``mu_{n-1}(F_i(beta)) = f_i``. The
solution minimizes ``Phi(A) = (1/(n+r)) Σ f_i alpha_i`` on
``{mu(P(A)) = 1}`` and is then rescaled by ``m = Phi(A*)^(1/(n+r-1))``.

Iterates are updated multiplicatively, ``alpha <- alpha * exp(tau * s)``,
so they stay positive. The step ``s`` is a damped Newton direction for
a scale-balanced ``Phi - log mu``, built from the face-measure gradient and a
forward-difference Jacobian of the face measures; ``tau`` is halved
whenever the normalized objective would increase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .body import SymmetricPolytope, from_halfspaces, _validate_hrep
from .density import WeightedDensity
from .errors import DegenerateInput, DomainError, FaceCollapsed, NoConvergence
from .integrate import DEFAULT_SPEC, QuadratureSpec, face_measures

EMPTY_PATIENCE = 100
EMPTY_PULL = 0.9
SUPPORT_MARGIN = 1e-6
FD_STEP = 1e-6
MIN_TAU = 1e-12


@dataclass
class MinkowskiProblem:
    """Targets ``f_i`` attached to paired normals ``u_i`` for density ``d``."""

    density: WeightedDensity
    normals: np.ndarray
    targets: np.ndarray
    antipode: np.ndarray = field(init=False, repr=False)
    hypothesis_gap: list = field(init=False, default_factory=list)

    def __post_init__(self):
        self.normals = np.array(self.normals, dtype=float, ndmin=2)
        self.targets = np.array(self.targets, dtype=float, ndmin=1)
        self.density.require_homogeneous()
        if len(self.targets) != len(self.normals):
            raise DegenerateInput("normals and targets differ in length")
        if np.any(self.targets <= 0) or not np.all(np.isfinite(self.targets)):
            raise DegenerateInput("targets must be positive and finite")
        # pairing, spanning and unit-length checks are shared with the body constructor
        self.antipode = _validate_hrep(self.normals, np.ones(len(self.normals)))
        if np.any(np.abs(self.targets - self.targets[self.antipode]) > 1e-12 * np.maximum(1.0, self.targets)):
            raise DegenerateInput("paired targets differ")
        self.hypothesis_gap = _check_support(self.density, self.normals)

    @property
    def n(self) -> int:
        return self.normals.shape[1]

    @property
    def N(self) -> int:
        return len(self.targets)

    @classmethod
    def from_body(cls, P: SymmetricPolytope, d: WeightedDensity, spec: QuadratureSpec = DEFAULT_SPEC) -> "MinkowskiProblem":
        return cls(d, P.normals.copy(), face_measures(P, d, spec))

    def to_dict(self) -> dict:
        return {"density": self.density.to_dict(), "normals": self.normals.tolist(), "targets": self.targets.tolist()}


def _check_support(d: WeightedDensity, normals: np.ndarray) -> list:
    """Indices of normals lying on the density's zero set (admitted, but flagged).

    Normals outside the support cone are rejected outright.
    """
    margin = math.sin(SUPPORT_MARGIN)
    if d.kind == "power_cone":
        bad = np.flatnonzero(normals @ d.theta < margin)
        if len(bad):
            raise DomainError(f"normals {bad.tolist()} are not interior to the support cone")
    elif d.kind == "custom" and d.support is not None:
        bad = np.flatnonzero(~d.in_support(normals))
        if len(bad):
            raise DomainError(f"normals {bad.tolist()} are outside the declared support")
    gap = []
    for v in d.zero_hyperplanes():
        gap += np.flatnonzero(np.abs(normals @ v) < margin).tolist()
    return sorted(set(gap))


@dataclass
class SolverReport:
    offsets: np.ndarray
    residuals: np.ndarray
    iterations: int
    objective_trace: list
    scale: float
    status: str
    evaluations: int = 0
    hypothesis_gap: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max())

    def body(self, normals) -> SymmetricPolytope:
        return from_halfspaces(normals, self.offsets)

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "offsets": self.offsets.tolist(),
            "residuals": self.residuals.tolist(),
            "max_residual": self.max_residual,
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "scale": self.scale,
            "objective_trace": list(self.objective_trace),
            "hypothesis_gap": list(self.hypothesis_gap),
        }


class _State:
    """Pair-reduced evaluation of face measures and ``mu`` at offsets ``a``."""

    def __init__(self, problem: MinkowskiProblem, spec: QuadratureSpec):
        self.problem = problem
        self.spec = spec
        N = problem.N
        idx = np.arange(N)
        self.reps = idx[idx < problem.antipode]
        self.partner = problem.antipode[self.reps]
        self.k = problem.n + problem.density.r
        self.f = problem.targets[self.reps]
        self.evaluations = 0

    def full(self, a: np.ndarray) -> np.ndarray:
        out = np.empty(self.problem.N)
        out[self.reps] = a
        out[self.partner] = a
        return out

    def faces(self, a: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        P = SymmetricPolytope(self.problem.normals, self.full(a))
        return face_measures(P, self.problem.density, self.spec)[self.reps]

    def mu(self, a: np.ndarray, F: np.ndarray) -> float:
        return 2.0 * float(np.dot(a, F)) / self.k

    def phi(self, a: np.ndarray) -> float:
        return 2.0 * float(np.dot(self.f, a)) / self.k

    def normalize(self, a: np.ndarray, F: np.ndarray):
        """Rescale to ``mu = 1``; faces scale by ``t^(k-1)`` so no rebuild is needed."""
        mu = self.mu(a, F)
        if mu <= 0:
            raise DegenerateInput("current body has zero measure")
        t = mu ** (-1.0 / self.k)
        return a * t, F * t ** (self.k - 1.0)

    def residuals(self, a: np.ndarray, F: np.ndarray) -> np.ndarray:
        return np.abs(self.f - self.phi(a) * F) / self.f


def _newton_step(state: _State, a: np.ndarray, F: np.ndarray, lam: float) -> np.ndarray:
    """Damped Newton direction (in log-offset units) at ``mu = 1``.

    The merit function is ``k Phi / Phi(a) - log mu`` with ``k = n + r``;
    the weight ``k / Phi(a)`` makes the current scale stationary, so the
    step changes shape rather than size.
    """
    h = len(a)
    g = 2.0 * state.f / state.phi(a) - 2.0 * F
    J = np.empty((h, h))
    for q in range(h):
        step = FD_STEP * a[q]
        b = a.copy()
        b[q] += step
        J[:, q] = 2.0 * (state.faces(b) - F) / step
    J = 0.5 * (J + J.T)
    H = -J + 4.0 * np.outer(F, F)
    # work in log coordinates: x = log a
    Hx = a[:, None] * H * a[None, :]
    gx = a * g
    diag = np.maximum(np.diag(Hx), 1e-12 * max(1.0, float(np.abs(np.diag(Hx)).max())))
    w, V = np.linalg.eigh(Hx + lam * np.diag(diag))
    w = np.maximum(w, 1e-10 * max(w.max(), 1e-300))
    return -(V @ ((V.T @ gx) / w))


def solve(problem: MinkowskiProblem, tol: float = 1e-7, max_iter: int = 10**4, seed: Optional[int] = None,
          spec: QuadratureSpec = DEFAULT_SPEC, start: Optional[np.ndarray] = None) -> SolverReport:
    """Solve the weighted Minkowski problem for ``problem``.

    Parameters
    ----------
    tol
        Stop when ``max_i |f_i - Phi(A) mu_{n-1}(F_i)| / f_i < tol``.
    seed
        If given (and ``start`` is not), the initial pair offsets are drawn
        log-uniformly from ``[0.5, 2]``; otherwise all offsets start at 1.
    start
        Explicit initial offsets, one per antipodal pair (in the order of
        the first member of each pair).

    Raises
    ------
    FaceCollapsed
        A face stayed empty for 100 consecutive iterations.
    NoConvergence
        ``max_iter`` was reached.
    """
    state = _State(problem, spec)
    npair = len(state.reps)
    if start is not None:
        a = np.asarray(start, dtype=float).copy()
    elif seed is not None:
        a = np.exp(np.random.default_rng(seed).uniform(math.log(0.5), math.log(2.0), npair))
    else:
        a = np.ones(npair)
    a, F = state.normalize(a, state.faces(a))
    trace = [state.phi(a)]
    empty_run = np.zeros(npair, dtype=int)
    lam = 1e-3
    it = 0
    status = "no-convergence"
    while it < max_iter:
        res = state.residuals(a, F)
        empty = F <= 0.0
        empty_run = np.where(empty, empty_run + 1, 0)
        if np.any(empty_run >= EMPTY_PATIENCE):
            bad = state.reps[empty_run >= EMPTY_PATIENCE].tolist()
            raise FaceCollapsed(f"faces {bad} empty for {EMPTY_PATIENCE} iterations")
        if not empty.any() and res.max() < tol:
            status = "converged"
            break
        it += 1
        if empty.any():
            # undefined update on empty faces: pull them in and retry
            b = np.where(empty, a * EMPTY_PULL, a)
            a, F = state.normalize(b, state.faces(b))
            trace.append(state.phi(a))
            continue
        s = _newton_step(state, a, F, lam)
        tau = 1.0
        phi0 = trace[-1]
        accepted = False
        while tau > MIN_TAU:
            b = a * np.exp(tau * s)
            Fb = state.faces(b)
            if np.any(Fb <= 0.0) and not np.any(F <= 0.0) and tau > 1e-3:
                tau *= 0.5
                continue
            b, Fb = state.normalize(b, Fb)
            if state.phi(b) <= phi0 * (1.0 + 1e-15):
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            # no decrease representable in floating point: we are at the minimum
            if res.max() < 10.0 * tol:
                status = "converged"
                break
            lam *= 10.0
            continue
        a, F = b, Fb
        trace.append(state.phi(a))
        lam = max(lam * 0.3, 1e-8) if tau == 1.0 else min(lam * 3.0, 1e6)
    else:
        raise NoConvergence(f"no convergence after {max_iter} iterations (residual {res.max():.2e})")
    phi = state.phi(a)
    m = phi ** (1.0 / (state.k - 1.0))
    beta = state.full(a * m)
    final = face_measures(SymmetricPolytope(problem.normals, beta), problem.density, spec)
    state.evaluations += 1
    residuals = np.abs(problem.targets - final) / problem.targets
    if residuals.max() >= 10.0 * tol:
        raise NoConvergence(f"recomputed face measures off by {residuals.max():.2e}")
    return SolverReport(beta, residuals, it, trace, m, status, state.evaluations, problem.hypothesis_gap)


@dataclass
class UniquenessReport:
    reports: list
    distance: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.distance < self.tolerance

    def to_dict(self) -> dict:
        return {"distance": self.distance, "tolerance": self.tolerance, "passed": self.passed,
                "starts": [r.to_dict() for r in self.reports]}


def uniqueness_probe(problem: MinkowskiProblem, starts: int = 5, tol: float = 1e-7, seed: int = 0,
                     spec: QuadratureSpec = DEFAULT_SPEC) -> UniquenessReport:
    """Solve from ``starts`` random initial bodies and compare the solutions.

    The distance is ``max_{pairs} max_i |beta_i - beta'_i| / max_i beta_i``.
    """
    seeds = np.random.SeedSequence(seed).generate_state(starts)
    reps = [solve(problem, tol=tol, seed=int(s), spec=spec) for s in seeds]
    dist = 0.0
    for i in range(starts):
        for j in range(i + 1, starts):
            b, c = reps[i].offsets, reps[j].offsets
            dist = max(dist, float(np.abs(b - c).max() / max(b.max(), c.max())))
    return UniquenessReport(reps, dist, 10.0 * tol)


@dataclass
class RoundTripReport:
    solver: SolverReport
    original: np.ndarray
    error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.error < self.tolerance

    def to_dict(self) -> dict:
        return {"error": self.error, "tolerance": self.tolerance, "passed": self.passed, "solver": self.solver.to_dict()}


def round_trip(P: SymmetricPolytope, d: WeightedDensity, tol: float = 1e-7, seed: Optional[int] = None,
               spec: QuadratureSpec = DEFAULT_SPEC) -> RoundTripReport:
    """Use the face measures of ``P`` as targets and recover its offsets."""
    if any(f.empty for f in P.faces):
        raise DegenerateInput("round trip needs every face of P to be nonempty")
    rep = solve(MinkowskiProblem.from_body(P, d, spec), tol=tol, seed=seed, spec=spec)
    err = float(np.max(np.abs(rep.offsets - P.offsets) / P.offsets))
    return RoundTripReport(rep, P.offsets.copy(), err, 10.0 * tol)
