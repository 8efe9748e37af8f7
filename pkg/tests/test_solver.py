import math

import numpy as np
import pytest

from weighted_minkowski.body import cube, random_symmetric_polytope, regular_polygon, scale, square
from weighted_minkowski.density import gaussian, named, power_cone
from weighted_minkowski.errors import DegenerateInput, DomainError, UnboundedBody, NonHomogeneousDensity
from weighted_minkowski.integrate import face_measures
from weighted_minkowski.solver import MinkowskiProblem, round_trip, solve, uniqueness_probe

E2 = [[1, 0], [0, 1], [-1, 0], [0, -1]]


def test_square_x1_recovered(x1):
    rep = solve(MinkowskiProblem(x1, E2, [2, 1, 2, 1]))
    assert rep.status == "converged"
    np.testing.assert_allclose(rep.offsets, 1.0, atol=1e-7)
    assert rep.max_residual < 1e-7
    # the e2 pair lies on the zero line of |x_1|
    assert rep.hypothesis_gap == [1, 3]


def test_square_lebesgue_recovered(leb):
    rep = solve(MinkowskiProblem(leb, E2, [4, 4, 4, 4]))
    np.testing.assert_allclose(rep.offsets, 2.0, atol=1e-6)
    assert rep.hypothesis_gap == []


def test_cube(rng):
    d = named("X1", 3)
    P = cube(3)
    rep = solve(MinkowskiProblem.from_body(P, d), seed=1)
    np.testing.assert_allclose(rep.offsets, 1.0, atol=1e-6)


def test_objective_trace_decreases(x1):
    rep = solve(MinkowskiProblem(x1, E2, [2, 1, 2, 1]), seed=5)
    trace = np.asarray(rep.objective_trace)
    assert np.all(np.diff(trace) <= 1e-12 * np.abs(trace[:-1]))


def test_scale_covariance(x1):
    base = solve(MinkowskiProblem(x1, E2, [2, 1, 2, 1]))
    # targets scale by t^(n+r-1) = t^2 when the body scales by t
    big = solve(MinkowskiProblem(x1, E2, [8, 4, 8, 4]))
    np.testing.assert_allclose(big.offsets, 2.0 * base.offsets, rtol=1e-6)


def test_round_trips(rng):
    for k in range(10):
        n = 2 + k % 2
        P = random_symmetric_polytope(rng, n)
        if any(f.empty for f in P.faces):
            continue
        for d in (named("LEB", n), named("X1", n)):
            assert round_trip(P, d, seed=k).passed


def test_uniqueness(x1):
    rep = uniqueness_probe(MinkowskiProblem(x1, E2, [2, 1, 2, 1]), starts=4, seed=3)
    assert rep.passed and rep.distance < 1e-6


def test_start_with_empty_faces(leb):
    P = regular_polygon(4)
    prob = MinkowskiProblem.from_body(P, leb)
    rep = solve(prob, start=[1.0, 5.0, 1.0, 5.0])
    np.testing.assert_allclose(rep.offsets, 1.0, atol=1e-6)


def test_recomputed_measures_match_targets(rng):
    d = named("LEB", 2)
    P = random_symmetric_polytope(rng, 2)
    while any(f.empty for f in P.faces):
        P = random_symmetric_polytope(rng, 2)
    prob = MinkowskiProblem.from_body(P, d)
    rep = solve(prob)
    np.testing.assert_allclose(face_measures(rep.body(prob.normals), d), prob.targets, rtol=1e-6)


def test_input_errors(x1, leb):
    with pytest.raises(DegenerateInput):
        MinkowskiProblem(x1, E2, [2, 1, 2, 2])
    with pytest.raises(DegenerateInput):
        MinkowskiProblem(x1, E2, [2, 0, 2, 0])
    with pytest.raises(DegenerateInput):
        MinkowskiProblem(x1, E2, [2, 1, 2])
    with pytest.raises(NonHomogeneousDensity):
        MinkowskiProblem(gaussian(), E2, [1, 1, 1, 1])
    with pytest.raises(DomainError):
        MinkowskiProblem(power_cone([1.0, 0.0], 2.0), E2, [1, 1, 1, 1])
    with pytest.raises(UnboundedBody):
        MinkowskiProblem(leb, [[1, 0], [-1, 0]], [1, 1])


def test_report_serializes(x1):
    rep = solve(MinkowskiProblem(x1, E2, [2, 1, 2, 1]))
    out = rep.to_dict()
    assert out["status"] == "converged" and len(out["offsets"]) == 4
    assert MinkowskiProblem(x1, E2, [2, 1, 2, 1]).to_dict()["targets"] == [2.0, 1.0, 2.0, 1.0]
