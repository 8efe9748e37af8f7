import math

import numpy as np
import pytest

from weighted_minkowski.body import cross_polytope, cube, diamond, regular_polygon, scale, square
from weighted_minkowski.density import gaussian, named
from weighted_minkowski.errors import NonHomogeneousDensity, RejectedPair
from weighted_minkowski.shephard import (
    StabilityConstant,
    ball_pair_regression,
    ball_projection_closed_form,
    counterexample_verify,
    critical_directions,
    dominance,
    separation_report,
    shephard_batch,
    shephard_verify,
    stability_batch,
    stability_check,
    unit_ball_volume,
)


def test_unit_ball_volume():
    assert unit_ball_volume(1) == pytest.approx(2.0)
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_dominance_diamond_square(sq2, dia2, x1):
    dom = dominance(dia2, sq2, x1)
    # equality along the diagonals, found through the critical directions
    assert dom.delta == pytest.approx(0.0, abs=1e-12)
    assert len(critical_directions(dia2, sq2)) > 0


def test_dominance_scaled_square(sq2, x1):
    dom = dominance(scale(sq2, 0.9), sq2, x1)
    # (1 - 0.9^2) times the minimum of (4|t1| + 2|t2|)/3, attained at e2
    assert dom.delta == pytest.approx(0.19 * 2 / 3, abs=1e-12)


def test_shephard_verdicts(sq2, dia2, x1, leb):
    assert shephard_verify(dia2, sq2, x1).verdict == "theorem-consistent"
    assert shephard_verify(scale(sq2, 0.9), sq2, leb).verdict == "theorem-consistent"
    assert shephard_verify(scale(sq2, 1.1), sq2, x1).verdict == "hypotheses not met"
    o = cross_polytope(3)
    assert shephard_verify(scale(o, 0.5), o, named("LEB", 3)).verdict == "hypotheses not met"
    with pytest.raises(NonHomogeneousDensity):
        shephard_verify(dia2, sq2, gaussian())


def test_counterexample_rejections(sq2):
    d = named("LEB", 3)
    o = cross_polytope(3)
    with pytest.raises(RejectedPair, match="zonotope"):
        counterexample_verify(scale(cube(3), 0.5), cube(3), d)
    with pytest.raises(RejectedPair, match="dominance"):
        counterexample_verify(cube(3), o, d)
    with pytest.raises(RejectedPair, match="does not exceed"):
        counterexample_verify(scale(o, 0.9), o, d)


def test_stability(sq2, x1):
    rep = stability_check(scale(sq2, 1.01), sq2, x1)
    # eps = (1.01^2 - 1) times the maximum sqrt(20)/3 of P_L
    assert rep.eps == pytest.approx(0.0201 * math.sqrt(20) / 3, rel=1e-4)
    assert rep.passed and rep.slack > 0
    c = StabilityConstant.of(sq2, x1)
    assert c.C == pytest.approx(math.pi / 2 * math.sqrt(2) * 2 ** (-1 / 3))


def test_separation(sq2, x1, leb):
    rep = separation_report(scale(sq2, 0.9), sq2, x1)
    assert rep.applicable and rep.ratio == pytest.approx(2.3811015779523, rel=1e-9)
    assert not separation_report(sq2, sq2, leb).applicable


def test_ball_closed_form():
    assert ball_projection_closed_form(2, 0.5) == pytest.approx(1.0)
    assert ball_projection_closed_form(2, 2.0) == pytest.approx(1.0)
    assert ball_projection_closed_form(3, 0.5) == pytest.approx(math.pi / 4)


def test_ball_regression():
    rep = ball_pair_regression(seed=0)
    assert rep.dominance_holds and rep.reversed_measures and rep.passed


def test_batches():
    rows = shephard_batch(3, dims=(2,), seed=1)
    assert len(rows) == 6 and all(r["verdict"] != "violated" for r in rows)
    assert rows == shephard_batch(3, dims=(2,), seed=1)
    srows = stability_batch(4, named("X1", 2), seed=2)
    assert len(srows) == 4 and all(r["passed"] for r in srows)


def test_polygon_pairs_are_consistent(rng, leb):
    # every symmetric polygon is a zonotope, so the comparison holds in the plane
    L = regular_polygon(6)
    for t in (0.5, 0.8, 0.99):
        assert shephard_verify(scale(regular_polygon(10), t), L, leb).verdict != "violated"
