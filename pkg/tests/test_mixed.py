import math

import numpy as np
import pytest

from weighted_minkowski.body import random_rotation, linear_image, random_symmetric_polytope, scale, square
from weighted_minkowski.density import gaussian, named
from weighted_minkowski.integrate import body_measure_cone
from weighted_minkowski.mixed import (
    FConcavity,
    f_concave_first_check,
    first_inequality_check,
    gauge,
    isoperimetric_check,
    mixed_measure,
    mixed_measure_oracle,
    richardson,
)


def test_mixed_fixtures(sq2, dia2, x1, leb):
    r = mixed_measure(sq2, sq2, x1)
    assert r.value == pytest.approx(6.0) and r.v_mu1 == pytest.approx(2.0)
    assert mixed_measure(sq2, scale(sq2, 2.0), x1).value == pytest.approx(12.0)
    assert mixed_measure(sq2, dia2, leb).value == pytest.approx(8.0)
    assert r.route == "surface-integral"


def test_self_mixed_equals_scaled_measure(rng):
    for n in (2, 3):
        K = random_symmetric_polytope(rng, n)
        for d in (named("LEB", n), named("X1", n)):
            assert mixed_measure(K, K, d).value == pytest.approx((n + d.r) * body_measure_cone(K, d), rel=1e-12)


def test_richardson_cancels_quadratic_terms():
    f = lambda h: 3.0 + 2.0 * h + 5.0 * h**2
    assert richardson([f(0.04), f(0.02), f(0.01)]) == pytest.approx(3.0, abs=1e-12)


def test_oracle_fixtures(sq2, dia2, x1, leb):
    assert mixed_measure_oracle(sq2, sq2, x1).value == pytest.approx(6.0, rel=0.02)
    assert mixed_measure_oracle(sq2, dia2, leb).value == pytest.approx(8.0, rel=0.02)
    with pytest.raises(ValueError):
        mixed_measure_oracle(sq2, sq2, x1, eps=(0.04, 0.03, 0.01))


def test_oracle_gaussian_crn(sq2, dia2):
    surf = mixed_measure(sq2, dia2, gaussian()).value
    o = mixed_measure_oracle(sq2, dia2, gaussian(), samples=10**6, seed=0)
    assert abs(o.value - surf) <= max(0.02 * surf, 3 * o.se)


def test_first_inequality(sq2, dia2, x1, leb):
    a, b = first_inequality_check(sq2, sq2, x1)
    assert abs(a.slack) < 1e-12 and abs(b.slack) < 1e-12
    a, b = first_inequality_check(sq2, dia2, leb)
    assert a.lhs == pytest.approx(8.0) and a.rhs == pytest.approx(2 * math.sqrt(8.0))
    assert a.passed and b.passed


def test_first_inequality_random(rng):
    for k in range(20):
        n = 2 + k % 2
        K, L = random_symmetric_polytope(rng, n), random_symmetric_polytope(rng, n)
        for d in (named("LEB", n), named("X1", n)):
            for rep in first_inequality_check(K, L, d):
                rep.require()


def test_ehrhard_derivative_includes_normalization():
    F = FConcavity.ehrhard()
    # (psi^{-1})'(1/2) = 1/phi(0) = sqrt(2 pi)
    assert F.dF(0.5) == pytest.approx(math.sqrt(2 * math.pi))
    assert F.inverse(F.F(0.3)) == pytest.approx(0.3)


def test_f_concave_gaussian(sq2, dia2):
    for F in (FConcavity.log(), FConcavity.ehrhard()):
        rep = f_concave_first_check(sq2, dia2, gaussian(), F, samples=10**6, seed=0)
        assert rep.passed, rep.to_dict()


def test_f_concave_power_equality(sq2, x1):
    rep = f_concave_first_check(sq2, sq2, x1, FConcavity.power(1 / 3))
    assert abs(rep.slack) < 1e-12


def test_gauge(sq2):
    np.testing.assert_allclose(gauge(sq2, np.array([[0.5, 0.2], [2.0, -3.0]])), [0.5, 3.0])


def test_isoperimetric(sq2, dia2, rng):
    rep, sL = isoperimetric_check(sq2, dia2, samples=10**6, seed=3)
    assert rep.passed and rep.detail["scale"] > 1.0
    R = linear_image(square(), random_rotation(rng, 2))
    rep, _ = isoperimetric_check(sq2, R, samples=10**6, seed=4)
    assert rep.passed
