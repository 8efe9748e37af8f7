import math

import numpy as np
import pytest
from scipy import stats

from weighted_minkowski.body import cross_polytope, cube, random_symmetric_polytope, scale, simplex_volumes
from weighted_minkowski.density import abs_linear, ball_indicator, custom, gaussian, named, power_cone
from weighted_minkowski.errors import DomainError, NonHomogeneousDensity
from weighted_minkowski.integrate import (
    QuadratureSpec,
    body_measure,
    body_measure_cone,
    body_measure_mc,
    brunn_minkowski_check,
    face_measures,
    gaussian_body_measure,
    gaussian_cdf,
    gaussian_quantile,
    integrate_linear_power,
    integrate_on_simplices,
    mc_linear_estimates,
    power_mean,
    simplex_rule,
    split_simplex,
)

PSI1 = 0.8413447460685429  # standard normal CDF at 1


def test_fixture_face_measures(sq2, cu3, dia2, x1, x1_3, leb):
    np.testing.assert_allclose(face_measures(sq2, x1), [2, 1, 2, 1], atol=1e-12)
    np.testing.assert_allclose(face_measures(sq2, leb), [2, 2, 2, 2], atol=1e-12)
    np.testing.assert_allclose(face_measures(cu3, x1_3), [4, 2, 2, 4, 2, 2], atol=1e-12)
    np.testing.assert_allclose(face_measures(dia2, leb), [math.sqrt(2)] * 4, atol=1e-12)
    np.testing.assert_allclose(face_measures(dia2, x1), [math.sqrt(2) / 2] * 4, atol=1e-12)


def test_cone_formula(sq2, cu3, dia2, x1, x1_3, leb):
    assert body_measure_cone(sq2, x1) == pytest.approx(2.0, abs=1e-12)
    assert body_measure_cone(cu3, x1_3) == pytest.approx(4.0, abs=1e-12)
    assert body_measure_cone(sq2, leb) == pytest.approx(4.0, abs=1e-12)
    assert body_measure_cone(dia2, x1) == pytest.approx(2 / 3, abs=1e-12)
    with pytest.raises(NonHomogeneousDensity):
        body_measure_cone(sq2, gaussian())


def test_cone_formula_equals_volume_for_lebesgue(rng):
    for n in (2, 3, 4):
        P = random_symmetric_polytope(rng, n, pairs=n + 2)
        assert body_measure_cone(P, named("LEB", n)) == pytest.approx(P.volume, rel=1e-12)


def test_power_cone_integer_exact():
    # ∫_{[-1,1]^2} (x_1)_+^2 = 2/3; exact route
    P = cube(2)
    assert body_measure_cone(P, power_cone([1, 0], 2.0)) == pytest.approx(2 / 3, abs=1e-12)


def test_split_simplex_preserves_volume(rng):
    T = rng.standard_normal((4, 3))
    pos, neg = split_simplex(T, np.array([0.0, 0.0, 1.0]))
    total = simplex_volumes(np.array(pos)).sum() + simplex_volumes(np.array(neg)).sum()
    assert total == pytest.approx(simplex_volumes(T[None])[0], rel=1e-12)
    assert all(np.all(p @ [0, 0, 1] >= -1e-12) for p in pos)


def test_linear_power_integral_matches_rule(rng):
    v = np.array([0.3, -0.7])
    T = rng.standard_normal((3, 2))
    T -= np.min(T @ v) * v / (v @ v) - 0.1 * v  # move the triangle into {<x, v> > 0}
    exact = integrate_linear_power(T[None], v, 3)
    rule = integrate_on_simplices(lambda x: (x @ v) ** 3, [T], order=4)
    assert exact == pytest.approx(rule, rel=1e-12)


def test_simplex_rule_weights_sum_to_one():
    for m in (1, 2, 3):
        pts, w = simplex_rule(m, 5)
        assert w.sum() == pytest.approx(1.0, abs=1e-13)


def test_gaussian_cdf_and_quantile():
    assert gaussian_cdf(0.0) == 0.5
    assert gaussian_cdf(1.0) == pytest.approx(PSI1, abs=1e-15)
    assert gaussian_quantile(0.5) == pytest.approx(0.0, abs=1e-14)
    for u in (1e-12, 0.01, 0.3, 0.9, 1 - 1e-10):
        assert gaussian_quantile(u) == pytest.approx(stats.norm.ppf(u), rel=1e-10, abs=1e-12)
    with pytest.raises(DomainError):
        gaussian_quantile(1.0)


def test_gaussian_face_measures_product_forms():
    phi1 = math.exp(-0.5) / math.sqrt(2 * math.pi)
    m = 2 * PSI1 - 1
    np.testing.assert_allclose(face_measures(cube(2), gaussian()), phi1 * m, rtol=1e-10)
    np.testing.assert_allclose(face_measures(cube(3), gaussian()), phi1 * m**2, rtol=1e-10)
    np.testing.assert_allclose(face_measures(cube(4), gaussian()), phi1 * m**3, rtol=1e-6)


def test_mc_oracles(sq2, cu3, dia2, x1):
    leb2, leb3 = named("LEB", 2), named("LEB", 3)
    for P, d, exact in [(sq2, x1, 2.0), (cu3, leb3, 8.0), (dia2, leb2, 2.0)]:
        mc = body_measure_mc(P, d, 10**6, seed=42)
        assert mc.se == 0.0 or mc.agrees(exact)
        assert abs(mc.estimate - exact) <= max(3 * mc.se, 1e-12)
    g = gaussian_body_measure(sq2, 10**6, seed=1)
    assert g.agrees((2 * PSI1 - 1) ** 2)
    g3 = gaussian_body_measure(cu3, 10**6, seed=1)
    assert g3.agrees((2 * PSI1 - 1) ** 3)
    assert gaussian_body_measure(scale(sq2, 100), 10**4, seed=0).estimate == 1.0


def test_mc_frozen_values(sq2, x1):
    # bit-reproducible streams: these numbers are frozen
    mc = body_measure_mc(sq2, x1, 10**5, seed=42)
    again = body_measure_mc(sq2, x1, 10**5, seed=42)
    assert mc.estimate == again.estimate and mc.se == again.se
    assert body_measure_mc(sq2, x1, 10**5, seed=43).estimate != mc.estimate


def test_body_measure_dispatch(sq2, x1):
    assert body_measure(sq2, x1) == (2.0, 0.0)
    v, se = body_measure(sq2, ball_indicator(1.0), 10**5, 3)
    assert abs(v - math.pi) < 4 * se


def test_linear_estimates_share_samples(sq2, x1):
    bodies = [sq2, scale(sq2, 1.01)]
    est = mc_linear_estimates(bodies, x1, np.array([[-1.0, 1.0]]), 10**5, 0)[0]
    exact = 2.0 * (1.01**3 - 1)
    assert abs(est.estimate - exact) < 4 * est.se
    assert est.se < 0.01  # common random numbers keep the difference tight


def test_power_mean():
    assert power_mean(4.0, 1.0, 0.5, 1.0) == 2.5
    assert power_mean(4.0, 1.0, 0.5, 0.0) == pytest.approx(2.0)
    assert power_mean(4.0, 1.0, 0.5, 0.5) == pytest.approx(2.25)
    assert power_mean(4.0, 1.0, 0.5, math.inf) == 4.0


def test_brunn_minkowski_sampled(rng):
    for k in range(6):
        n = 2 + k % 2
        A, B = random_symmetric_polytope(rng, n), random_symmetric_polytope(rng, n)
        for d in (named("LEB", n), named("X1", n)):
            assert brunn_minkowski_check(A, B, d, 0.3).passed


def test_custom_density_quadrature(sq2):
    d = custom(lambda x: x[:, 0] ** 2 + x[:, 1] ** 2, even=True, name="r2")
    # faces of the square: ∫_{-1}^{1} (1 + y^2) dy = 8/3
    np.testing.assert_allclose(face_measures(sq2, d, QuadratureSpec(order=4)), 8 / 3, rtol=1e-12)
