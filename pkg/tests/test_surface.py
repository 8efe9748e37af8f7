import math

import numpy as np
import pytest

from weighted_minkowski.body import random_symmetric_polytope, scale
from weighted_minkowski.density import gaussian, named
from weighted_minkowski.errors import NonHomogeneousDensity
from weighted_minkowski.surface import cosine_transform, perturbation_continuity_check, sigma, sigma_scaled


def test_atoms(sq2, dia2, x1, leb):
    s = sigma(sq2, x1)
    np.testing.assert_allclose(s.directions, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    np.testing.assert_allclose(s.weights, [2, 1, 2, 1], atol=1e-12)
    np.testing.assert_allclose(sigma(sq2, leb).weights, 2.0)
    np.testing.assert_allclose(sigma(dia2, leb).weights, math.sqrt(2))
    assert s.total_mass == pytest.approx(6.0)
    np.testing.assert_allclose(s.barycenter, 0.0, atol=1e-12)


def test_lebesgue_atoms_are_face_volumes(rng):
    P = random_symmetric_polytope(rng, 3)
    np.testing.assert_allclose(sigma(P, named("LEB", 3)).weights, [f.volume for f in P.faces], atol=1e-12)


def test_evenness_of_atoms(rng):
    P = random_symmetric_polytope(rng, 3)
    for d in (named("X1", 3), gaussian()):
        w = sigma(P, d).weights
        np.testing.assert_allclose(w, w[P.antipode], atol=1e-12)


def test_scaling_law(sq2, x1):
    s2 = sigma_scaled(sq2, x1, 2.0)
    # face {x_1 = 2} x [-2, 2] with g = 2 carries 8; weights scale by t^(n+r-1) = 4
    np.testing.assert_allclose(s2.weights, [8, 4, 8, 4], atol=1e-12)
    np.testing.assert_allclose(sigma(scale(sq2, 2.0), x1).weights, s2.weights, atol=1e-12)
    np.testing.assert_allclose(sigma_scaled(sq2, x1, 1.0).weights, sigma(sq2, x1).weights)
    with pytest.raises(NonHomogeneousDensity):
        sigma_scaled(sq2, gaussian(), 2.0)


def test_cosine_transform(sq2, x1, leb):
    s = sigma(sq2, x1)
    assert cosine_transform(s, [1.0, 0.0]) == pytest.approx(4.0)
    assert cosine_transform(s, [0.0, 1.0]) == pytest.approx(2.0)
    # Cauchy: half the cosine transform of the classical measure is the projection length
    assert 0.5 * cosine_transform(sigma(sq2, leb), [1.0, 0.0]) == pytest.approx(2.0)
    np.testing.assert_allclose(cosine_transform(s, np.eye(2)), [4.0, 2.0])


def test_integrate_and_exports(sq2, x1):
    s = sigma(sq2, x1)
    assert s.integrate(lambda u: np.abs(u[:, 0])) == pytest.approx(4.0)
    rows = s.to_csv().splitlines()
    assert rows[0] == "u1,u2,weight" and len(rows) == 5
    assert len(s.to_dict()["atoms"]) == 4


def test_continuity_trend(sq2, x1, leb):
    rep = perturbation_continuity_check(sq2, x1, lambda u: np.abs(u[:, 0]), seed=0)
    assert rep.monotone
    g = np.asarray(rep.gaps)
    # Lipschitz behaviour: halving eps halves the gap
    np.testing.assert_allclose(g[1:] / g[:-1], 0.5, atol=0.05)
    rep0 = perturbation_continuity_check(sq2, leb, lambda u: np.ones(len(u)), epsilons=(0.0,))
    assert rep0.gaps == [0.0]
    with pytest.raises(ValueError):
        perturbation_continuity_check(sq2, leb, lambda u: np.ones(len(u)), epsilons=(0.1,))
