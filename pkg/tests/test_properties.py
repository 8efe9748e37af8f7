"""Property tests: scaling laws, evenness, cone formula and monotonicity."""
import numpy as np
from hypothesis import given, settings, strategies as st

from weighted_minkowski.body import random_symmetric_polytope, scale
from weighted_minkowski.density import named
from weighted_minkowski.integrate import body_measure_cone, face_measures
from weighted_minkowski.projection import P_mu, sphere_directions
from weighted_minkowski.surface import sigma

seeds = st.integers(0, 2**32 - 1)
dims = st.sampled_from([2, 3])
names = st.sampled_from(["LEB", "X1"])
factors = st.floats(0.2, 5.0)

SETTINGS = settings(max_examples=25, deadline=None)


@SETTINGS
@given(seeds, dims, names, factors)
def test_measure_scales_by_degree(seed, n, name, t):
    d = named(name, n)
    P = random_symmetric_polytope(np.random.default_rng(seed), n)
    assert np.isclose(body_measure_cone(scale(P, t), d), t ** (n + d.r) * body_measure_cone(P, d), rtol=1e-10)


@SETTINGS
@given(seeds, dims, names)
def test_face_measures_are_even(seed, n, name):
    P = random_symmetric_polytope(np.random.default_rng(seed), n)
    w = face_measures(P, named(name, n))
    assert np.allclose(w, w[P.antipode], rtol=1e-10, atol=1e-14)


@SETTINGS
@given(seeds)
def test_lebesgue_cone_formula_is_volume(seed):
    P = random_symmetric_polytope(np.random.default_rng(seed), 3)
    assert np.isclose(body_measure_cone(P, named("LEB", 3)), P.volume, rtol=1e-10)


@SETTINGS
@given(seeds, dims, names, st.floats(0.3, 0.99))
def test_measure_and_projection_are_monotone(seed, n, name, t):
    d = named(name, n)
    P = random_symmetric_polytope(np.random.default_rng(seed), n)
    assert body_measure_cone(scale(P, t), d) < body_measure_cone(P, d)
    th = sphere_directions(n, 16, seed=seed % 1000)
    assert np.all(P_mu(scale(P, t), d, th) <= P_mu(P, d, th) + 1e-12)


@SETTINGS
@given(seeds, dims, names)
def test_surface_mass_is_barycentered(seed, n, name):
    s = sigma(random_symmetric_polytope(np.random.default_rng(seed), n), named(name, n))
    assert np.allclose(s.barycenter, 0.0, atol=1e-10 * max(1.0, s.total_mass))
