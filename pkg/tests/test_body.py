import math

import numpy as np
import pytest

from weighted_minkowski.body import (
    Zonotope,
    ball_polytope,
    cross_polytope,
    cube,
    from_halfspaces,
    from_pairs,
    from_points,
    is_zonotope,
    linear_image,
    minkowski_sum,
    random_rotation,
    random_symmetric_polytope,
    regular_polygon,
    scale,
    support_function,
    zonotope_realize,
)
from weighted_minkowski.errors import (
    DegenerateGenerators,
    DegenerateInput,
    DimensionTooLarge,
    UnboundedBody,
)


def _sorted(v):
    return np.array(sorted(map(tuple, np.round(v, 12))))


def test_square_vertices(sq2):
    np.testing.assert_allclose(_sorted(sq2.vertices), _sorted([[1, 1], [1, -1], [-1, 1], [-1, -1]]))
    assert sq2.volume == pytest.approx(4.0)


def test_cube_counts(cu3):
    assert len(cu3.vertices) == 8 and cu3.N == 6
    assert all(f.volume == pytest.approx(4.0) for f in cu3.faces)
    assert cu3.volume == pytest.approx(8.0)


def test_diamond_from_halfspaces():
    s = 1 / math.sqrt(2)
    u = np.array([[1, 1], [1, -1], [-1, -1], [-1, 1]]) * s
    P = from_halfspaces(u, [s] * 4)
    np.testing.assert_allclose(_sorted(P.vertices), _sorted([[1, 0], [-1, 0], [0, 1], [0, -1]]), atol=1e-12)


def test_support_function(sq2, dia2):
    assert support_function(sq2, [1.0, 0.0]) == pytest.approx(1.0)
    assert support_function(sq2, [1.0, 1.0]) == pytest.approx(2.0)
    assert support_function(dia2, [0.6, 0.8]) == pytest.approx(0.8)


def test_scale(sq2, cu3, dia2):
    np.testing.assert_allclose(np.abs(scale(sq2, 2).vertices), 2.0)
    np.testing.assert_allclose(np.abs(scale(cu3, 0.5).vertices), 0.5)
    assert np.abs(scale(dia2, 3).vertices).max() == pytest.approx(3.0)
    with pytest.raises(ValueError):
        scale(sq2, 0.0)


def test_minkowski_sums(sq2, dia2):
    S = minkowski_sum(sq2, sq2)
    np.testing.assert_allclose(np.abs(S.vertices), 2.0)
    O = minkowski_sum(sq2, dia2)
    assert O.N == 8
    expected = [[a * 2, b * 1] for a in (1, -1) for b in (1, -1)] + [[a * 1, b * 2] for a in (1, -1) for b in (1, -1)]
    np.testing.assert_allclose(_sorted(O.vertices), _sorted(expected), atol=1e-12)
    E = minkowski_sum(sq2, scale(sq2, 0.1))
    np.testing.assert_allclose(E.offsets, 1.1)


def test_minkowski_sum_dimension_limit():
    with pytest.raises(DimensionTooLarge):
        minkowski_sum(cube(4), cube(4))


def test_zonotope_certificates(cu3):
    assert is_zonotope(cu3).is_zonotope
    cert = is_zonotope(cross_polytope(3))
    assert not cert.is_zonotope and len(cert.violating_face) == 3
    assert is_zonotope(regular_polygon(5)).is_zonotope
    assert is_zonotope(cube(4)).is_zonotope
    assert not is_zonotope(cross_polytope(4)).is_zonotope


def test_zonotope_realize():
    Z = Zonotope([[1, 0], [0, 1]])
    np.testing.assert_allclose(_sorted(Z.realize().vertices), _sorted([[1, 1], [1, -1], [-1, 1], [-1, -1]]))
    C = zonotope_realize(Zonotope(np.eye(3)))
    assert C.N == 6 and C.volume == pytest.approx(8.0)
    # three generators in the plane give a hexagon
    H = zonotope_realize(Zonotope([[1, 0], [0, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]]))
    assert H.N == 6 and len(H.vertices) == 6
    with pytest.raises(DegenerateGenerators):
        zonotope_realize(Zonotope([[1, 0], [2, 0]]))


def test_zonotope_support_matches_realization(rng):
    Z = Zonotope(rng.standard_normal((4, 3)))
    P = Z.realize()
    x = rng.standard_normal((20, 3))
    np.testing.assert_allclose(P.support(x), Z.support(x), rtol=1e-10)


def test_validation_errors():
    e = np.eye(2)
    with pytest.raises(UnboundedBody):
        from_halfspaces([e[0], -e[0]], [1, 1])
    with pytest.raises(DegenerateInput):
        from_halfspaces([e[0], e[1], -e[0], -e[1]], [1, 1, 2, 1])
    with pytest.raises(DegenerateInput):
        from_halfspaces([e[0], e[1], -e[0], -e[1]], [1, 0, 1, 0])
    with pytest.raises(DegenerateInput):
        from_halfspaces([[2, 0], e[1], [-2, 0], -e[1]], [1, 1, 1, 1])
    with pytest.raises(DegenerateInput):
        from_halfspaces([e[0], e[1], [1, 1e-15], -e[0], -e[1]], [1, 1, 1, 1, 1])
    with pytest.raises(DimensionTooLarge):
        cube(5)


def test_redundant_halfspace_gives_empty_face():
    u = [[1, 0], [0, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]]
    P = from_pairs(u, [1, 1, 5])
    assert [f.empty for f in P.faces] == [False, False, True, False, False, True]
    assert P.faces[2].volume == 0.0


def test_from_points_recovers_body(rng):
    P = random_symmetric_polytope(rng, 3)
    Q = from_points(P.vertices)
    x = rng.standard_normal((50, 3))
    np.testing.assert_allclose(P.support(x), Q.support(x), atol=1e-9)


def test_linear_image_rotation(rng):
    P = random_symmetric_polytope(rng, 3)
    R = random_rotation(rng, 3)
    Q = linear_image(P, R)
    assert Q.volume == pytest.approx(P.volume, rel=1e-10)
    x = rng.standard_normal((10, 3))
    np.testing.assert_allclose(Q.support(x), P.support(x @ R), atol=1e-10)


def test_ball_polytope_circumscribes():
    Q = ball_polytope(2, 32)
    assert Q.N == 64
    assert np.all(Q.offsets == 1.0)
    assert Q.circumradius == pytest.approx(1 / math.cos(math.pi / 64))
    B3 = ball_polytope(3, 20)
    assert np.all(np.linalg.norm(B3.vertices, axis=1) >= 1.0 - 1e-12)


def test_four_dimensional_cube():
    C = cube(4)
    assert len(C.vertices) == 16 and C.volume == pytest.approx(16.0)
