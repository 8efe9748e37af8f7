import math

import numpy as np
import pytest

from weighted_minkowski.density import (
    ConcavityProfile,
    abs_linear,
    ball_indicator,
    check_evenness,
    check_homogeneity,
    check_implied_concavity,
    check_p_concavity,
    custom,
    evaluate,
    from_dict,
    gaussian,
    lebesgue,
    named,
    power_cone,
)
from weighted_minkowski.errors import CheckFailed, NonHomogeneousDensity


def test_pointwise_values():
    assert evaluate(named("X1", 2), [2.0, 5.0]) == 2.0
    assert evaluate(lebesgue(), [0.3, -7.0]) == 1.0
    assert evaluate(power_cone([1, 0], 2.0), [3.0, 0.0]) == 9.0
    assert evaluate(power_cone([1, 0], 2.0), [-3.0, 1.0]) == 0.0
    assert evaluate(gaussian(), [0.0, 0.0]) == pytest.approx(1.0 / (2.0 * math.pi))
    assert evaluate(ball_indicator(1.0), [[0.5, 0.5], [1.0, 0.5]]).tolist() == [1.0, 0.0]


def test_vectorized_shape():
    vals = evaluate(named("X1", 3), np.arange(12.0).reshape(4, 3))
    assert vals.shape == (4,)
    np.testing.assert_allclose(vals, [0, 3, 6, 9])


def test_declared_degrees():
    assert named("X1", 2).r == 1.0 and named("X1", 2).p == 1.0
    pc = power_cone([0, 1], 3.0)
    assert pc.r == 3.0 and pc.p == pytest.approx(1 / 3) and not pc.even
    assert ConcavityProfile.of(named("X1", 3), 3).q == pytest.approx(0.25)
    assert ConcavityProfile.of(lebesgue(), 2).q == pytest.approx(0.5)
    with pytest.raises(NonHomogeneousDensity):
        gaussian().require_homogeneous()


def test_homogeneity_check():
    assert check_homogeneity(named("X1", 2), 1000, 7).value <= 1e-12
    assert check_homogeneity(lebesgue(), 1000, 7, dim=2).value == 0.0
    fake = custom(lambda x: np.abs(x[:, 0]) + 1.0, r=1.0, p=1.0, half_space_normal=[1, 0], name="shifted")
    rep = check_homogeneity(fake, 1000, 7, dim=2)
    assert rep.value > 1e-9 and not rep.passed
    with pytest.raises(CheckFailed):
        rep.require()


def test_p_concavity_check():
    assert check_p_concavity(named("X1", 2), 1000, 0).passed
    assert check_p_concavity(power_cone([1, 0], 2.0), 1000, 0).passed
    square_ = custom(lambda x: x[:, 0] ** 2, r=2.0, p=1.0, half_space_normal=[1, 0], name="x1^2")
    assert not check_p_concavity(square_, 1000, 0, dim=2).passed
    assert check_p_concavity(lebesgue(), 10, 0).passed


def test_implied_concavity():
    assert check_implied_concavity(power_cone([1, 0, 0], 3.0), 10_000, 1).passed
    assert check_implied_concavity(named("X1", 2), 10_000, 1).passed
    d = named("X1", 2)
    e1 = np.array([1.0, 0.0])
    assert evaluate(d, e1 + e1) == pytest.approx((evaluate(d, e1) + evaluate(d, e1)))


def test_evenness():
    assert check_evenness(named("X1", 2), 1000, 0).passed
    assert check_evenness(power_cone([1, 0], 1.0), 1000, 0).passed  # declared odd, observed odd
    assert check_evenness(gaussian(), 100, 0, dim=3).passed


def test_roundtrip_dict():
    for d in (lebesgue(), named("X1", 3), power_cone([0, 1], 0.5), gaussian(), ball_indicator(2.0)):
        e = from_dict(d.to_dict())
        assert e.kind == d.kind and e.label == d.label


def test_named_rejects_unknown():
    with pytest.raises(KeyError):
        named("X7", 2)


def test_abs_linear_normalizes_theta():
    d = abs_linear([3.0, 4.0])
    np.testing.assert_allclose(d.theta, [0.6, 0.8])
    assert evaluate(d, [1.0, 1.0]) == pytest.approx(1.4)
