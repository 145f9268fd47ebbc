import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypbubble.errors import ConfigError
from hypbubble.hypgeom import (BallPoint, ModelParams, ball_radius, cos_angle, gradient_angle_cos,
                               hyp_distance, metric_factor, radial_coord, translate)

rhos = st.floats(0.0, 4.0)
dirs = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
    lambda v: np.linalg.norm(v) > 1e-3)


def point(rho, d):
    return BallPoint.from_polar(rho, d).coords


@settings(max_examples=200, deadline=None)
@given(rhos, dirs, rhos, dirs, rhos, dirs)
def test_translation_is_isometry(r1, d1, r2, d2, r3, d3):
    b, x, y = point(r1, d1), point(r2, d2), point(r3, d3)
    d = hyp_distance(x, y)
    assert hyp_distance(translate(b, x), translate(b, y)) == pytest.approx(d, rel=1e-11, abs=1e-11)


@settings(max_examples=200, deadline=None)
@given(rhos, dirs, rhos, dirs)
def test_opposite_translation_is_inverse(r1, d1, r2, d2):
    b, x = point(r1, d1), point(r2, d2)
    assert np.allclose(translate(-b, translate(b, x)), x, rtol=0, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(rhos, dirs, rhos, dirs, rhos, dirs)
def test_triangle_inequality(r1, d1, r2, d2, r3, d3):
    x, y, z = point(r1, d1), point(r2, d2), point(r3, d3)
    assert hyp_distance(x, y) <= hyp_distance(x, z) + hyp_distance(z, y) + 1e-12


def test_translation_moves_origin_to_b():
    b = point(2.0, [0.3, -1, 0.2])
    assert np.allclose(translate(b, np.zeros(3)), b, atol=1e-15)


@given(st.floats(0.0, 20.0))
def test_radial_roundtrip(rho):
    assert radial_coord(ball_radius(rho)) == pytest.approx(rho, rel=1e-9, abs=1e-12)


def test_distance_to_origin():
    x = np.array([0.3, 0.4, 0.0])
    assert hyp_distance(x, np.zeros(3)) == pytest.approx(2 * math.atanh(0.5), rel=1e-14)
    assert metric_factor(np.zeros(3)) == 2.0


def test_exact_radial_arithmetic_far_out():
    e = np.array([1.0, 0, 0])
    a, b = BallPoint.from_polar(20.0, e), BallPoint.from_polar(25.0, e)
    assert hyp_distance(a, b) == 5.0
    assert hyp_distance(a, -b) == 45.0


def test_points_outside_ball_rejected():
    with pytest.raises(ConfigError):
        hyp_distance(np.array([1.0, 0, 0]), np.zeros(3))


def test_cos_angle_right_triangle():
    # hyperbolic Pythagoras: cosh c = cosh a cosh b for a right angle
    a, b = 1.3, 2.1
    c = math.acosh(math.cosh(a) * math.cosh(b))
    assert cos_angle(a, b, c) == pytest.approx(0.0, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 8), st.floats(0.05, 8), st.floats(0.01, 0.99))
def test_cos_angle_matches_law_of_cosines(d1, d2, frac):
    D = abs(d1 - d2) + frac * (d1 + d2 - abs(d1 - d2))
    direct = (math.cosh(d1) * math.cosh(d2) - math.cosh(D)) / (math.sinh(d1) * math.sinh(d2))
    assert cos_angle(d1, d2, D) == pytest.approx(direct, abs=1e-8)


def _grad_fd(f, x, h=1e-6):
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


@pytest.mark.parametrize("seed", range(5))
def test_gradient_angle_against_finite_differences(seed):
    rng = np.random.default_rng(seed)
    x, b1, b2 = (point(rng.uniform(0.2, 2.5), rng.standard_normal(3)) for _ in range(3))
    g1 = _grad_fd(lambda y: hyp_distance(y, b1), x)
    g2 = _grad_fd(lambda y: hyp_distance(y, b2), x)
    fd = g1 @ g2 / (np.linalg.norm(g1) * np.linalg.norm(g2))
    assert gradient_angle_cos(x, b1, b2) == pytest.approx(fd, abs=1e-7)
    # |grad d|_g = 1, i.e. the Euclidean gradient has norm equal to the conformal factor
    assert np.linalg.norm(g1) == pytest.approx(metric_factor(x), rel=1e-7)


def test_gradient_angle_degenerate():
    b = point(1.0, [1, 0, 0])
    with pytest.raises(ConfigError):
        gradient_angle_cos(b, b, np.zeros(3))


def test_model_params_validation():
    with pytest.raises(ConfigError, match="bottom of the spectrum"):
        ModelParams(3, 3.0, 1.0)
    with pytest.raises(ConfigError):
        ModelParams(3, 5.0)
    with pytest.raises(ConfigError):
        ModelParams(3, 1.0)
    P = ModelParams(3, 2.5, 0.5)
    assert P.decay_rate == pytest.approx(1 + math.sqrt(0.5))
    assert P.decay_rate + P.slow_rate == pytest.approx(2.0)
    assert ModelParams(2, 3.0, 0.23).uniqueness_flag
    assert not ModelParams(2, 3.0, 0.2).uniqueness_flag
