import math

import numpy as np
import pytest

from hypbubble.energy import BubbleSum, CoefficientField, evaluate_energy, hlambda_inner
from hypbubble.errors import ConfigError
from hypbubble.hypgeom import BallPoint, ModelParams, hyp_distance
from hypbubble.minmax import (K_CENTER, PathConfig, center_of_mass, h_star, k_estimate,
                              minmax_bracket)

E = np.array([0.0, 0.0, 1.0])
P = ModelParams(3, 3.0)


def test_k_is_one_half():
    k, r = k_estimate()
    assert k == pytest.approx(0.5, rel=1e-12)
    assert r < 1e-6
    assert K_CENTER == 0.5


def test_center_of_mass_of_origin_bubble(W):
    assert np.allclose(center_of_mass(BubbleSum.single(W)).coords, 0.0, atol=1e-10)


@pytest.mark.parametrize("rho", [0.5, 3.0, 8.0, 20.0])
def test_center_of_mass_inside_unit_ball(W, rho):
    m = center_of_mass(BubbleSum.single(W, BallPoint.from_polar(rho, E)))
    assert m.norm <= math.tanh(0.5) + 1e-12
    assert hyp_distance(m.coords, np.zeros(3)) <= 1.0 + 1e-12
    assert m.coords[2] > 0 and np.allclose(m.coords[:2], 0.0)


def test_center_of_mass_far_limit(W):
    y = BallPoint.from_polar(20.0, E)
    m = center_of_mass(BubbleSum.single(W, y))
    limit = math.tanh(0.5) * y.coords / (K_CENTER * 20.0)
    assert np.linalg.norm(m.coords - limit) <= 1e-2


def test_center_of_mass_odd(W):
    a = center_of_mass(BubbleSum.single(W, BallPoint.from_polar(2.0, E)))
    b = center_of_mass(BubbleSum.single(W, BallPoint.from_polar(2.0, -E)))
    assert np.allclose(a.coords, -b.coords, atol=1e-12)


def test_h_star_normalized(W):
    x1, x2 = BallPoint.from_polar(12.0, E), BallPoint.from_polar(2.0, E)
    u = h_star(x1, x2, 1.0, W)
    assert hlambda_inner(u, u) == pytest.approx(1.0, abs=1e-8)
    v = h_star(x1, x2, 0.5, W)
    assert hlambda_inner(v, v) == pytest.approx(1.0, abs=1e-8)
    raw = BubbleSum(W, ((x1, 0.5), (x2, 0.5)))
    assert evaluate_energy(v).J == pytest.approx(evaluate_energy(raw).J, rel=1e-10)
    pts = np.array([BallPoint.from_polar(r, E).coords for r in np.linspace(0, 15, 31)])
    assert np.all(v(pts) > 0)
    with pytest.raises(ConfigError):
        h_star(x1, x2, 1.5, W)


def test_path_config_defaults():
    cfg = PathConfig(P, R2=12.0)
    assert cfg.x2_rho == pytest.approx(12.0 - 12.0 ** (1.1 / 1.2))
    with pytest.raises(ConfigError):
        PathConfig(P, R2=12.0, x2_rho=13.0)
    with pytest.raises(ConfigError):
        PathConfig(P, boundary_samples=0)


def test_bracket_without_defect(W):
    rep = minmax_bracket(PathConfig(P, CoefficientField.unit(), R2=12.0,
                                    t_grid=list(np.linspace(0, 1, 11)), boundary_samples=3), W)
    assert rep.bracket_ok and rep.all_below_S2
    assert rep.S1 < rep.path_max_J < rep.S2
    assert rep.sign_change and rep.interior_max
    assert max(rep.boundary_J) == pytest.approx(rep.S1, rel=1e-3)
