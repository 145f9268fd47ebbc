import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypbubble.bubble import energy_levels, norm_A
from hypbubble.energy import (BubbleNodes, BubbleSum, CoefficientField, admissible_delta_interval,
                              bubble_energy, cross_power, default_K, defect_integral,
                              delta_report, evaluate_energy, hlambda_inner, interaction,
                              l2_inner, pair_terms, ps_level, two_bubble_margin)
from hypbubble.errors import ConfigError
from hypbubble.hypgeom import BallPoint, ModelParams

E = np.array([1.0, 0.0, 0.0])


@pytest.fixture(scope="module")
def levels(W):
    return energy_levels(norm_A(W).A, W.params)


def test_coefficient_validation():
    with pytest.raises(ConfigError):
        CoefficientField.exp_defect(1.0, 2.0)
    with pytest.raises(ConfigError):
        CoefficientField.exp_defect(0.5, -1.0)
    with pytest.raises(ConfigError):
        CoefficientField.radial_table([0, 1, 2], [0.5, 0.8, 0.9])
    with pytest.raises(ConfigError):
        CoefficientField("bogus")


def test_coefficient_values():
    a = CoefficientField.exp_defect(0.5, 3.5)
    r = np.array([0.0, 1.0, 10.0])
    assert np.allclose(a(r), 1 - 0.5 * np.exp(-3.5 * r))
    assert np.all(a.defect(r) >= 0)
    assert a.decay_bound() == (0.5, 3.5)
    t = CoefficientField.radial_table([0.0, 1.0, 2.0], [0.5, 1.2, 1.0])
    assert t(5.0) == 1.0
    assert t.defect(1.0) == 0.0
    C, delta = t.decay_bound()
    assert np.all(t.defect(np.linspace(0, 2, 50)) <= C * np.exp(-delta * np.linspace(0, 2, 50)) + 1e-15)


def test_delta_window():
    P = ModelParams(3, 3.0)
    K = default_K(P)
    assert K == pytest.approx(1.5)
    assert admissible_delta_interval(P, K) == pytest.approx((5.0, 8.0))
    rep = delta_report(P, CoefficientField.exp_defect(0.5, 6.0))
    assert rep["delta_admissible"] and not rep["interval_empty"]
    assert delta_report(P, CoefficientField.unit(), K=2.9)["K_valid"]


def test_single_bubble_identities(W, levels):
    u = BubbleSum.single(W)
    rep = evaluate_energy(u)
    A = levels.A
    assert hlambda_inner(u, u) == pytest.approx(A, rel=1e-10)
    assert rep.J == pytest.approx(levels.S1, rel=1e-10)
    assert rep.I == pytest.approx(bubble_energy(A, W.params.p), rel=1e-10)
    assert bubble_energy(A, 3.0) == pytest.approx(A / 4)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(0.0, 15.0))
def test_J_is_scale_invariant(W, c, rho):
    u = BubbleSum.single(W, BallPoint.from_polar(rho, E))
    assert evaluate_energy(u.scaled(c)).J == pytest.approx(evaluate_energy(u).J, rel=1e-12)


def test_translation_leaves_J_inf_unchanged(W, levels):
    for rho in (2.0, 5.0, 10.0):
        u = BubbleSum.single(W, BallPoint.from_polar(rho, E))
        assert evaluate_energy(u).J_inf == pytest.approx(levels.S1, rel=1e-10)


def test_defect_makes_J_larger(W, levels):
    a = CoefficientField.exp_defect(0.5, 3.5)
    u = BubbleSum.single(W, BallPoint.from_polar(1.0, E))
    rep = evaluate_energy(u, a)
    assert rep.J > levels.S1
    assert defect_integral(u, a) > 0
    assert defect_integral(u, CoefficientField.unit()) == 0.0


def test_bilinear_forms_symmetric(W):
    u = BubbleSum.single(W, BallPoint.from_polar(1.0, E))
    v = BubbleSum.single(W, BallPoint.from_polar(4.0, -E), 0.7)
    assert hlambda_inner(u, v) == pytest.approx(hlambda_inner(v, u), rel=1e-14)
    assert l2_inner(u, v) > 0


@pytest.mark.parametrize("D", [6.0, 10.0])
def test_weak_form_identity(W, D):
    """<u1, u2>_lam = int u1^p u2 since u1 solves the equation."""
    b1, b2 = BallPoint.origin(3), BallPoint.from_polar(D, E)
    g, m = pair_terms(W, b1, b2)
    assert g - W.params.lam * m == pytest.approx(interaction(W, b1, b2), rel=1e-5)


def test_cross_power_matches_direct_difference(W):
    b1, b2 = BallPoint.origin(3), BallPoint.from_polar(3.0, E)
    nodes = BubbleNodes(W, [b1, b2], CoefficientField.unit())
    p = W.params.p
    u1, u2 = nodes.bubbles
    t = 0.3
    direct = nodes.grid.integrate((t * u1 + (1 - t) * u2) ** (p + 1) - (t * u1) ** (p + 1)
                                  - ((1 - t) * u2) ** (p + 1)).value
    assert cross_power(nodes, [t, 1 - t]).value == pytest.approx(direct, rel=1e-12)


@pytest.mark.parametrize("t", [0.0, 0.3, 0.5, 1.0])
def test_margin_matches_direct_quotient(W, levels, t):
    a = CoefficientField.exp_defect(0.5, 3.5)
    b1, b2 = BallPoint.from_polar(1.0, E), BallPoint.from_polar(5.0, E)
    u = BubbleSum(W, ((b1, t), (b2, 1 - t)))
    J = evaluate_energy(u, a).J
    nodes = BubbleNodes(W, [b1, b2], a, need_origin=True)
    g, m = pair_terms(W, b1, b2)
    margin = two_bubble_margin(t, W.params.p, levels.A, g - W.params.lam * m,
                               cross_power(nodes, [t, 1 - t]).value, nodes.signed_defect([t, 1 - t]))
    assert margin == pytest.approx(levels.S2 - J, abs=1e-10)


def test_ps_level_adds_bubbles():
    assert ps_level(1.5, [2.0, 2.0]) == 5.5
    assert ps_level(0.0) == 0.0


def test_zero_function_rejected(W):
    with pytest.raises(ConfigError):
        evaluate_energy(BubbleSum(W, ()))
    with pytest.raises(ConfigError):
        BubbleSum(W, ((BallPoint.origin(3), -1.0),))
    with pytest.raises(ConfigError):
        BubbleSum(W, ((BallPoint.origin(2), 1.0),))


def test_margin_log_form_at_midpoint():
    # with no interaction and no defect, J(1/2) equals S_2 exactly
    assert two_bubble_margin(0.5, 3.0, 81.0, 0.0, 0.0, 0.0) == 0.0
    A = 10.0
    assert math.isclose(two_bubble_margin(1.0, 3.0, A, 0.0, 0.0, 0.0),
                        (2 * A) ** 0.5 - A ** 0.5, rel_tol=1e-14)
