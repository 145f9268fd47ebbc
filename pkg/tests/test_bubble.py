import numpy as np
import pytest

from hypbubble.bubble import (RadialProfile, SolverOptions, energy_levels, norm_A,
                              solve_ground_state)
from hypbubble.errors import ConfigError
from hypbubble.hypgeom import ModelParams
from hypbubble.variational import minimize_radial, variational_w0


def test_profile_positive_and_decreasing(W):
    assert np.all(W.values > 0)
    assert np.all(np.diff(W.values) < 0)
    assert W.derivative(0.0) == pytest.approx(0.0, abs=1e-12)


def test_ode_residual_between_nodes(W):
    mid = 0.5 * (W.grid[1:] + W.grid[:-1])
    assert np.max(np.abs(W.ode_residual(mid[1:]))) <= 1e-6


def test_tail_continues_profile(W):
    r = W.rho_max
    assert W.value(r + 1e-9) == pytest.approx(W.value(r - 1e-9), rel=1e-6)
    assert W.tail_exponent == pytest.approx(W.params.decay_rate, rel=1e-4)
    assert W.value(40.0) > 0


def test_energy_levels_ratio(W):
    nr = norm_A(W)
    lv = energy_levels(nr.A, W.params)
    assert lv.S2 / lv.S1 == pytest.approx(2 ** 0.5, rel=1e-15)
    assert lv.Sm[0] == lv.S1
    with pytest.raises(ConfigError):
        energy_levels(-1.0, W.params)


def test_save_load_roundtrip(W, tmp_path):
    W.save(tmp_path / "gs")
    V = RadialProfile.load(tmp_path / "gs")
    r = np.linspace(0, 30, 101)
    assert np.array_equal(V.value(r), W.value(r))
    assert V.params == W.params


def test_scaled_profile(W):
    V = W.scaled(2.0)
    assert V.value(1.3) == pytest.approx(2 * W.value(1.3), rel=1e-15)


def test_second_parameter_set(W_second):
    P = W_second.params
    assert W_second.tail_exponent == pytest.approx(P.decay_rate, rel=1e-4)
    nr = norm_A(W_second)
    assert nr.discrepancy < 1e-6
    assert W_second.w0 == pytest.approx(variational_w0(P), rel=1e-4)


@pytest.mark.parametrize("params", [ModelParams(2, 3.0, 0.1), ModelParams(4, 1.5, -1.0)])
def test_other_dimensions(params):
    W = solve_ground_state(params)
    assert W.diagnostics["max_residual"] <= 1e-6
    assert norm_A(W).discrepancy < 1e-6


def test_variational_minimum_is_bubble_level(W):
    res = minimize_radial(W.params, h=0.01)
    S1 = energy_levels(norm_A(W).A, W.params).S1
    assert res.J_inf == pytest.approx(S1, rel=1e-3)
    assert res.values[0] == pytest.approx(W.w0, rel=1e-3)


def test_solver_options_validation():
    with pytest.raises(ConfigError):
        SolverOptions(grid_step=0.0)
    with pytest.raises(ConfigError):
        SolverOptions(rho_cap=5.0)
