import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypbubble.energy import CoefficientField
from hypbubble.errors import ConfigError
from hypbubble.estimates import (LemmaSweepConfig, convex_inequality_check, decay_sandwich_check,
                                 defect_ratio_sweep, key_lemma_sweep, place_pair,
                                 t_ratio_bound_check, t_ratio_profile)
from hypbubble.hypgeom import ModelParams

P = ModelParams(3, 3.0)
DEFECT = CoefficientField.exp_defect(0.5, 3.5)


@settings(max_examples=500)
@given(st.floats(0, 1e3), st.floats(0, 1e3), st.floats(1.0 + 1e-9, 8.0))
def test_convex_inequality_nonnegative(a, b, p):
    scale = max((a + b) ** (p + 1), 1e-300)
    assert convex_inequality_check(a, b, p) >= -1e-12 * scale


def test_convex_inequality_equality_cases():
    assert convex_inequality_check(0.0, 3.0, 2.0) == 0.0
    # p = 2: (a+b)^3 - a^3 - b^3 - 2(a^2 b + a b^2) = a^2 b + a b^2
    assert convex_inequality_check(1.0, 2.0, 2.0) == pytest.approx(6.0)
    with pytest.raises(ConfigError):
        convex_inequality_check(-1.0, 1.0, 2.0)


@given(st.floats(0, 1), st.floats(1.01, 6.0))
def test_t_ratio_symmetric(t, p):
    a, b = t_ratio_profile(p, [t, 1 - t])
    assert a == pytest.approx(b, rel=1e-14)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_t_ratio_bound(p):
    r = t_ratio_bound_check(p)
    assert r["bounded"] and r["strict_outside"]
    assert r["equality_points"] == [0.5]
    assert t_ratio_profile(p, [0.0])[0] == 1.0


def test_decay_sandwich(W):
    C1, C2 = decay_sandwich_check(W, 0.1)
    assert 0 < C1 < C2 < np.inf
    with pytest.raises(ConfigError):
        decay_sandwich_check(W, 2.5)


def test_placement():
    assert place_pair(12.0, 8.0, "same-side", 3) == (12.0, 20.0, 1.0)
    assert place_pair(12.0, 8.0, "antipodal", 3) is None
    assert place_pair(10.0, 20.0, "antipodal", 3) == (10.0, 10.0, -1.0)


def test_config_validation():
    with pytest.raises(ConfigError):
        LemmaSweepConfig(P, alpha=1.1, alpha_prime=1.2)
    with pytest.raises(ConfigError):
        LemmaSweepConfig(P, t_grid=[1.5])
    with pytest.raises(ConfigError):
        LemmaSweepConfig(P, placement="diagonal")
    with pytest.raises(ConfigError, match="strict regime"):
        LemmaSweepConfig(P, R=8.0, center_rhos=[10.0], separations=[8.0], strict_regime=True)
    cfg = LemmaSweepConfig(P, R=6.0, center_rhos=[10.0], separations=[8.0], strict_regime=True)
    assert cfg.window(10.0, 18.0, 8.0)


def test_sweep_rows_and_skips(W):
    cfg = LemmaSweepConfig(P, DEFECT, center_rhos=[6.0], separations=[4.0, 14.0],
                           t_grid=[0.0, 0.5, 1.0], placement="antipodal")
    res = key_lemma_sweep(cfg, W)
    assert len(res.rows) == 3
    assert [s["separation"] for s in res.skipped] == [4.0]
    assert all(r.center_rhos == (6.0, 8.0) for r in res.rows)
    mid = [r for r in res.rows if r.t == 0.5][0]
    assert mid.margin == pytest.approx(mid.S2 - mid.J_value, abs=1e-9)
    for end in res.endpoints:
        assert end["J_at_t0_over_S1"] == pytest.approx(1.0, abs=1e-3)


def test_sweep_threads_match_serial(W):
    cfg = LemmaSweepConfig(P, DEFECT, center_rhos=[8.0], separations=[6.0, 7.0],
                           t_grid=[0.25, 0.5])
    a = key_lemma_sweep(cfg, W, threads=1)
    b = key_lemma_sweep(cfg, W, threads=2)
    assert [r.csv_row() for r in a.rows] == [r.csv_row() for r in b.rows]


def test_antipodal_defect_ratio_grows(W):
    # interaction ~ e^{-2 c rho} decays faster than the defect ~ e^{-delta rho} when delta < 2c
    rows = [defect_ratio_sweep(W, DEFECT, [rc], 2 * rc, "antipodal")[0] for rc in (8.0, 9.0)]
    assert rows[1]["ratio"] > rows[0]["ratio"]
