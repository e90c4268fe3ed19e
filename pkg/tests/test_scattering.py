import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnqkz.errors import DomainError
from gnqkz.scattering import (G_MAX, CouplingModel, build_s_lr, build_s_same_chirality, c_of_g,
                              characteristic_time, classify_regime, g_of_t, gap_from_coupling,
                              identification_fit, invert_c, phase_factor, rg_trajectory,
                              running_coupling, s_matrix_from_g, static_beta_check)
from gnqkz.spin import IDENTITY4, r_matrix

MODEL = CouplingModel(1.0, 2.0)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_invert_c_roundtrip(c):
    g = invert_c(c)
    assert 0 < g
    assert abs(c_of_g(g) - c) <= 1e-9 * max(1.0, abs(c))


@given(st.floats(1e-3, 1.15))
def test_c_of_g_then_invert(g):
    assert np.isclose(invert_c(c_of_g(g)), g, rtol=1e-10)


def test_g_max_is_zero_of_c():
    assert abs(c_of_g(G_MAX)) < 1e-15
    with pytest.raises(DomainError):
        c_of_g(0.0)


def test_frozen_couplings():
    # invert_c(2) = 2/(4 + sqrt(19))
    assert np.isclose(g_of_t(MODEL, 0.0), 2 / (4 + np.sqrt(19)), rtol=1e-15)
    assert np.isclose(g_of_t(MODEL, 1.0, "universal"), 1 / 8)


@given(st.floats(0.0, 2.0))
def test_phase_unit_modulus(g):
    assert np.isclose(abs(phase_factor(g)), 1.0, atol=1e-14)


@given(st.floats(0.01, 1.1))
def test_s_matrix_unitary(g):
    s = s_matrix_from_g(g)
    assert np.allclose(s @ s.conj().T, IDENTITY4, atol=1e-12)


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_s_lr_is_phase_times_r_matrix(z, zbar):
    s = build_s_lr(z, zbar, MODEL)
    x = zbar - z
    r = r_matrix(x + MODEL.beta / MODEL.alpha, 1 / MODEL.alpha)
    k = np.argmax(np.abs(r))
    ratio = s.flat[k] / r.flat[k]
    assert np.isclose(abs(ratio), 1.0)
    assert np.allclose(s, ratio * r, atol=1e-12)


def test_same_chirality_is_r_matrix():
    assert np.allclose(build_s_same_chirality(0.2, 0.9, 2.0), r_matrix(0.7, 0.5))


def test_exact_and_universal_agree_at_large_t():
    t = 1e3
    ge, gu = g_of_t(MODEL, t), g_of_t(MODEL, t, "universal")
    assert abs(ge - gu) / gu < 1e-4


def test_exact_branch_domain():
    with pytest.raises(DomainError):
        g_of_t(CouplingModel(1.0, -2.0), 0.5)
    with pytest.raises(DomainError):
        g_of_t(MODEL, 1.0, "other")
    with pytest.raises(DomainError):
        CouplingModel(0.0, 1.0)


def test_check_window():
    MODEL.check_window(0.0, 10.0)
    with pytest.raises(DomainError):
        CouplingModel(-1.0, 2.0).check_window(0.0, 10.0)


def test_rg_flow_is_quadratic():
    traj = rg_trajectory(MODEL, np.linspace(10, 1000, 100))
    assert abs(traj.loglog_slope - 2.0) < 0.01
    assert abs(traj.kappa - 4.0) < 1e-3
    # universal form has dg/dt = -4 alpha g^2 exactly
    uni = rg_trajectory(MODEL, np.linspace(1, 10, 10), "universal")
    assert abs(uni.kappa - 4.0) < 1e-6


def test_static_running_coupling():
    assert np.isclose(running_coupling(2000.0, 4.0), np.pi / np.log(1000.0))
    assert static_beta_check(2000.0, 4.0) < 1e-8
    with pytest.raises(DomainError):
        running_coupling(1.0, 4.0)
    g = running_coupling(2000.0, 4.0)
    assert np.isclose(gap_from_coupling(g, 2000.0), 4.0)


def test_identification_fit_is_linear_in_t():
    a, b, res = identification_fit(MODEL, np.linspace(100, 1000, 20), 1.0, "universal")
    assert np.isclose(a, 4 * np.pi)
    assert res < 1e-12


def test_characteristic_time_and_regimes():
    t0 = characteristic_time(2000.0, 4.0)
    assert t0 == np.log(1000.0) / np.pi
    assert classify_regime(MODEL, t0, 2000.0, 4.0).regime == "adiabatic"
    assert classify_regime(CouplingModel(100.0, 2.0), t0, 2000.0, 4.0).regime == "fast-driving"
    assert classify_regime(MODEL, 3 * t0, 2000.0, 4.0).regime == "intermediate"
    with pytest.raises(DomainError):
        characteristic_time(1.0, 4.0)
