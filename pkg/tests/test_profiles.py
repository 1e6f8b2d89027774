"""Closed-form profiles against the symbolic oracle and the defining PDEs."""

import numpy as np
import pytest
import sympy as sp

from waverad6 import profiles

r_s = sp.symbols("r", positive=True)
W_s = (1 + r_s**2 / 24) ** -2


def _lam(f):
    return 2 * f + r_s * sp.diff(f, r_s)


def _lap(f):
    return sp.diff(f, r_s, 2) + 5 / r_s * sp.diff(f, r_s)


def _check_against_sympy(fn, expr, pts):
    f = sp.lambdify(r_s, expr, "numpy")
    np.testing.assert_allclose(fn(pts), f(pts), rtol=1e-13, atol=1e-15)


PTS = np.array([0.013, 0.4, 1.0, np.sqrt(24.0), 7.3, 55.0, 900.0])


def test_ground_state_matches_symbolic():
    _check_against_sympy(profiles.ground_state, W_s, PTS)
    _check_against_sympy(profiles.ground_state_dr, sp.diff(W_s, r_s), PTS)


def test_lambda_w_matches_scaling_generator():
    # the closed form must equal (2 + r d_r) W, not any other normalisation
    _check_against_sympy(profiles.lambda_w, _lam(W_s), PTS)
    _check_against_sympy(profiles.lambda_w_dr, sp.diff(_lam(W_s), r_s), PTS)
    _check_against_sympy(profiles.lambda2_w, _lam(_lam(W_s)), PTS)


def test_defining_equations_symbolic():
    LW = _lam(W_s)
    assert sp.simplify(-_lap(W_s) - W_s**2) == 0
    assert sp.simplify(-_lap(LW) - 2 * W_s * LW) == 0
    LLW = _lam(LW)
    assert sp.simplify(-_lap(LLW) - 2 * LW**2 - 2 * W_s * LLW) == 0


def test_neg_lap_lambda2_w_consistent():
    LLW = _lam(_lam(W_s))
    _check_against_sympy(profiles.neg_lap_lambda2_w, -_lap(LLW), PTS)


def test_values_at_origin():
    assert profiles.ground_state(0.0) == 1.0
    assert profiles.lambda_w(0.0) == 2.0
    assert profiles.ground_state(np.sqrt(24.0)) == pytest.approx(0.25, rel=1e-14)


def test_tail_constants():
    r = np.array([3e3, 1e4])
    np.testing.assert_allclose(r**4 * profiles.ground_state(r), 576.0, rtol=2e-2)
    # Lambda W ~ -2 c_W / r^4
    np.testing.assert_allclose(r**4 * profiles.lambda_w(r), -1152.0, rtol=2e-2)


def test_rescale_callables():
    fn = profiles.h1_rescale(profiles.ground_state, 2.0)
    assert fn(0.0) == pytest.approx(0.25)
    fn3 = profiles.l2_rescale(profiles.lambda_w, 0.5)
    assert fn3(0.0) == pytest.approx(2.0 * 8.0)
