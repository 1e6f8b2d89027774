import numpy as np
import pytest

from waverad6.grid import RadialGrid, fornberg_weights, tail_closure


def test_grid_invariants():
    g = RadialGrid(1e-3, 1e3, 64)
    assert g.nodes[0] == 0.0
    assert np.all(np.diff(g.nodes) > 0)
    assert g.nodes[1] == pytest.approx(1e-3)
    assert g.nodes[-1] == pytest.approx(1e3)
    with pytest.raises(ValueError):
        RadialGrid(1e-3, 1e3, 4)
    with pytest.raises(ValueError):
        RadialGrid(-1.0, 10.0)
    with pytest.raises(ValueError):
        RadialGrid(1.0, np.inf)


def test_fornberg_matches_uniform_stencil():
    w = fornberg_weights(0.0, np.array([-2.0, -1.0, 0.0, 1.0, 2.0]), 2)
    np.testing.assert_allclose(w[:, 2], [-1 / 12, 4 / 3, -5 / 2, 4 / 3, -1 / 12],
                               atol=1e-13)


def test_integrate_polynomial_and_decay():
    g = RadialGrid(1e-2, 1e2, 48)
    r = g.nodes
    # smooth integrand with known value: int_0^inf r^5 e^-r dr = 120
    val = g.integrate(r**5 * np.exp(-r))
    assert val == pytest.approx(120.0, rel=2e-8)


def test_integrate_from_and_suffix():
    g = RadialGrid(1e-2, 1e3, 64)
    r = g.nodes
    with np.errstate(divide="ignore"):
        f = np.where(r > 0, r**-3.0, 0.0)    # int_R^inf = 1/(2R^2)
    for R in (0.5, 1.0, 13.7, 250.0):
        got = g.integrate_from(f, R, tail_exponent=-3.0)
        assert got == pytest.approx(0.5 / R**2, rel=1e-7), R
    # node-aligned start
    Rn = g.nodes[200]
    assert g.integrate_from(f, Rn, tail_exponent=-3.0) == pytest.approx(
        0.5 / Rn**2, rel=1e-7)


def test_tail_closure_exact_power():
    assert tail_closure(1.0, 10.0, -2.0) == pytest.approx(10.0)
    with pytest.raises(ValueError):
        tail_closure(1.0, 10.0, -0.5)


def test_derivative_matrix_order():
    g = RadialGrid(1e-2, 1e2, 64)
    D = g.derivative_matrix()
    r = g.nodes
    f = np.sin(r) * np.exp(-r / 10)
    df = np.cos(r) * np.exp(-r / 10) - f / 10
    err = np.abs(D @ f - df)
    # spacing at r~1 is ~0.036r; 7-point stencils hold ~1e-7 out to r~5
    mid = (r > 0.5) & (r < 5)
    assert err[mid].max() < 5e-7
