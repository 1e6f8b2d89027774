"""The singular negative stationary profile W^- outside its blow-up radius.

W^- solves -Delta W^- = (W^-)^2 for r > R_-, behaves like -c_W/r^4 at
infinity, and diverges to -infinity at the finite radius R_-.  It is built
by Picard iteration on the Duhamel form

    W^-(r) = -c_W/r^4 - int_r^inf rho^-5 int_rho^inf (W^-(s))^2 s^5 ds drho

in the weighted sup ball N_R(f) = max r^4 |f| <= 2 c_W, then continued
inward as a solution of y'' + (5/r) y' + y^2 = 0 until |y| crosses the
blow-up threshold, with step halving near the singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import RadialGrid, fornberg_weights
from .fields import RadialField, EXTERIOR
from .profiles import C_W

PICARD_TOL = 1e-12
PICARD_MAX_ITERS = 200
BLOWUP_THRESHOLD = 1e8


class PicardError(RuntimeError):
    pass


@dataclass
class WMinusResult:
    profile: RadialField          # exterior-only field on the grid
    r_start: float
    r_minus_estimate: float
    picard_iterations: int
    picard_residual: float
    ell10_sup: float              # sup r^6 |W^- + c_W/r^4|
    derivative_start: float       # dW^-/dr at r_start


def _picard_iterate(r, R_start):
    """Fixed point on the nodes >= R_start; returns values and iteration info."""
    mask = r >= R_start
    rr = r[mask]
    grid_like = rr
    f = -C_W / rr**4
    n_prev = None
    for it in range(1, PICARD_MAX_ITERS + 1):
        inner = _double_integral(grid_like, f)
        f_new = -C_W / rr**4 - inner
        n_ball = np.max(rr**4 * np.abs(f_new))
        if n_ball > 2.0 * C_W:
            raise PicardError(
                f"iterate left the ball N_R = {n_ball:.1f} > 2 c_W at "
                f"R_start={R_start:g}")
        diff = np.max(rr**4 * np.abs(f_new - f))
        f = f_new
        if diff < PICARD_TOL * C_W:
            return f, it, diff / C_W
        n_prev = diff
    raise PicardError(f"no contraction after {PICARD_MAX_ITERS} iterations "
                      f"(last N_R increment {n_prev:.3e})")


def _double_integral(rr, f):
    """g(r) = int_r^inf rho^-5 [int_rho^inf f(s)^2 s^5 ds] drho on nodes rr.

    Inner tail beyond the grid: f ~ -c_W s^-4 so f^2 s^5 ~ c_W^2 s^-3 and
    int_rmax^inf = c_W^2/(2 rmax^2) up to the sampled end value.  The outer
    integrand then decays like rho^-7.
    """
    h = f * f * rr**5
    inner = _suffix_trapz7(rr, h) + h[-1] * rr[-1] / 2.0
    outer_integrand = inner / rr**5
    g = _suffix_trapz7(rr, outer_integrand) + outer_integrand[-1] * rr[-1] / 6.0
    return g


def _suffix_trapz7(x, y):
    """Suffix integrals of samples on an increasing sub-grid (order-6 panels)."""
    n = len(x)
    order = min(7, n)
    I = np.empty(n - 1)
    ks = np.arange(order)
    parity = (1 - (-1.0) ** (ks + 1)) / (ks + 1)
    for i in range(n - 1):
        lo = max(0, min(i - (order - 1) // 2, n - order))
        idx = np.arange(lo, lo + order)
        x0 = 0.5 * (x[i] + x[i + 1])
        s = 0.5 * (x[i + 1] - x[i])
        V = np.vander((x[idx] - x0) / s, order, increasing=True)
        w = np.linalg.solve(V.T, s * parity)
        I[i] = w @ y[idx]
    S = np.zeros(n)
    S[:-1] = np.cumsum(I[::-1])[::-1]
    return S


def _shoot_inward(r0, y0, dy0, threshold=BLOWUP_THRESHOLD, step_scale=1.0):
    """Integrate y'' + 5 y'/r + y^2 = 0 from r0 toward 0 until |y| blows up.

    Fixed RK4 with the step halved whenever |y| h gets large; the reported
    radius is the midpoint of the last bracketing step.  Reaching r=0
    without blow-up is a solver fault (the profile must diverge at R_- > 0).
    """
    def rhs(r, y, v):
        return v, -5.0 * v / r - y * y

    r, y, v = r0, y0, dy0
    h = -r0 / 2000.0 * step_scale
    while r > 0.0:
        if abs(y) > threshold:
            return r - h / 2.0   # midpoint of the bracketing interval
        # keep |y| h^2 bounded: halve the step as the singularity nears
        while abs(h) > 1e-14 * r0 and abs(y) * h * h > 1e-4:
            h *= 0.5
        if r + h <= 0.0:
            h = -r * 0.5
        k1y, k1v = rhs(r, y, v)
        k2y, k2v = rhs(r + h / 2, y + h / 2 * k1y, v + h / 2 * k1v)
        k3y, k3v = rhs(r + h / 2, y + h / 2 * k2y, v + h / 2 * k2v)
        k4y, k4v = rhs(r + h, y + h * k3y, v + h * k3v)
        y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        r += h
        if not np.isfinite(y):
            return r - h / 2.0
        if r < 1e-12 * r0:
            break
    raise RuntimeError("inward integration reached r=0 without blow-up; "
                       "the profile must diverge at a positive radius")


def inverted_radius_check(res: WMinusResult, n=256):
    """Residual of the s = 1/r^4 substitution identity.

    With Z(s) = W^-(s^{-1/4}), the radial equation y'' + 5y'/r + y^2 = 0
    transforms exactly to Z'' + Z^2/(16 s^{5/2}) = 0, and Z'(0+) = -c_W
    (equivalently r^4 W^-(r) -> -c_W).  Returns (max relative residual on a
    moderate-s window, the measured Z'(0+) limit).
    """
    r = res.profile.grid.nodes
    sel = (r >= res.r_start) & (r <= 4.0 * res.r_start)
    s = r[sel][::-1] ** -4          # increasing in s
    Z = res.profile.values[sel][::-1]
    rels = []
    for i in range(2, len(s) - 2):
        c = fornberg_weights(s[i], s[i - 2:i + 3], 2)
        zpp = float(c[:, 2] @ Z[i - 2:i + 3])
        rhs = -Z[i] ** 2 / (16.0 * s[i] ** 2.5)
        rels.append(abs(zpp - rhs) / abs(rhs))
    zp0 = float(res.profile.grid.r_max ** 4 * res.profile.values[-1])
    return float(np.max(rels)), zp0


def estimate_r_minus(res: WMinusResult, step_scale=1.0):
    """Re-run the inward blow-up shooting, optionally with scaled steps."""
    y0 = float(res.profile(res.r_start))
    return _shoot_inward(res.r_start, y0, res.derivative_start,
                         step_scale=step_scale)


def build_w_minus(R_start=10.0, grid: RadialGrid | None = None,
                  max_doublings=6) -> WMinusResult:
    """Construct W^- on the grid exterior to R_start (doubling it on failure)."""
    if grid is None:
        grid = RadialGrid(1e-3, 1e4, 96)
    if R_start <= 0 or R_start >= grid.r_max / 4:
        raise ValueError("R_start must lie well inside the grid")
    last_exc = None
    for _ in range(max_doublings):
        try:
            mask = grid.nodes >= R_start
            f, iters, resid = _picard_iterate(grid.nodes, R_start)
            break
        except PicardError as exc:
            last_exc = exc
            R_start *= 2.0
    else:
        raise PicardError(f"Picard failed up to R_start={R_start:g}: {last_exc}")

    values = np.full(grid.size, np.nan)
    values[mask] = f
    profile = RadialField(grid, values, EXTERIOR, r_start=R_start,
                          tail_exponent=-4.0, check=False)

    rr = grid.nodes[mask]
    far = rr >= 2.0 * R_start
    ell10 = float(np.max(rr[far]**6 * np.abs(f[far] + C_W / rr[far]**4)))

    # derivative at R_start from the Duhamel form:
    # dW^-/dr = 4 c_W/r^5 + r^-5 int_r^inf (W^-)^2 s^5 ds
    h = f * f * rr**5
    inner0 = float(_suffix_trapz7(rr, h)[0] + h[-1] * rr[-1] / 2.0)
    dstart = 4.0 * C_W / R_start**5 + inner0 / R_start**5

    r_minus = _shoot_inward(float(rr[0]), float(f[0]), dstart)
    return WMinusResult(profile=profile, r_start=float(rr[0]),
                        r_minus_estimate=float(r_minus),
                        picard_iterations=iters, picard_residual=resid,
                        ell10_sup=ell10, derivative_start=dstart)
