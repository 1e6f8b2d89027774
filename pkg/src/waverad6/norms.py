"""Radial norms: exterior L^p / H^1 norms, full-space energy norms, and the
log-weighted dyadic-shell Z_alpha norms.

Convention: exterior norms follow the radial definition
||f||_{L^p_R}^p = int_R^inf |f|^p r^5 dr (no angular factor), while
full-space L^2 / H^1 / energy norms are genuine R^6 integrals and carry the
S^5 area pi^3.  Tails beyond r_max are closed with the field's declared
power law.
"""

from __future__ import annotations

import numpy as np

from .fields import RadialField, StatePair, EXTERIOR
from .grid import SOLID_ANGLE_6D


def _start(f: RadialField, R):
    if R >= f.grid.r_max:
        raise ValueError(f"grid does not cover [R, inf) for R={R:g}")
    return max(R, f.defined_from)


def lp_exterior(f: RadialField, p, R):
    """||f||_{L^p_R} = (int_R^inf |f|^p r^5 dr)^{1/p}."""
    g = np.abs(np.nan_to_num(f.values)) ** p * f.grid.nodes**5
    q = None if f.tail_exponent is None else p * f.tail_exponent + 5
    return float(f.grid.integrate_from(g, _start(f, R), q)) ** (1.0 / p)


def h1_exterior(f: RadialField, R):
    """||f||_{H^1_R} = (int_R^inf (f')^2 r^5 dr)^{1/2}."""
    d = np.nan_to_num(f.derivative_values())
    g = d * d * f.grid.nodes**5
    q = None if f.tail_exponent is None else 2.0 * (f.tail_exponent - 1.0) + 5
    return float(f.grid.integrate_from(g, _start(f, R), q)) ** 0.5


def l2_full(f: RadialField):
    """True L^2(R^6) norm (includes the angular pi^3)."""
    return np.sqrt(SOLID_ANGLE_6D) * lp_exterior(f, 2, 0.0)


def h1dot_full(f: RadialField):
    """True H^1(R^6) seminorm ||grad f||_{L^2}."""
    return np.sqrt(SOLID_ANGLE_6D) * h1_exterior(f, 0.0)


def l3_full(f: RadialField):
    return np.sqrt(SOLID_ANGLE_6D) ** (2.0 / 3.0) * lp_exterior(f, 3, 0.0)


def pair_energy_radial(state: StatePair, R):
    """int_R^inf ((d_r u)^2 + v^2) r^5 dr  (radial convention, squared)."""
    u, v = state
    return h1_exterior(u, R) ** 2 + lp_exterior(v, 2, R) ** 2


def norm_h_pair(state: StatePair, R=0.0):
    """Energy-space norm ||(u, v)||_H over {|x| > R}, with angular factor."""
    return float(np.sqrt(SOLID_ANGLE_6D * pair_energy_radial(state, R)))


def annulus_l2(f: RadialField, R):
    """L^2(R^6) norm restricted to the shell R <= r <= 2R."""
    g = np.nan_to_num(f.values) ** 2 * f.grid.nodes**5
    suf = f.grid.suffix_integrals(g)
    a = f.grid.integrate_from(g, max(R, f.defined_from), None, suffix=suf)
    b = f.grid.integrate_from(g, max(min(2.0 * R, f.grid.r_max), f.defined_from),
                              None, suffix=suf)
    return float(np.sqrt(SOLID_ANGLE_6D * max(a - b, 0.0)))


def _log_bracket(x):
    return np.sqrt(1.0 + np.log(x) ** 2)


def z_alpha(f: RadialField, alpha, shells=None):
    """sup_R R^{-3-alpha} <log R>^{-1} ||f||_{L^2(R<=r<=2R)} over dyadic shells."""
    if shells is None:
        shells = f.grid.shell_starts()
    vals = [R ** (-3.0 - alpha) / _log_bracket(R) * annulus_l2(f, R) for R in shells]
    return float(max(vals))


def z_alpha_multi(f: RadialField, alpha, lambdas, shells=None):
    """Multi-bubble variant: the log allowance is taken away from each scale."""
    lambdas = np.asarray(lambdas, dtype=float)
    if shells is None:
        shells = f.grid.shell_starts()
    vals = []
    for R in shells:
        denom = np.min(_log_bracket(R / lambdas))
        vals.append(R ** (-3.0 - alpha) / denom * annulus_l2(f, R))
    return float(max(vals))


def z_alpha_of_values(grid, values, alpha, shells=None, lambdas=None):
    """Z norm of a raw sample array (used for gradients of fields)."""
    f = RadialField(grid, np.nan_to_num(values), check=False)
    if lambdas is None:
        return z_alpha(f, alpha, shells)
    return z_alpha_multi(f, alpha, lambdas, shells)


def norm(f: RadialField, kind, **kw):
    """Dispatcher: kind in {lp, h1, z_alpha, z_alpha_multi}.

    lp:            norm(f, "lp", p=2, R=1.0)
    h1:            norm(f, "h1", R=1.0)
    z_alpha:       norm(f, "z_alpha", alpha=-3)
    z_alpha_multi: norm(f, "z_alpha_multi", alpha=-3, lambdas=(1.0, 0.05))
    """
    if kind == "lp":
        return lp_exterior(f, kw.get("p", 2), kw.get("R", 0.0))
    if kind == "h1":
        return h1_exterior(f, kw.get("R", 0.0))
    if kind == "z_alpha":
        return z_alpha(f, kw["alpha"], kw.get("shells"))
    if kind == "z_alpha_multi":
        return z_alpha_multi(f, kw["alpha"], kw["lambdas"], kw.get("shells"))
    raise ValueError(f"unknown norm kind {kind!r}")
