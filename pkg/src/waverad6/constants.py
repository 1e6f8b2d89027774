"""The explicit constants of the soliton toolkit, by quadrature.

All entries are genuine R^6 integrals (angular factor pi^3 included):

    c_W                = lim r^4 W(r) = 576
    ||Lambda W||_L2^2  = int (Lambda W)^2 dx
    kappa_2            = ||Lambda W||_L2^{-2}
    kappa_1            = int (24^2/|x|^4) W^2 dx
    kappa_0            = lim_{g->0} (2/g^2) int Lambda W * W * W_(g) dx
    E(W, 0)            = (1/2)||grad W||^2 - (1/3)||W||_L3^3

kappa_0 is computed by evaluating the interaction integral at separations
g in {1e-2, 1e-3, 1e-4} and Richardson-extrapolating in g^2; the spread of
the two extrapolants is reported and a non-convergent extrapolation raises.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from .grid import RadialGrid, SOLID_ANGLE_6D
from . import profiles

KAPPA0_GAMMAS = (1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class ConstantsTable:
    c_w: float
    norm_lambda_w_sq: float
    kappa0: float
    kappa1: float
    kappa2: float
    energy_w: float
    kappa0_spread: float
    resolution: dict

    def as_dict(self):
        return asdict(self)

    def validate(self, rtol=1e-8):
        prod = self.kappa2 * self.norm_lambda_w_sq
        if abs(prod - 1.0) > rtol:
            raise ValueError(f"kappa2 * ||LamW||^2 = {prod} deviates from 1")
        for name in ("c_w", "norm_lambda_w_sq", "kappa0", "kappa1", "kappa2",
                     "energy_w"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"constant {name} not positive")
        return self


def _w_rescaled_h1(r, g):
    """W_(g)(r) = g^-2 W(r/g), written stably for r >> g."""
    return 576.0 * g * g / (r * r + 24.0 * g * g) ** 2


def compute_constants(r_min=1e-7, r_max=1e4, nodes_per_decade=128,
                      kappa0_spread_tol=1e-3) -> ConstantsTable:
    grid = RadialGrid(r_min, r_max, nodes_per_decade)
    r = grid.nodes
    W = profiles.ground_state(r)
    LW = profiles.lambda_w(r)
    dW = profiles.ground_state_dr(r)

    norm_lw2 = SOLID_ANGLE_6D * grid.integrate(LW * LW * r**5, tail_exponent=-3)
    kappa1 = SOLID_ANGLE_6D * grid.integrate(
        576.0 * np.where(r > 0, W * W * r, 0.0), tail_exponent=-7)
    grad_w2 = SOLID_ANGLE_6D * grid.integrate(dW * dW * r**5, tail_exponent=-5)
    l3 = SOLID_ANGLE_6D * grid.integrate(W**3 * r**5, tail_exponent=-7)
    energy_w = 0.5 * grad_w2 - l3 / 3.0

    vals = []
    for g in KAPPA0_GAMMAS:
        integrand = LW * W * _w_rescaled_h1(r, g) * r**5
        I = grid.integrate(integrand, tail_exponent=-7)
        vals.append(2.0 / g**2 * SOLID_ANGLE_6D * I)
    # Richardson in g^2 on consecutive pairs
    extr = []
    for (g1, f1), (g2, f2) in zip(zip(KAPPA0_GAMMAS, vals), zip(KAPPA0_GAMMAS[1:], vals[1:])):
        extr.append((g1**2 * f2 - g2**2 * f1) / (g1**2 - g2**2))
    kappa0 = extr[-1]
    spread = abs(extr[-1] - extr[0]) / abs(extr[-1])
    if spread > kappa0_spread_tol:
        raise ArithmeticError(
            f"kappa0 extrapolation not converged: spread {spread:.3e} "
            f"(estimates {extr})")

    table = ConstantsTable(
        c_w=profiles.C_W,
        norm_lambda_w_sq=norm_lw2,
        kappa0=kappa0,
        kappa1=kappa1,
        kappa2=1.0 / norm_lw2,
        energy_w=energy_w,
        kappa0_spread=spread,
        resolution={"r_min": r_min, "r_max": r_max,
                    "nodes_per_decade": nodes_per_decade,
                    "kappa0_gammas": list(KAPPA0_GAMMAS)},
    )
    return table.validate()


_default = None


def default_constants() -> ConstantsTable:
    """Constants at the default resolution, computed once per process."""
    global _default
    if _default is None:
        _default = compute_constants()
    return _default
