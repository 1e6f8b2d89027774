"""Diagnostics for the r^-4 velocity tail of non-radiative-type states.

c1(R) is the L^2_R projection coefficient of a field onto r^-4:

    c1(R) = (int_R^inf f r^-4 r^5 dr) / (int_R^inf r^-8 r^5 dr)
          = 2 R^2 int_R^inf f(r) r dr,

and the tail amplitude ell is obtained by fitting c1(R) = ell + a/R over
the largest fully resolved decade of R.  The fit residual is returned as a
quality figure, together with the empirically fitted decay exponent of
c1(R) - ell (the theory leaves the exponent between 1 and 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import RadialField


def project_c1(f: RadialField, R):
    """Coefficient of r^-4 in the L^2_R decomposition of f."""
    grid = f.grid
    if not 0.0 < R < grid.r_max:
        raise ValueError("R must lie inside the grid span")
    g = np.nan_to_num(f.values) * grid.nodes
    q = None if f.tail_exponent is None else f.tail_exponent + 1.0
    if f.tail_exponent is not None and q >= -1.0:
        raise ValueError("non-integrable tail for the r^-4 projection")
    return 2.0 * R * R * grid.integrate_from(g, max(R, f.defined_from), q)


@dataclass
class EllEstimate:
    ell: float
    quality: float            # rms residual of the (ell, a/R) fit over |ell|
    fitted_exponent: float | None
    window: tuple
    c1_samples: list

    @property
    def clean_tail(self):
        return self.quality < 1e-3


def estimate_ell(f: RadialField, n_samples=25) -> EllEstimate:
    """Tail amplitude from c1(R) = ell + a/R over [r_max/20, r_max/2]."""
    grid = f.grid
    lo, hi = grid.r_max / 20.0, grid.r_max / 2.0
    Rs = np.geomspace(lo, hi, n_samples)
    c1 = np.array([project_c1(f, R) for R in Rs])
    A = np.column_stack([np.ones_like(Rs), 1.0 / Rs])
    coef, *_ = np.linalg.lstsq(A, c1, rcond=None)
    ell, a = float(coef[0]), float(coef[1])
    resid = c1 - A @ coef
    scale = max(abs(ell), np.max(np.abs(c1)), 1e-300)
    quality = float(np.sqrt(np.mean(resid**2)) / scale)

    # empirical decay exponent of c1(R) - ell (reported, never asserted)
    dev = np.abs(c1 - ell)
    exponent = None
    if np.all(dev > 1e-13 * scale):
        slope, _ = np.polyfit(np.log(Rs), np.log(dev), 1)
        exponent = float(-slope)
    return EllEstimate(ell=ell, quality=quality, fitted_exponent=exponent,
                       window=(float(lo), float(hi)),
                       c1_samples=list(zip(Rs.tolist(), c1.tolist())))


@dataclass
class LowerBoundReport:
    lambda1: float
    delta: float
    ell: float
    C0: float
    margin: float             # lambda1 * C0 * sqrt(delta) - |ell|
    satisfied: bool
    hypothesis_violated: bool  # delta = 0 with ell != 0


def check_lower_bound_lambda1(fit, ell, C0) -> LowerBoundReport:
    """Margin of the outer-scale lower bound lambda1 >= ell/(C0 sqrt(delta)).

    Diagnostic only: the non-radiative hypothesis is not certifiable from
    finite data, so the margin is reported rather than asserted.
    """
    lam1 = float(fit.scales[0])
    delta = float(fit.delta)
    violated = (delta == 0.0 and ell != 0.0)
    margin = lam1 * C0 * np.sqrt(delta) - abs(ell)
    return LowerBoundReport(lambda1=lam1, delta=delta, ell=float(ell), C0=C0,
                            margin=float(margin),
                            satisfied=bool(margin >= 0.0) and not violated,
                            hypothesis_violated=violated)
