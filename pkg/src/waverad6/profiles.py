"""Closed-form radial profiles for the six-dimensional critical wave problem.

W(r) = (1 + r^2/24)^-2 solves -Delta W = W^2 with Delta the radial
six-dimensional Laplacian d_rr + (5/r) d_r.  The scaling generator of the
H^1-critical rescaling f_(lam) = lam^-2 f(r/lam) is Lambda = 2 + r d_r,
and Lambda W spans the kernel of the linearisation -Delta - 2W.  All closed
forms below were cross-checked against a symbolic oracle (see the test
suite) and against the defining identities, which are the ground truth:

    -Delta W            = W^2
    -Delta (Lambda W)   = 2 W Lambda W                  =: Phi
    -Delta (Lambda^2 W) = 2 (Lambda W)^2 + 2 W Lambda^2 W
"""

from __future__ import annotations

import numpy as np

C_W = 576.0  # lim r^4 W(r) = 24^2

# power-law decay exponents at infinity
TAIL_W = -4.0          # W ~ c_W r^-4
TAIL_LAMBDA_W = -4.0   # Lambda W ~ -2 c_W r^-4
TAIL_PHI = -8.0        # Phi = 2 W Lambda W ~ -4 c_W^2 r^-8


def ground_state(r):
    """W(r) = (1 + r^2/24)^-2."""
    r = np.asarray(r, dtype=float)
    return (1.0 + r * r / 24.0) ** -2


def ground_state_dr(r):
    """dW/dr = -(r/6)(1 + r^2/24)^-3."""
    r = np.asarray(r, dtype=float)
    return -(r / 6.0) * (1.0 + r * r / 24.0) ** -3


def lambda_w(r):
    """(2 + r d_r) W = 2 (1 - r^2/24)(1 + r^2/24)^-3."""
    r = np.asarray(r, dtype=float)
    u = r * r / 24.0
    return 2.0 * (1.0 - u) * (1.0 + u) ** -3


def lambda_w_dr(r):
    """d/dr of Lambda W."""
    r = np.asarray(r, dtype=float)
    u = r * r / 24.0
    # d/du [2(1-u)(1+u)^-3] = 2(2u-4)(1+u)^-4, du/dr = r/12
    return 2.0 * (2.0 * u - 4.0) * (1.0 + u) ** -4 * (r / 12.0)


def lambda2_w(r):
    """Lambda(Lambda W) = 4 (u^2 - 4u + 1)(1+u)^-4 with u = r^2/24."""
    r = np.asarray(r, dtype=float)
    u = r * r / 24.0
    return 4.0 * (u * u - 4.0 * u + 1.0) * (1.0 + u) ** -4


def phi(r):
    """Phi = 2 W Lambda W = -Delta(Lambda W), the kernel orthogonality weight."""
    return 2.0 * ground_state(r) * lambda_w(r)


def neg_lap_lambda2_w(r):
    """-Delta(Lambda^2 W) = 2 (Lambda W)^2 + 2 W Lambda^2 W."""
    lw = lambda_w(r)
    return 2.0 * lw * lw + 2.0 * ground_state(r) * lambda2_w(r)


def h1_rescale(fn, lam):
    """Callable for f_(lam)(r) = lam^-2 f(r/lam)."""
    s = 1.0 / lam
    a = s * s
    return lambda r: a * fn(np.asarray(r, dtype=float) * s)


def l2_rescale(fn, lam):
    """Callable for f_[lam](r) = lam^-3 f(r/lam)."""
    s = 1.0 / lam
    a = s ** 3
    return lambda r: a * fn(np.asarray(r, dtype=float) * s)
