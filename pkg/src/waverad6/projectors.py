"""Orthogonal projections onto the Lambda W directions at a set of scales.

The span is ((Lambda W)_[l_j])_j in L^2 or ((Lambda W)_(l_j))_j in H^1dot;
coefficients come from the Gram system of the direction set in the relevant
inner product, with the H^1 pairings evaluated through the kernel identity
(no differentiation of the input field).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SOLID_ANGLE_6D
from .fields import RadialField
from .decompose import gram_l2, _gram_between, _pair_h1_with_lambda_w
from . import profiles


@dataclass(frozen=True)
class ProjectorSpec:
    space: str                      # "L2" | "H1dot"
    scales: tuple
    complement: bool = False

    def __post_init__(self):
        if self.space not in ("L2", "H1dot"):
            raise ValueError("space must be 'L2' or 'H1dot'")
        s = tuple(float(x) for x in self.scales)
        if any(x <= 0 for x in s):
            raise ValueError("scales must be positive")
        if any(s[j + 1] >= s[j] for j in range(len(s) - 1)):
            raise ValueError("scales must be strictly decreasing")
        object.__setattr__(self, "scales", s)


def projection_coefficients(spec: ProjectorSpec, f: RadialField):
    """Gram-system coefficients of f on the direction set."""
    grid = f.grid
    r = grid.nodes
    vals = np.nan_to_num(f.values)
    J = len(spec.scales)
    if spec.space == "L2":
        G = gram_l2(grid, spec.scales)
        m = np.empty(J)
        for j, lj in enumerate(spec.scales):
            g = vals * profiles.l2_rescale(profiles.lambda_w, lj)(r) * r**5
            q = None if f.tail_exponent is None else f.tail_exponent + 1.0
            m[j] = SOLID_ANGLE_6D * grid.integrate(g, tail_exponent=q)
    else:
        G = np.empty((J, J))
        for j, lj in enumerate(spec.scales):
            for k, lk in enumerate(spec.scales):
                G[j, k] = _gram_between(grid, lk, lj)
        m = np.array([
            _pair_h1_with_lambda_w(grid, vals, lj, f.tail_exponent)
            for lj in spec.scales])
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError(
            f"Gram matrix numerically singular (cond={cond:.2e}): "
            "near-coincident scales")
    return np.linalg.solve(G, m)


def apply_projector(spec: ProjectorSpec, f: RadialField) -> RadialField:
    """Project f on the span (or its orthogonal complement)."""
    grid = f.grid
    r = grid.nodes
    c = projection_coefficients(spec, f)
    proj = np.zeros(grid.size)
    for cj, lj in zip(c, spec.scales):
        if spec.space == "L2":
            proj += cj * profiles.l2_rescale(profiles.lambda_w, lj)(r)
        else:
            proj += cj * profiles.h1_rescale(profiles.lambda_w, lj)(r)
    if spec.complement:
        out = np.nan_to_num(f.values) - proj
        tail = f.tail_exponent
        if tail is not None:
            tail = max(tail, -4.0)
        return RadialField(grid, out, tail_exponent=tail, check=False)
    return RadialField(grid, proj, tail_exponent=-4.0, check=False)
