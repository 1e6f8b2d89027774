"""Sampled radial fields and phase-space pairs on a graded grid.

A RadialField is immutable: grid, one value per node, a regularity class
(smooth at the origin, or defined only outside some radius), and an optional
declared power-law exponent for its tail beyond r_max.  Exterior-only fields
carry NaN below their start radius; every consumer masks on `defined_from`.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import RadialGrid, fornberg_weights

SMOOTH = "smooth-at-origin"
EXTERIOR = "exterior-only"


class RadialField:
    def __init__(self, grid: RadialGrid, values, regularity=SMOOTH,
                 r_start=0.0, tail_exponent=None, check=True):
        values = np.asarray(values, dtype=float).copy()
        if values.shape != grid.nodes.shape:
            raise ValueError("values must match grid size")
        if regularity not in (SMOOTH, EXTERIOR):
            raise ValueError(f"unknown regularity class {regularity!r}")
        if regularity == EXTERIOR:
            if not r_start > 0.0:
                raise ValueError("exterior-only fields need r_start > 0")
            values[grid.nodes < r_start] = np.nan
        self.grid = grid
        self.values = values
        self.values.setflags(write=False)
        self.regularity = regularity
        self.r_start = float(r_start) if regularity == EXTERIOR else 0.0
        self.tail_exponent = tail_exponent
        self._cache = {}
        if check and regularity == SMOOTH:
            self._check_origin_regularity()

    # ---------------- construction ----------------

    @classmethod
    def from_callable(cls, grid, fn, tail_exponent=None, check=False):
        return cls(grid, fn(grid.nodes), SMOOTH, tail_exponent=tail_exponent,
                   check=check)

    @classmethod
    def zero(cls, grid):
        return cls(grid, np.zeros(grid.size), check=False)

    def _check_origin_regularity(self, tol=1e-2):
        """Discrete even-extension compatibility: |f'(0)| small vs the local scale.

        For an even (smooth radial) field, f(r)-f(0) = O(r^2) across the first
        cells, so the secant-scale derivative estimate times the window span
        must be tiny compared to the field magnitude near the origin.
        """
        r = self.grid.nodes[:5]
        c = fornberg_weights(0.0, r, 1)
        d0 = float(c[:, 1] @ self.values[:5])
        local = float(np.nanmax(np.abs(self.values[:8])))
        if local > 0 and abs(d0) * r[-1] > tol * local:
            raise ValueError(
                f"field not even at origin: f'(0)~{d0:.3e} vs local scale {local:.3e}")

    # ---------------- evaluation ----------------

    @property
    def defined_from(self):
        return self.r_start if self.regularity == EXTERIOR else 0.0

    def _mask(self):
        return ~np.isnan(self.values)

    def spline(self):
        if "spline" not in self._cache:
            m = self._mask()
            r = self.grid.nodes[m]
            v = self.values[m]
            if self.regularity == SMOOTH:
                bc = ((1, 0.0), "not-a-knot")  # even extension: f'(0)=0
            else:
                bc = "not-a-knot"
            self._cache["spline"] = CubicSpline(r, v, bc_type=bc)
        return self._cache["spline"]

    def __call__(self, r):
        """Evaluate anywhere; beyond r_max uses the declared tail law."""
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.spline()(np.clip(r, self.defined_from, self.grid.r_max)))
        beyond = r > self.grid.r_max
        if np.any(beyond):
            if self.tail_exponent is None:
                out = np.where(beyond, 0.0, out)
            else:
                v_end = self.values[-1]
                out = np.where(beyond, v_end * (r / self.grid.r_max) ** self.tail_exponent, out)
        below = r < self.defined_from
        if np.any(below):
            out = np.where(below, np.nan, out)
        return out if out.ndim else float(out)

    def derivative_values(self):
        """df/dr sampled at the nodes (NaN where undefined)."""
        if "deriv" not in self._cache:
            m = self._mask()
            d = np.full(self.grid.size, np.nan)
            d[m] = self.spline()(self.grid.nodes[m], 1)
            if self.regularity == SMOOTH:
                d[0] = 0.0
            d.setflags(write=False)
            self._cache["deriv"] = d
        return self._cache["deriv"]

    # ---------------- algebra ----------------

    def _wrap(self, values, tail_exponent=None):
        reg = self.regularity
        return RadialField(self.grid, values, reg, self.r_start,
                           tail_exponent if tail_exponent is not None else self.tail_exponent,
                           check=False)

    def __add__(self, other):
        if isinstance(other, RadialField):
            if other.grid is not self.grid and other.grid != self.grid:
                raise ValueError("fields live on different grids")
            reg = EXTERIOR if EXTERIOR in (self.regularity, other.regularity) else SMOOTH
            rs = max(self.r_start, other.r_start)
            te = self.tail_exponent
            if te is not None and other.tail_exponent is not None:
                te = max(te, other.tail_exponent)
            elif other.tail_exponent is not None:
                te = other.tail_exponent
            return RadialField(self.grid, self.values + other.values, reg, rs, te, check=False)
        return NotImplemented

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, c):
        if np.isscalar(c):
            return self._wrap(self.values * c)
        return NotImplemented

    __rmul__ = __mul__


class StatePair:
    """Phase-space point (u, du/dt); both components share one grid."""

    def __init__(self, position: RadialField, velocity: RadialField):
        if position.grid is not velocity.grid and position.grid != velocity.grid:
            raise ValueError("position and velocity must share a grid")
        self.position = position
        self.velocity = velocity
        self.grid = position.grid

    @classmethod
    def zero(cls, grid):
        return cls(RadialField.zero(grid), RadialField.zero(grid))

    def __iter__(self):
        yield self.position
        yield self.velocity


# ---------------- rescaling and extension ----------------

def _rescaled_values(f: RadialField, lam, power):
    if not (np.isfinite(lam) and lam > 0.0):
        raise ValueError(f"degenerate scale {lam!r}")
    r = f.grid.nodes
    s = r / lam
    vals = np.empty_like(r)
    inside = s <= f.grid.r_max
    vals[inside] = f.spline()(np.clip(s[inside], f.defined_from, None))
    if np.any(~inside):
        if f.tail_exponent is None:
            raise ValueError("rescaling needs samples beyond r_max: declare a tail exponent")
        vals[~inside] = f.values[-1] * (s[~inside] / f.grid.r_max) ** f.tail_exponent
    if f.regularity == EXTERIOR:
        vals[s < f.r_start] = np.nan
    return vals / lam**power


def rescale_h1(f: RadialField, lam) -> RadialField:
    """f_(lam)(r) = lam^-2 f(r/lam), resampled on the same grid."""
    vals = _rescaled_values(f, lam, 2)
    rs = f.r_start * lam if f.regularity == EXTERIOR else 0.0
    return RadialField(f.grid, vals, f.regularity, rs, f.tail_exponent, check=False)


def rescale_l2(f: RadialField, lam) -> RadialField:
    """f_[lam](r) = lam^-3 f(r/lam), resampled on the same grid."""
    vals = _rescaled_values(f, lam, 3)
    rs = f.r_start * lam if f.regularity == EXTERIOR else 0.0
    return RadialField(f.grid, vals, f.regularity, rs, f.tail_exponent, check=False)


def extend_inward(f: RadialField, R=None) -> RadialField:
    """C^1 interior extension u(r) -> 3u(2R-r) - 2u(3R-2r) for 0 < r < R.

    Matches value and first derivative at r = R; the L^p norm of the
    extension is controlled by the exterior norm uniformly in R.
    """
    if R is None:
        R = f.r_start
    if not R > 0:
        raise ValueError("extension needs R > 0")
    if f.regularity == EXTERIOR and R < f.r_start:
        raise ValueError("field undefined on (R, r_start)")
    if 3.0 * R > f.grid.r_max:
        raise ValueError("R exceeds grid third: reflection needs samples up to 3R")
    r = f.grid.nodes
    inner = r < R
    vals = f.values.copy()
    sp = f.spline()
    vals[inner] = 3.0 * sp(2.0 * R - r[inner]) - 2.0 * sp(3.0 * R - 2.0 * r[inner])
    return RadialField(f.grid, vals, SMOOTH, 0.0, f.tail_exponent, check=False)
