"""Method-of-lines evolution of the radial wave equation in six dimensions.

    u_tt = Delta u + F(u),   Delta = d_rr + (5/r) d_r

with F one of: u^2 (quadratic), |u|u (signed_quadratic), 0 (free), or
+2 sum_j W_(lambda_j) u (linearized: the potential V = -2W summed over the
bubble scales enters the equation as u_tt - Delta u + V u = 0).

Space: 9-point interior stencils on the graded grid, even-extension mirror
rows across the origin, Delta u(0) = 6 u''(0) at the axis.  The outermost
rows are frozen; correctness is guaranteed only on the causal region
{r < r_max - t}, which the t_end invariant enforces (no absorbing layer).
Time: classical RK4 at a fixed step dt = cfl * (smallest spacing).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .grid import RadialGrid, fornberg_weights
from .fields import RadialField, StatePair
from .norms import pair_energy_radial, lp_exterior, h1_exterior
from .grid import SOLID_ANGLE_6D
from . import profiles

STENCIL_HALFWIDTH = 4           # 9-point interior stencils
BLOWUP_FACTOR = 1e6             # sup|u| threshold relative to initial sup
SUPPORT_ENERGY_TOL = 1e-9       # declared support radius: energy tail below this


class BlowupDetected(RuntimeError):
    def __init__(self, t, sup):
        super().__init__(f"sup|u| = {sup:.3e} at t = {t:.6g}")
        self.time = t
        self.sup = sup


@dataclass(frozen=True)
class SolitonConfig:
    """Bubble count, signs, and strictly decreasing positive scales."""
    scales: tuple
    signs: tuple | None = None

    def __post_init__(self):
        scales = tuple(float(s) for s in self.scales)
        signs = tuple(int(s) for s in (self.signs if self.signs is not None
                                       else (1,) * len(scales)))
        if len(scales) < 1:
            raise ValueError("need at least one bubble")
        if len(signs) != len(scales):
            raise ValueError("signs and scales must have equal length")
        if any(s <= 0 or not np.isfinite(s) for s in scales):
            raise ValueError("scales must be positive and finite")
        if any(scales[j + 1] >= scales[j] for j in range(len(scales) - 1)):
            raise ValueError("scales must be strictly decreasing")
        if any(s not in (-1, 1) for s in signs):
            raise ValueError("signs must be +-1")
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "signs", signs)

    @property
    def J(self):
        return len(self.scales)

    def gamma(self):
        s = self.scales
        if len(s) == 1:
            return 0.0
        return max(s[j + 1] / s[j] for j in range(len(s) - 1))


NONLINEARITIES = ("quadratic", "signed_quadratic", "free", "linearized")


@dataclass(frozen=True)
class EvolutionSpec:
    nonlinearity: str
    t_end: float
    cfl: float = 0.45
    dt: float | None = None
    record_stride: int = 200
    potential: SolitonConfig | None = None
    blowup_factor: float = BLOWUP_FACTOR

    def __post_init__(self):
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError(f"unknown nonlinearity {self.nonlinearity!r}")
        if not 0.0 < self.cfl <= 0.5:
            raise ValueError("cfl must lie in (0, 0.5]")
        if self.nonlinearity == "linearized" and self.potential is None:
            raise ValueError("linearized flow needs a potential SolitonConfig")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")


@dataclass
class Trajectory:
    spec: EvolutionSpec
    grid: RadialGrid
    times: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)     # StatePair per time
    energies: list = field(default_factory=list)      # (t, E) pairs
    blowup: BlowupDetected | None = None

    def state(self, i):
        return self.snapshots[i]

    @property
    def final(self):
        return self.snapshots[-1]


def laplacian_matrix(grid: RadialGrid, halfwidth=STENCIL_HALFWIDTH):
    """d_rr + (5/r) d_r with mirror rows near the origin; frozen outer rows."""
    key = ("lap", halfwidth)
    if key in grid._cache:
        return grid._cache[key]
    r = grid.nodes
    M = len(r)
    rows, cols, vals = [], [], []
    for i in range(M - halfwidth):
        idx = np.arange(i - halfwidth, i + halfwidth + 1)
        xs = np.array([r[j] if j >= 0 else -r[-j] for j in idx])
        c = fornberg_weights(r[i], xs, 2)
        if i == 0:
            wrow = 6.0 * c[:, 2]
        else:
            wrow = c[:, 2] + (5.0 / r[i]) * c[:, 1]
        for j, cj in enumerate(np.abs(idx)):
            rows.append(i)
            cols.append(int(cj))
            vals.append(wrow[j])
    A = sp.csr_matrix((vals, (rows, cols)), shape=(M, M))
    grid._cache[key] = A
    return A


def support_radius(state: StatePair, tol=SUPPORT_ENERGY_TOL):
    """Radius beyond which the data carries at most tol of its energy."""
    total = pair_energy_radial(state, 0.0)
    if total == 0.0:
        return 0.0
    grid = state.grid
    du = np.nan_to_num(state.position.derivative_values())
    v = np.nan_to_num(state.velocity.values)
    g = (du * du + v * v) * grid.nodes**5
    suffix = grid.suffix_integrals(g)
    exceed = np.where(suffix > tol * total)[0]
    if len(exceed) == 0:
        return 0.0
    return float(grid.nodes[exceed[-1]])


def _nonlinear_term(kind, potential_values):
    if kind == "quadratic":
        return lambda u: u * u
    if kind == "signed_quadratic":
        return lambda u: np.abs(u) * u
    if kind == "free":
        return lambda u: 0.0
    # linearized around the multisoliton: u_tt = Delta u + 2 (sum W_(l_j)) u
    W = potential_values
    return lambda u: 2.0 * W * u


def evolve(initial: StatePair, spec: EvolutionSpec,
           snapshot_hook=None, check_support=True) -> Trajectory:
    """Run the evolution; snapshots every record_stride steps.

    The trajectory records (t, state) plus the conserved energy per snapshot
    for the conservative flows.  Blow-up (sup-norm growth beyond the spec's
    factor) terminates the run with a flagged partial trajectory.
    """
    grid = initial.grid
    r = grid.nodes
    M = len(r)
    A = laplacian_matrix(grid)
    half = STENCIL_HALFWIDTH

    if check_support:
        rho = support_radius(initial)
        if spec.t_end > grid.r_max - rho:
            raise ValueError(
                f"t_end={spec.t_end:g} exceeds causal margin r_max - support "
                f"= {grid.r_max - rho:g}")

    pot = None
    if spec.nonlinearity == "linearized":
        pot = np.zeros(M)
        for iota, lam in zip(spec.potential.signs, spec.potential.scales):
            pot += iota * profiles.h1_rescale(profiles.ground_state, lam)(r)
    f = _nonlinear_term(spec.nonlinearity, pot)

    hmin = float(np.min(np.diff(r[1:])))
    dt = spec.dt if spec.dt is not None else spec.cfl * hmin
    n_steps = int(np.ceil(spec.t_end / dt))
    dt = spec.t_end / n_steps

    live = np.ones(M)
    live[M - half:] = 0.0

    u = initial.position.values.copy()
    v = initial.velocity.values.copy()
    sup0 = max(np.max(np.abs(u)), 1e-12)

    traj = Trajectory(spec=spec, grid=grid)

    def record(t, u, v):
        state = StatePair(
            RadialField(grid, u, check=False),
            RadialField(grid, v, check=False))
        traj.times.append(t)
        traj.snapshots.append(state)
        traj.energies.append((t, energy(state, spec.nonlinearity, pot)))
        if snapshot_hook is not None:
            snapshot_hook(t, state)

    record(0.0, u, v)
    t = 0.0
    for k in range(n_steps):
        k1u = v * live
        k1v = (A @ u + f(u)) * live
        u2 = u + 0.5 * dt * k1u
        k2u = (v + 0.5 * dt * k1v) * live
        k2v = (A @ u2 + f(u2)) * live
        u3 = u + 0.5 * dt * k2u
        k3u = (v + 0.5 * dt * k2v) * live
        k3v = (A @ u3 + f(u3)) * live
        u4 = u + dt * k3u
        k4u = (v + dt * k3v) * live
        k4v = (A @ u4 + f(u4)) * live
        u = u + dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        t = (k + 1) * dt
        sup = np.max(np.abs(u))
        if not np.isfinite(sup) or sup > spec.blowup_factor * sup0:
            traj.blowup = BlowupDetected(t, sup)
            record(t, u, v)
            return traj
        if (k + 1) % spec.record_stride == 0 or k == n_steps - 1:
            record(t, u, v)
    return traj


def energy(state: StatePair, nonlinearity="quadratic", potential_values=None):
    """E = 1/2 int (u_t^2 + |grad u|^2) dx - (1/3) int u^3 dx (or |u|^3).

    For the linearized flow the cubic term is replaced by the quadratic
    potential energy 1/2 int V u^2 with V = -2 sum W_(lambda_j).
    """
    grid = state.grid
    r = grid.nodes
    u = np.nan_to_num(state.position.values)
    # the drift tolerance is 1e-6 relative: the gradient term needs the
    # high-order derivative matrix, not the spline derivative
    du = grid.derivative_matrix() @ u
    v = np.nan_to_num(state.velocity.values)
    e = 0.5 * grid.integrate((v * v + du * du) * r**5)
    if nonlinearity == "quadratic":
        e -= grid.integrate(u**3 * r**5) / 3.0
    elif nonlinearity == "signed_quadratic":
        e -= grid.integrate(np.abs(u) ** 3 * r**5) / 3.0
    elif nonlinearity == "linearized":
        if potential_values is None:
            raise ValueError("linearized energy needs potential samples")
        e -= grid.integrate(potential_values * u * u * r**5)
    return SOLID_ANGLE_6D * e


def exterior_energy(state: StatePair, R):
    """int_R^inf ((d_r u)^2 + (d_t u)^2) r^5 dr (radial convention)."""
    grid = state.grid
    du = np.nan_to_num(state.position.derivative_values())
    v = np.nan_to_num(state.velocity.values)
    g = (du * du + v * v) * grid.nodes**5
    if R >= grid.r_max:
        return 0.0
    return float(grid.integrate_from(g, max(R, 0.0)))


@dataclass
class ChannelSeries:
    t0: float
    R0: float
    times: np.ndarray
    values: np.ndarray       # exterior energy on {r > R0 + |t - t0|}
    truncated: bool = False

    @property
    def asymptote(self):
        q = max(len(self.values) // 4, 1)
        return float(np.mean(self.values[-q:]))

    @property
    def uncertainty(self):
        q = max(len(self.values) // 4, 1)
        tail = self.values[-q:]
        return float(np.max(tail) - np.min(tail))


def channel_profile(traj: Trajectory, t0=0.0, R0=0.0) -> ChannelSeries:
    """Exterior energy on the expanding cone {r > R0 + |t - t0|} per snapshot."""
    times, vals = [], []
    truncated = False
    for t, state in zip(traj.times, traj.snapshots):
        Rc = R0 + abs(t - t0)
        if Rc >= traj.grid.r_max:
            truncated = True
            break
        times.append(t)
        vals.append(exterior_energy(state, Rc))
    return ChannelSeries(t0=t0, R0=R0, times=np.array(times),
                         values=np.array(vals), truncated=truncated)


def suffix_energy_series(traj: Trajectory, t0=0.0, R0=0.0):
    """(t, cone radius, exterior energy) rows for CSV emission."""
    series = channel_profile(traj, t0, R0)
    return [(t, R0 + abs(t - t0), v) for t, v in zip(series.times, series.values)]
