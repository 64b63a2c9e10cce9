"""Pseudo-spectral incompressible Euler solver on the torus.

Fixed-step RK4 on the projected form du/dt = -P(u . grad u), with 2/3-rule
dealiasing of the quadratic term, re-projection after every full step, and a
CFL guard that aborts the run rather than integrate an under-resolved state.
Also provides the pressure-gradient recovery, flow-map particle integration
with trigonometric velocity interpolation, and the standard 2D benchmark
data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import StabilityError
from .fields import (PHYSICAL, SPECTRAL, Grid, GridField, VectorField,
                     _leray_spectra, dealias_mask, vector_as_physical,
                     vector_as_spectral, wavenumber_mesh)
from .norms import NormSpec

# ---------------------------------------------------------------------------
# configuration and trajectory containers


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step integrator settings.

    ``record_stride``: keep every k-th step in the trajectory (plus t=0).
    """

    dt: float
    T: float
    dealias: bool = True
    cfl_guard: float = 0.5
    record_stride: int = 1

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.T < 0:
            raise ValueError("T must be nonnegative")
        if not 0 < self.cfl_guard <= 0.5:
            raise ValueError("cfl_guard must lie in (0, 0.5]")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        steps = round(self.T / self.dt)
        if abs(steps * self.dt - self.T) > 1e-9 * max(1.0, self.T):
            raise ValueError("T must be an integer number of steps")

    @property
    def steps(self) -> int:
        return round(self.T / self.dt)


@dataclass(frozen=True)
class Trajectory:
    """Recorded solve output; states are kept in spectral representation."""

    times: tuple[float, ...]
    states: tuple[VectorField, ...]
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must pair up")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")

    @property
    def cadence(self) -> float:
        if len(self.times) < 2:
            raise ValueError("trajectory has no time extent")
        return self.times[1] - self.times[0]

    def state_at(self, t: float) -> VectorField:
        for tt, st in zip(self.times, self.states):
            if abs(tt - t) <= 1e-9 * max(1.0, abs(t)):
                return st
        raise ValueError(f"time {t} not recorded in trajectory")


# ---------------------------------------------------------------------------
# spectral-space primitives (raw coefficient arrays for the hot path)


def _spectra(u: VectorField) -> list[np.ndarray]:
    return [np.array(c.values) for c in vector_as_spectral(u).components]


def _wrap_spectral(grid: Grid, spectra, div_free: bool = True) -> VectorField:
    comps = tuple(GridField(grid, s, SPECTRAL, True) for s in spectra)
    return VectorField(comps, div_free=div_free)


class _RHS:
    """Euler right-hand side acting on raw spectral coefficient arrays."""

    def __init__(self, grid: Grid, dealias: bool = True):
        self.grid = grid
        self.nd = grid.n**grid.d
        self.mesh = wavenumber_mesh(grid.n, grid.d)
        self.mask = dealias_mask(grid.n, grid.d) if dealias else np.ones(grid.shape, bool)

    def velocity(self, spectra) -> list[np.ndarray]:
        """Dealiased physical velocity samples."""
        return [np.fft.ifftn(s * self.mask).real * self.nd for s in spectra]

    def advection(self, spectra, vel=None) -> list[np.ndarray]:
        """Spectral coefficients of (u . grad u), dealiased factors."""
        d = self.grid.d
        vel = vel if vel is not None else self.velocity(spectra)
        out = []
        for l in range(d):
            acc = np.zeros(self.grid.shape)
            for m in range(d):
                dlu = np.fft.ifftn(1j * self.mesh[m] * (spectra[l] * self.mask)).real * self.nd
                acc += vel[m] * dlu
            out.append(np.fft.fftn(acc) / self.nd)
        return out

    def __call__(self, spectra, vel=None) -> list[np.ndarray]:
        adv = self.advection(spectra, vel)
        proj = _leray_spectra(adv, self.grid.n, self.grid.d)
        scale = max(np.abs(a).max() for a in adv)
        if scale > 0:
            mean = max(abs(p[(0,) * self.grid.d]) for p in proj)
            if mean > 1e-12 * scale:
                raise RuntimeError("advection term acquired a mean component")
        return [-p for p in proj]


def leray_project(u: VectorField) -> VectorField:
    """Spectral projection onto divergence-free fields (k=0 unchanged)."""
    spec = vector_as_spectral(u)
    proj = _leray_spectra([np.array(c.values) for c in spec.components],
                          u.grid.n, u.grid.d)
    out = _wrap_spectral(u.grid, proj)
    return out if u.rep == SPECTRAL else vector_as_physical(out)


def pressure_gradient(u: VectorField) -> VectorField:
    """grad of the pressure balancing u . grad u (zero-mean pressure)."""
    _check_divfree(u, "pressure_gradient")
    g = u.grid
    rhs = _RHS(g)
    adv = rhs.advection(_spectra(u))
    proj = _leray_spectra([a.copy() for a in adv], g.n, g.d)
    grad_p = [p - a for a, p in zip(adv, proj)]
    out = _wrap_spectral(g, grad_p, div_free=False)
    return out if u.rep == SPECTRAL else vector_as_physical(out)


def euler_rhs(u: VectorField) -> VectorField:
    """-P(u . grad u); divergence-free by construction."""
    _check_divfree(u, "euler_rhs")
    rhs = _RHS(u.grid)
    out = _wrap_spectral(u.grid, rhs(_spectra(u)))
    return out if u.rep == SPECTRAL else vector_as_physical(out)


def _check_divfree(u: VectorField, who: str) -> None:
    from .fields import max_spectral_divergence

    if u.div_free:
        return
    if max_spectral_divergence(u) > 1e-6:
        raise ValueError(f"{who} requires a divergence-free velocity field")


# ---------------------------------------------------------------------------
# diagnostics


def _parseval_l2(grid: Grid, spectra) -> float:
    w = (2.0 * math.pi) ** grid.d
    return math.sqrt(w * sum(float((np.abs(s) ** 2).sum()) for s in spectra))


def _vorticity_spectra(grid: Grid, spectra) -> list[np.ndarray]:
    k = wavenumber_mesh(grid.n, grid.d)
    if grid.d == 2:
        return [1j * (k[0] * spectra[1] - k[1] * spectra[0])]
    return [1j * (k[1] * spectra[2] - k[2] * spectra[1]),
            1j * (k[2] * spectra[0] - k[0] * spectra[2]),
            1j * (k[0] * spectra[1] - k[1] * spectra[0])]


def vorticity(u: VectorField) -> GridField | VectorField:
    """Curl of u: scalar in 2D, vector in 3D (representation preserved)."""
    g = u.grid
    ws = _vorticity_spectra(g, _spectra(u))
    if g.d == 2:
        out = GridField(g, ws[0], SPECTRAL, True)
        from .fields import as_physical

        return out if u.rep == SPECTRAL else as_physical(out)
    out = VectorField(tuple(GridField(g, w, SPECTRAL, True) for w in ws))
    return out if u.rep == SPECTRAL else vector_as_physical(out)


def energy(u: VectorField) -> float:
    """L2 norm of the velocity (conserved by the inviscid dynamics)."""
    return _parseval_l2(u.grid, _spectra(u))


# ---------------------------------------------------------------------------
# the solver


def _record_norms(grid: Grid, spectra, record, diagnostics) -> None:
    diagnostics.setdefault("energy", []).append(_parseval_l2(grid, spectra))
    diagnostics.setdefault("enstrophy", []).append(
        _parseval_l2(grid, _vorticity_spectra(grid, spectra)))
    if record:
        from .bank import default_bank
        from .norms import field_norm

        bank = default_bank(grid.n, grid.d)
        state = _wrap_spectral(grid, spectra)
        for spec in record:
            diagnostics.setdefault(spec.label, []).append(field_norm(bank, state, spec))


def solve(u0: VectorField, cfg: SolverConfig,
          record: tuple[NormSpec, ...] = ()) -> Trajectory:
    """March the projected dynamics from u0; record every ``record_stride`` steps.

    Raises :class:`StabilityError` the moment ``max|u| dt / dx`` exceeds the
    guard, carrying the offending time.
    """
    _check_divfree(u0, "solve")
    g = u0.grid
    rhs = _RHS(g, cfg.dealias)
    state = _leray_spectra(_spectra(u0), g.n, g.d)
    dt = cfg.dt

    times = [0.0]
    states = [_wrap_spectral(g, [s.copy() for s in state])]
    diagnostics: dict = {}
    _record_norms(g, state, record, diagnostics)

    for step in range(cfg.steps):
        t = step * dt
        vel = rhs.velocity(state)
        vmax = max(np.abs(v).max() for v in vel)
        if vmax * dt / g.spacing > cfg.cfl_guard:
            raise StabilityError(
                f"CFL guard {cfg.cfl_guard} exceeded at t={t:.6g} "
                f"(max|u| dt/dx = {vmax * dt / g.spacing:.3g})", time=t)
        k1 = rhs(state, vel)
        k2 = rhs([s + 0.5 * dt * k for s, k in zip(state, k1)])
        k3 = rhs([s + 0.5 * dt * k for s, k in zip(state, k2)])
        k4 = rhs([s + dt * k for s, k in zip(state, k3)])
        state = [s + dt / 6.0 * (a + 2 * b + 2 * c + e)
                 for s, a, b, c, e in zip(state, k1, k2, k3, k4)]
        state = _leray_spectra(state, g.n, g.d)
        if (step + 1) % cfg.record_stride == 0 or step + 1 == cfg.steps:
            times.append((step + 1) * dt)
            states.append(_wrap_spectral(g, [s.copy() for s in state]))
            _record_norms(g, state, record, diagnostics)

    diagnostics = {k: tuple(v) for k, v in diagnostics.items()}
    return Trajectory(tuple(times), tuple(states), diagnostics)


# ---------------------------------------------------------------------------
# flow map


@dataclass(frozen=True)
class FlowMapResult:
    """Particle positions X(alpha, t) at requested times.

    ``positions[i]`` has shape (d, *seed_shape); positions are unwrapped
    (not reduced modulo 2 pi) so displacements stay differentiable in alpha.
    """

    times: tuple[float, ...]
    seeds: np.ndarray          # (d, *seed_shape) initial positions
    positions: tuple[np.ndarray, ...]

    def displacement(self, i: int) -> np.ndarray:
        return self.positions[i] - self.seeds


def _eval_velocity(spectra, xs, grid: Grid) -> np.ndarray:
    """Trigonometric interpolation of u at arbitrary points xs (d, P)."""
    n, d = grid.n, grid.d
    k1 = np.fft.fftfreq(n, d=1.0 / n)
    phases = [np.exp(1j * np.outer(xs[a], k1)) for a in range(d)]  # (P, n) each
    out = np.empty((d, xs.shape[1]))
    for l in range(d):
        U = spectra[l]
        if d == 2:
            tmp = U @ phases[1].T                     # (n, P)
            vals = np.einsum("pk,kp->p", phases[0], tmp)
        else:
            tmp = np.tensordot(U, phases[2].T, axes=([2], [0]))   # (n, n, P)
            tmp = np.einsum("pk,kqp->qp", phases[0], tmp)          # (n, P) over k1
            vals = np.einsum("pk,kp->p", phases[1], tmp)
        out[l] = vals.real
    return out


def default_seed_grid(grid: Grid) -> np.ndarray:
    """Particles seeded on the full collocation lattice, shape (d, *shape)."""
    mesh = grid.meshes()
    return np.stack(mesh)


def flow_map(traj: Trajectory, times, seeds: np.ndarray | None = None) -> FlowMapResult:
    """Integrate particles through the recorded velocity history.

    The particle step is twice the trajectory cadence (RK4 midpoint stages
    fall on recorded states, so no temporal interpolation is needed); the
    requested times must sit on that doubled lattice.
    """
    grid = traj.states[0].grid
    cad = traj.cadence
    if any(abs(t2 - t1 - cad) > 1e-9 for t1, t2 in zip(traj.times, traj.times[1:])):
        raise ValueError("flow_map needs a uniformly recorded trajectory")
    h = 2.0 * cad
    t_req = sorted(float(t) for t in times)
    if not t_req:
        raise ValueError("no times requested")
    for t in t_req:
        if t < -1e-12 or t > traj.times[-1] + 1e-12:
            raise ValueError(f"time {t} outside the trajectory range")
        if abs(t / h - round(t / h)) > 1e-8:
            raise ValueError(f"time {t} is not a multiple of the particle step {h}")

    if seeds is None:
        seeds = default_seed_grid(grid)
    seeds = np.asarray(seeds, dtype=float)
    if seeds.ndim < 2 or seeds.shape[0] != grid.d:
        raise ValueError(f"seeds must be component-first, shape (d, ...); got {seeds.shape}")
    seed_shape = seeds.shape[1:]
    xs = seeds.reshape(grid.d, -1).copy()

    spectra_at = [[np.array(c.values) for c in st.components] for st in traj.states]
    out_times, out_pos = [], []
    if abs(t_req[0]) <= 1e-12:
        out_times.append(0.0)
        out_pos.append(xs.reshape(seeds.shape).copy())
        t_req = t_req[1:]

    pos = xs
    step = 0
    for t_target in t_req:
        target_steps = round(t_target / h)
        while step < target_steps:
            s0, s1, s2 = (spectra_at[2 * step], spectra_at[2 * step + 1],
                          spectra_at[2 * step + 2])
            k1 = _eval_velocity(s0, pos, grid)
            k2 = _eval_velocity(s1, pos + 0.5 * h * k1, grid)
            k3 = _eval_velocity(s1, pos + 0.5 * h * k2, grid)
            k4 = _eval_velocity(s2, pos + h * k3, grid)
            pos = pos + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            step += 1
        out_times.append(step * h)
        out_pos.append(pos.reshape(seeds.shape).copy())
    return FlowMapResult(tuple(out_times), seeds.reshape(grid.d, *seed_shape),
                         tuple(out_pos))


def jacobian_determinant(fmr: FlowMapResult, i: int) -> np.ndarray:
    """det dX/dalpha at output time i via 6th-order differences on the seed grid.

    Valid only when the seeds are the full collocation lattice (periodic in
    alpha); uses the displacement field so the identity part is exact.
    """
    disp = fmr.displacement(i)
    d = disp.shape[0]
    shape = disp.shape[1:]
    if len(shape) != d or len(set(shape)) != 1:
        raise ValueError("jacobian needs full-lattice seeds")
    n = shape[0]
    h = 2.0 * math.pi / n
    jac = np.zeros((d, d) + shape)
    for l in range(d):
        for a in range(d):
            f = disp[l]
            deriv = (np.roll(f, -3, axis=a) - 9 * np.roll(f, -2, axis=a)
                     + 45 * np.roll(f, -1, axis=a) - 45 * np.roll(f, 1, axis=a)
                     + 9 * np.roll(f, 2, axis=a) - np.roll(f, 3, axis=a)) / (60 * h)
            jac[l, a] = deriv + (1.0 if l == a else 0.0)
    if d == 2:
        return jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    return (jac[0, 0] * (jac[1, 1] * jac[2, 2] - jac[1, 2] * jac[2, 1])
            - jac[0, 1] * (jac[1, 0] * jac[2, 2] - jac[1, 2] * jac[2, 0])
            + jac[0, 2] * (jac[1, 0] * jac[2, 1] - jac[1, 1] * jac[2, 0]))


# ---------------------------------------------------------------------------
# benchmark data


def taylor_green(grid: Grid) -> VectorField:
    """The classical cellular vortex (an exact steady state in 2D)."""
    x = grid.meshes()
    if grid.d == 2:
        comps = (np.sin(x[0]) * np.cos(x[1]), -np.cos(x[0]) * np.sin(x[1]))
    else:
        comps = (np.sin(x[0]) * np.cos(x[1]) * np.cos(x[2]),
                 -np.cos(x[0]) * np.sin(x[1]) * np.cos(x[2]),
                 np.zeros(grid.shape))
    return VectorField(tuple(GridField(grid, c, PHYSICAL, True) for c in comps),
                       div_free=True)


def taylor_green_stream(grid: Grid) -> GridField:
    """Stream function of the 2D cellular vortex.

    The flow is steady, so particle paths stay on its level sets exactly;
    near a cell center the linearized flow is a unit-rate rotation with
    period 2 pi.  This is the flow-map orbit oracle.
    """
    if grid.d != 2:
        raise ValueError("the stream-function oracle is 2D")
    x = grid.meshes()
    return GridField(grid, np.sin(x[0]) * np.sin(x[1]), PHYSICAL, True)


def stream_values(points: np.ndarray) -> np.ndarray:
    """sin(x) sin(y) evaluated at points of shape (2, ...)."""
    return np.sin(points[0]) * np.sin(points[1])


def steady_trajectory(u: VectorField, T: float, cadence: float) -> Trajectory:
    """A constant-in-time trajectory (for kinematic flow-map studies)."""
    steps = round(T / cadence)
    if abs(steps * cadence - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be an integer number of cadence intervals")
    state = _wrap_spectral(u.grid, _spectra(u), div_free=u.div_free)
    times = tuple(i * cadence for i in range(steps + 1))
    return Trajectory(times, (state,) * (steps + 1))
