"""Time evolution of the surface variables.

The right-hand side is the nearly-Hamiltonian system

    eta_t = dH/dxi,     xi_t = -dH/deta - omega * chi,

advanced with classical RK4.  A spatially constant drift of ``xi`` is a
pure gauge effect; by default it is removed after every step.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (PeriodicGrid, SurfaceState, WaveParameters, dealias, dealias_cutoff,
                   spectral_derivative)
from .hamiltonian import chi_of_state, energy_surface, gradients, mass
from .harmonic import SolverError, solve_dirichlet

log = logging.getLogger(__name__)


class StepError(RuntimeError):
    """A Runge-Kutta stage failed."""

    def __init__(self, stage, cause):
        super().__init__(f"RK4 stage {stage} failed: {cause}")
        self.stage = stage
        self.cause = cause


class SurfaceCollapseError(StepError):
    def __init__(self, min_eta, floor):
        RuntimeError.__init__(
            self, f"surface collapsed onto the bed: min(eta) = {min_eta:.3e} < {floor:.3e}")
        self.stage = None
        self.cause = None
        self.min_eta = min_eta


def rhs(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
        dealiased: bool = True, return_parts: bool = False):
    """(eta_dot, xi_dot) for ``state``.

    With ``dealiased`` the 2/3-rule filter of ``params.dealias_fraction`` is
    applied to both components.  ``return_parts`` additionally returns the
    gradients and traces used.
    """
    g_eta, g_xi, traces = gradients(grid, params, state)
    eta_dot = g_xi
    xi_dot = -g_eta - params.omega * traces.chi
    if dealiased:
        eta_dot = dealias(grid, eta_dot, params.dealias_fraction)
        xi_dot = dealias(grid, xi_dot, params.dealias_fraction)
    if return_parts:
        return eta_dot, xi_dot, (g_eta, g_xi, traces)
    return eta_dot, xi_dot


def linear_frequencies(params: WaveParameters, k):
    """Angular frequencies of the two linear waves with wavenumber ``k > 0`` on the flat shear state.

    Modes ``exp(i(k x - sigma t))``; returns ``(sigma_minus, sigma_plus)``.
    """
    k = np.asarray(k, dtype=float)
    d, om = params.d_ref, params.omega
    th = np.tanh(k * d)
    disc = np.sqrt(om**2 * th**2 + 4 * params.g * k * th)
    doppler = om * d * k
    return 0.5 * (om * th - disc) - doppler, 0.5 * (om * th + disc) - doppler


def suggest_dt(grid: PeriodicGrid, params: WaveParameters, safety: float = 0.5) -> float:
    """``safety / sigma_max`` with sigma_max the fastest linear frequency kept by the filter."""
    m = dealias_cutoff(grid, params.dealias_fraction) if params.dealias_fraction < 1 else grid.N // 2
    k = grid.k1 * np.arange(1, m + 1)
    s_lo, s_hi = linear_frequencies(params, k)
    smax = max(np.abs(s_lo).max(), np.abs(s_hi).max())
    return safety / smax


def step_rk4(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState, dt: float,
             normalize_gauge: bool = True, eta_floor: float | None = None,
             dealiased: bool = True) -> SurfaceState:
    """One classical RK4 step.  Negative ``dt`` integrates backwards."""
    if dt == 0 or not np.isfinite(dt):
        raise ValueError("dt must be finite and nonzero")
    floor = 1e-6 * params.d_ref if eta_floor is None else eta_floor
    eta0, xi0 = state.eta, state.xi
    stages = []
    offsets = (0.0, 0.5, 0.5, 1.0)
    for i, c in enumerate(offsets):
        if i == 0:
            s = state
        else:
            ke, kx = stages[-1]
            eta = eta0 + c * dt * ke
            if np.min(eta) <= 0:
                raise StepError(i + 1, "intermediate surface reached the bed")
            s = SurfaceState(state.t + c * dt, eta, xi0 + c * dt * kx)
        try:
            stages.append(rhs(grid, params, s, dealiased=dealiased))
        except SolverError as exc:
            raise StepError(i + 1, exc) from exc
    w = (1.0, 2.0, 2.0, 1.0)
    eta = eta0 + dt / 6.0 * sum(wi * st[0] for wi, st in zip(w, stages))
    xi = xi0 + dt / 6.0 * sum(wi * st[1] for wi, st in zip(w, stages))
    if not np.all(np.isfinite(eta)) or not np.all(np.isfinite(xi)):
        raise StepError(4, "non-finite state")
    if np.min(eta) < floor:
        raise SurfaceCollapseError(float(np.min(eta)), floor)
    if normalize_gauge:
        xi = xi - np.mean(xi)
    return SurfaceState(state.t + dt, eta, xi)


DIAGNOSTIC_COLUMNS = ("t", "H_surface", "mass", "min_eta", "max_eta", "max_dev", "solve_residual")


@dataclass
class Trajectory:
    """Snapshots and per-snapshot diagnostics of one run.

    ``diagnostics`` has one row per snapshot with the columns in
    :data:`DIAGNOSTIC_COLUMNS`.  ``error`` is set when the run aborted.
    """

    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    error: Exception | None = None

    @property
    def diagnostics(self) -> np.ndarray:
        return np.array(self.rows, dtype=float).reshape(-1, len(DIAGNOSTIC_COLUMNS))

    def column(self, name) -> np.ndarray:
        return self.diagnostics[:, DIAGNOSTIC_COLUMNS.index(name)]

    @property
    def final(self) -> SurfaceState:
        return self.states[-1]


def diagnose(grid, params, state) -> tuple:
    fld = solve_dirichlet(grid, params, state.eta, state.xi)
    H = energy_surface(grid, params, state, t_xi=fld.conjugate(grid.x, state.eta))
    eta = state.eta
    return (state.t, H, mass(grid, state), float(eta.min()), float(eta.max()),
            float(np.max(np.abs(eta - eta.mean()))), fld.residual)


def integrate(grid: PeriodicGrid, params: WaveParameters, state0: SurfaceState, t_end: float,
              dt: float, output_stride: float | None = None, normalize_gauge: bool = True,
              eta_floor: float | None = None, dealiased: bool = True,
              monitor=None) -> Trajectory:
    """Advance ``state0`` to ``t_end`` with fixed RK4 steps.

    ``output_stride`` is the time between stored snapshots and must be an
    integer multiple of ``dt`` (default: every step).  Steps that fail stop
    the run; the partial trajectory is returned with ``error`` set.
    ``monitor(state, row)`` may raise to stop early (used for instability
    detection) and the exception is recorded the same way.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    duration = t_end - state0.t
    if duration < -1e-12 * max(1.0, abs(t_end)):
        raise ValueError("t_end precedes the initial time")
    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9 * max(dt, abs(duration)):
        raise ValueError("dt must divide the integration interval")
    if output_stride is None:
        every = 1
    else:
        every = int(round(output_stride / dt))
        if every < 1 or abs(every * dt - output_stride) > 1e-9 * output_stride:
            raise ValueError("output_stride must be a positive multiple of dt")
    traj = Trajectory()
    row = diagnose(grid, params, state0)
    traj.times.append(state0.t)
    traj.states.append(state0)
    traj.rows.append(row)
    state = state0
    t0 = state0.t
    for n in range(1, n_steps + 1):
        try:
            state = step_rk4(grid, params, state, dt, normalize_gauge=normalize_gauge,
                             eta_floor=eta_floor, dealiased=dealiased)
            state = SurfaceState(t0 + n * dt, state.eta, state.xi)
            if n % every == 0 or n == n_steps:
                row = diagnose(grid, params, state)
                traj.times.append(state.t)
                traj.states.append(state)
                traj.rows.append(row)
                if monitor is not None:
                    monitor(state, row)
        except Exception as exc:  # noqa: BLE001 - partial trajectory is the contract
            log.warning("integration stopped at t=%.6g: %s", state.t, exc)
            traj.error = exc
            break
    return traj


def linearize(grid: PeriodicGrid, params: WaveParameters, base: SurfaceState,
              eps: float = 1e-6, dealiased: bool = True) -> np.ndarray:
    """Central-difference Jacobian of :func:`rhs` in stacked ``(eta, xi)`` coordinates.

    The constant-``xi`` gauge direction is projected out on both sides.
    """
    N = grid.N
    A = np.empty((2 * N, 2 * N))
    z0 = np.concatenate([base.eta, base.xi])
    for j in range(2 * N):
        zp, zm = z0.copy(), z0.copy()
        zp[j] += eps
        zm[j] -= eps
        fp = rhs(grid, params, SurfaceState(base.t, zp[:N], zp[N:]), dealiased=dealiased)
        fm = rhs(grid, params, SurfaceState(base.t, zm[:N], zm[N:]), dealiased=dealiased)
        A[:, j] = (np.concatenate(fp) - np.concatenate(fm)) / (2 * eps)
    e = np.zeros(2 * N)
    e[N:] = 1.0 / np.sqrt(N)
    P = np.eye(2 * N) - np.outer(e, e)
    return P @ A @ P


def linear_mode(grid: PeriodicGrid, params: WaveParameters, m: int, amplitude: float,
                branch: int = 1, t: float = 0.0) -> SurfaceState:
    """Flat state plus one linear traveling wave ``eta = d + a cos(k_m x)``.

    ``branch`` selects the right-going (+1) or left-going (-1) root.  The
    matching potential is ``xi = a (c + omega d) / tanh(k d) sin(k_m x)``.
    """
    if m < 1 or m > dealias_cutoff(grid, params.dealias_fraction):
        raise ValueError(f"mode {m} outside the dealiased range")
    k = grid.k1 * m
    lo, hi = linear_frequencies(params, k)
    c = (hi if branch > 0 else lo) / k
    d = params.d_ref
    eta = d + amplitude * np.cos(k * grid.x)
    xi = amplitude * (c + params.omega * d) / np.tanh(k * d) * np.sin(k * grid.x)
    return SurfaceState(t, eta, xi)


def eta_dot_from_chi(grid, params, state) -> np.ndarray:
    """The kinematic rate written as -d(chi)/dx; equals ``rhs(...)[0]`` up to truncation."""
    return -spectral_derivative(grid, chi_of_state(grid, params, state))
