"""Interior velocity, stream function and pressure from the surface variables."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PeriodicGrid, SurfaceState, WaveParameters
from .dynamics import rhs
from .harmonic import evaluate_interior, solve_dirichlet


@dataclass(frozen=True)
class FieldSamples:
    """Point samples; ``P`` and ``phi_t`` are NaN when only kinematics were requested."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    P: np.ndarray
    phi_t: np.ndarray

    def as_array(self) -> np.ndarray:
        """Columns x, y, u, v, psi, P."""
        return np.column_stack([self.x, self.y, self.u, self.v, self.psi, self.P])


class FlowReconstruction:
    """Solved potential and potential time derivative for one state.

    Pressure needs ``phi_t`` in the interior.  It is the harmonic function
    with the bed condition whose surface trace is ``xi_t - xi2 eta_t``, with
    ``eta_t, xi_t`` the unfiltered evolution rates.  Construct once and
    sample as often as needed.
    """

    def __init__(self, grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                 with_pressure: bool = True):
        self.grid, self.params, self.state = grid, params, state
        self.field = solve_dirichlet(grid, params, state.eta, state.xi)
        self.field_t = None
        if with_pressure:
            eta_t, xi_t, (_, _, traces) = rhs(grid, params, state, dealiased=False,
                                              return_parts=True)
            self.eta_t, self.xi_t = eta_t, xi_t
            self.field_t = solve_dirichlet(grid, params, state.eta, xi_t - traces.xi2 * eta_t)

    def sample(self, points, allow_extension: bool = False) -> FieldSamples:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        vals = evaluate_interior(self.field, self.params, pts, allow_extension=allow_extension)
        x, y = pts[:, 0], pts[:, 1]
        if self.field_t is None:
            nan = np.full(len(x), np.nan)
            return FieldSamples(x, y, vals.u, vals.v, vals.psi, nan, nan.copy())
        p = self.params
        phi_t = self.field_t.potential(x, y)
        P = p.P_atm - phi_t - 0.5 * (vals.u**2 + vals.v**2) - p.omega * vals.psi - p.g * y
        return FieldSamples(x, y, vals.u, vals.v, vals.psi, P, phi_t)


def velocity_field(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                   points) -> FieldSamples:
    return FlowReconstruction(grid, params, state, with_pressure=False).sample(points)


def pressure_field(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                   points) -> FieldSamples:
    """Velocity, stream function and pressure from the generalized Bernoulli law."""
    return FlowReconstruction(grid, params, state).sample(points)


def bed_flow_check(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState) -> float:
    """Trapezoid quadrature of the bed velocity over one period (zero for periodic potentials)."""
    fld = solve_dirichlet(grid, params, state.eta, state.xi)
    u_bed, _ = fld.gradient(grid.x, np.zeros(grid.N))
    return grid.integrate(u_bed)


def sample_lattice(grid: PeriodicGrid, state: SurfaceState, ny: int = 16) -> np.ndarray:
    """Points ``(x_j, eta_j * i / (ny - 1))``: every grid column from bed to surface."""
    if ny < 2:
        raise ValueError("ny must be at least 2")
    frac = np.linspace(0.0, 1.0, ny)
    X = np.repeat(grid.x, ny)
    Y = np.outer(state.eta, frac).ravel()
    return np.column_stack([X, Y])
