"""Energy functionals of the surface variables and their variational derivatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PeriodicGrid, SurfaceState, WaveParameters, spectral_derivative
from .harmonic import (SurfaceTraces, evaluate_interior, hilbert_transform, solve_dirichlet,
                       surface_traces)

MISMATCH_FLOOR = 1e-12


@dataclass(frozen=True)
class EnergyReport:
    H_surface: float
    H_volume: float
    kinetic: float
    potential: float
    mass: float
    relative_mismatch: float


def energy_terms(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                 t_xi=None) -> tuple[float, float, float, float]:
    """The four integrals making up the surface Hamiltonian, in order.

    ``(1/2) int xi_x T(eta)xi``, ``(g/2) int eta^2``,
    ``-(omega/2) int xi_x eta^2`` and ``(omega^2/6) int eta^3``.
    """
    eta, xi = state.eta, state.xi
    if t_xi is None:
        t_xi = hilbert_transform(grid, params, eta, xi)
    xi_x = spectral_derivative(grid, xi)
    om = params.omega
    return (0.5 * grid.inner(xi_x, t_xi),
            0.5 * params.g * grid.integrate(eta**2),
            -0.5 * om * grid.inner(xi_x, eta**2),
            om**2 / 6.0 * grid.integrate(eta**3))


def energy_surface(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                   t_xi=None) -> float:
    """Total energy per period evaluated from the surface variables alone."""
    return float(sum(energy_terms(grid, params, state, t_xi)))


def energy_volume(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                  order: int = 24) -> EnergyReport:
    """Energy from the kinetic and potential densities integrated over the fluid.

    Each column ``0 <= y <= eta_j`` is integrated with an ``order``-point
    Gauss-Legendre rule; columns are combined with the periodic trapezoid rule.
    """
    eta, xi = state.eta, state.xi
    fld = solve_dirichlet(grid, params, eta, xi)
    s, w = np.polynomial.legendre.leggauss(order)
    # column nodes y_jq = eta_j (1 + s_q) / 2, weights eta_j w_q / 2
    Y = 0.5 * np.outer(eta, 1 + s)
    W = 0.5 * np.outer(eta, w)
    X = np.repeat(grid.x, order)
    vals = evaluate_interior(fld, params, np.column_stack([X, Y.ravel()]))
    ke = 0.5 * (vals.u**2 + vals.v**2).reshape(grid.N, order)
    kinetic = grid.integrate((W * ke).sum(axis=1))
    potential = grid.integrate((W * params.g * Y).sum(axis=1))
    H_vol = kinetic + potential
    t_xi = fld.conjugate(grid.x, eta)
    H_surf = energy_surface(grid, params, state, t_xi=t_xi)
    mismatch = abs(H_surf - H_vol) / max(abs(H_vol), MISMATCH_FLOOR)
    return EnergyReport(H_surface=H_surf, H_volume=H_vol, kinetic=kinetic,
                        potential=potential, mass=mass(grid, state),
                        relative_mismatch=mismatch)


def grad_xi(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
            traces: SurfaceTraces) -> np.ndarray:
    """dH/dxi = v - u eta_x at the surface, with u = xi1 - omega eta and v = xi2."""
    eta = state.eta
    eta_x = spectral_derivative(grid, eta)
    return traces.xi2 - (traces.xi1 - params.omega * eta) * eta_x


def grad_eta(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
             traces: SurfaceTraces) -> np.ndarray:
    """dH/deta with xi held fixed."""
    eta = state.eta
    eta_x = spectral_derivative(grid, eta)
    om = params.omega
    x1, x2 = traces.xi1, traces.xi2
    return (-om * eta * eta_x * x2
            - om * eta * x1
            + 0.5 * om**2 * eta**2
            + 0.5 * (x1**2 + x2**2)
            + params.g * eta
            - x2**2
            + x1 * x2 * eta_x)


def chi_of_state(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState) -> np.ndarray:
    """Stream function on the surface, T(eta)xi - (omega/2) eta^2."""
    return hilbert_transform(grid, params, state.eta, state.xi) - 0.5 * params.omega * state.eta**2


def mass(grid: PeriodicGrid, state: SurfaceState) -> float:
    return grid.integrate(state.eta)


def traces_of(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState) -> SurfaceTraces:
    fld = solve_dirichlet(grid, params, state.eta, state.xi)
    return surface_traces(fld, grid, params, state.eta)


def gradients(grid, params, state, traces=None):
    """(dH/deta, dH/dxi, traces) in one solve."""
    if traces is None:
        traces = traces_of(grid, params, state)
    return (grad_eta(grid, params, state, traces),
            grad_xi(grid, params, state, traces), traces)
