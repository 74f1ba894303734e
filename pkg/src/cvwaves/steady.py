"""Traveling (steady) waves: relative mass flux, shifted Hamiltonian and Newton continuation.

A wave of speed ``c`` satisfies ``eta_t = -c eta_x`` and ``xi_t = -c xi_x + B``
for a Bernoulli gauge constant ``B``.  Solutions are sought among waves that
are even about the crest, i.e. ``eta`` a cosine series and ``xi`` a sine
series; the problem is then square in

    (eta cosine modes 2..K, xi sine modes 1..K, c, B)

with the mean depth and the first cosine amplitude of ``eta`` prescribed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import (PeriodicGrid, SurfaceState, WaveParameters, dealias_cutoff, fourier_modes,
                   spectral_derivative)
from .dynamics import linear_frequencies, rhs
from .hamiltonian import energy_surface, gradients, mass
from .harmonic import SolverError

log = logging.getLogger(__name__)


class SteadySolveError(RuntimeError):
    """Newton iteration for a traveling wave failed."""

    def __init__(self, message, best=None, history=()):
        super().__init__(message)
        self.best = best
        self.history = list(history)


class BifurcationPointError(SteadySolveError):
    """Newton Jacobian is singular."""


@dataclass(frozen=True)
class TravelingWaveSolution:
    eta: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    c: float
    k_flux: float
    residual_norm: float
    amplitude: float
    params: WaveParameters = field(repr=False)
    gauge: float = 0.0
    iterations: int = 0
    flux_deviation: float = 0.0

    def state(self, t: float = 0.0) -> SurfaceState:
        return SurfaceState(t, self.eta, self.xi)


def linear_phase_speeds(params: WaveParameters, k: float) -> tuple[float, float]:
    """Phase speeds (slow/left, fast/right) of infinitesimal waves of wavenumber ``k``."""
    lo, hi = linear_frequencies(params, k)
    return float(lo / k), float(hi / k)


def mass_flux(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
              c: float, traces=None) -> tuple[float, float]:
    """Mean of ``chi - c eta`` over the nodes and its largest departure from that mean."""
    if c == 0:
        raise ValueError("wave speed must be nonzero")
    if traces is None:
        _, _, traces = gradients(grid, params, state)
    q = traces.chi - c * state.eta
    k = float(np.mean(q))
    return k, float(np.max(np.abs(q - k)))


def steady_hamiltonian(grid: PeriodicGrid, params: WaveParameters, state: SurfaceState,
                       c: float, k: float) -> float:
    om = params.omega
    H = energy_surface(grid, params, state)
    return H + om * k * mass(grid, state) + 0.5 * c * om * grid.integrate(state.eta**2)


def traveling_residual(grid: PeriodicGrid, params: WaveParameters, eta, xi, c: float,
                       dealiased: bool = False):
    """``(dH/dxi + c eta_x, -dH/deta - omega chi + c xi_x)``.

    The second component of a solution is the spatially constant gauge drift.
    """
    if c == 0:
        raise ValueError("wave speed must be nonzero")
    state = SurfaceState(0.0, eta, xi)
    eta_dot, xi_dot = rhs(grid, params, state, dealiased=dealiased)
    return (eta_dot + c * spectral_derivative(grid, state.eta),
            xi_dot + c * spectral_derivative(grid, state.xi))


def hamiltonian_form_residual(grid: PeriodicGrid, params: WaveParameters, eta, xi,
                              c: float, k: float):
    """Residuals of the steady system written with the shifted Hamiltonian.

    ``(c eta_x + dHhat/dxi, c xi_x - dHhat/deta)`` where
    ``dHhat/deta = dH/deta + omega k + c omega eta`` and ``dHhat/dxi = dH/dxi``.
    """
    state = SurfaceState(0.0, eta, xi)
    g_eta, g_xi, _ = gradients(grid, params, state)
    om = params.omega
    return (c * spectral_derivative(grid, state.eta) + g_xi,
            c * spectral_derivative(grid, state.xi) - (g_eta + om * k + c * om * state.eta))


def residual_norm(R_eta, R_xi) -> float:
    return float(max(np.max(np.abs(R_eta)), np.max(np.abs(R_xi - np.mean(R_xi)))))


class _EvenWaveProblem:
    """Packing between the reduced unknown vector and nodal fields."""

    def __init__(self, grid, params, amplitude, K):
        self.grid, self.params = grid, params
        self.a = float(amplitude)
        self.K = K
        m = np.arange(1, K + 1)
        self.cos = np.cos(np.outer(grid.x, grid.k1 * m))
        self.sin = np.sin(np.outer(grid.x, grid.k1 * m))

    def fields(self, z):
        K = self.K
        A = np.concatenate([[self.a], z[:K - 1]])
        Bs = z[K - 1:2 * K - 1]
        eta = self.params.d_ref + self.cos @ A
        xi = self.sin @ Bs
        return eta, xi, z[2 * K - 1], z[2 * K]

    def pack(self, eta, xi, c, gauge):
        _, a, _ = fourier_modes(self.grid, eta)
        _, _, b = fourier_modes(self.grid, xi)
        return np.concatenate([a[1:self.K], b[:self.K], [c, gauge]])

    def residual(self, z):
        eta, xi, c, gauge = self.fields(z)
        if np.min(eta) <= 0:
            raise SteadySolveError("iterate surface reached the bed")
        R_eta, R_xi = traveling_residual(self.grid, self.params, eta, xi, c, dealiased=False)
        _, _, s_eta = fourier_modes(self.grid, R_eta)
        m0, c_xi, _ = fourier_modes(self.grid, R_xi)
        F = np.concatenate([s_eta[:self.K], [m0 - gauge], c_xi[:self.K]])
        return F, (R_eta, R_xi - gauge)

    def jacobian(self, z, F0=None, h=1e-7):
        n = len(z)
        J = np.empty((n, n))
        for j in range(n):
            step = h * max(1.0, abs(z[j]))
            zp, zm = z.copy(), z.copy()
            zp[j] += step
            zm[j] -= step
            J[:, j] = (self.residual(zp)[0] - self.residual(zm)[0]) / (2 * step)
        return J


def traveling_solve(grid: PeriodicGrid, params: WaveParameters, guess, amplitude_target: float,
                    tol: float = 1e-10, max_iter: int = 25, modes: int | None = None,
                    branch: int = 1) -> TravelingWaveSolution:
    """Newton iteration for an even traveling wave of prescribed first-mode amplitude.

    ``guess`` is ``(eta, xi, c)``.  For ``amplitude_target == 0`` the flat
    state is returned with ``c`` the linear phase speed on ``branch``
    (the sign of the guessed speed if one is given).
    """
    eta0, xi0, c0 = guess
    d = params.d_ref
    if amplitude_target == 0:
        lo, hi = linear_phase_speeds(params, grid.k1)
        if c0 is not None and c0 != 0:
            branch = 1 if c0 > 0 else -1
        c = hi if branch > 0 else lo
        flat = SurfaceState.flat(grid, d)
        k, dev = mass_flux(grid, params, flat, c)
        R_eta, R_xi = traveling_residual(grid, params, flat.eta, flat.xi, c)
        return TravelingWaveSolution(eta=flat.eta, xi=flat.xi, c=c, k_flux=k,
                                     residual_norm=residual_norm(R_eta, R_xi),
                                     amplitude=0.0, params=params, gauge=float(np.mean(R_xi)),
                                     flux_deviation=dev)
    K = modes if modes is not None else dealias_cutoff(grid, params.dealias_fraction)
    prob = _EvenWaveProblem(grid, params, amplitude_target, K)
    R_eta, R_xi = traveling_residual(grid, params, eta0, xi0, c0)
    z = prob.pack(eta0, xi0, c0, float(np.mean(R_xi)))
    F, (R_eta, R_xi) = prob.residual(z)
    best = (residual_norm(R_eta, R_xi), z)
    history = [best[0]]
    for it in range(1, max_iter + 1):
        if best[0] <= tol and it > 1:
            break
        J = prob.jacobian(z)
        try:
            cond = np.linalg.cond(J)
            if not np.isfinite(cond) or cond > 1e14:
                raise np.linalg.LinAlgError(f"cond {cond:.3e}")
            dz = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise BifurcationPointError(f"singular Newton Jacobian: {exc}",
                                        best=prob.fields(best[1]), history=history) from exc
        z = z + dz
        try:
            F, (R_eta, R_xi) = prob.residual(z)
        except (SolverError, SteadySolveError) as exc:
            raise SteadySolveError(f"residual evaluation failed: {exc}",
                                   best=prob.fields(best[1]), history=history) from exc
        r = residual_norm(R_eta, R_xi)
        history.append(r)
        log.debug("newton it=%d residual=%.3e |dz|=%.3e", it, r, np.max(np.abs(dz)))
        if r < best[0]:
            best = (r, z.copy())
        if r <= tol:
            break
    else:
        it = max_iter
    if best[0] > tol:
        raise SteadySolveError(
            f"Newton did not converge: residual {best[0]:.3e} after {max_iter} iterations",
            best=prob.fields(best[1]), history=history)
    z = best[1]
    eta, xi, c, gauge = prob.fields(z)
    state = SurfaceState(0.0, eta, xi)
    k, dev = mass_flux(grid, params, state, c)
    return TravelingWaveSolution(eta=eta, xi=xi, c=float(c), k_flux=k, residual_norm=best[0],
                                 amplitude=float(amplitude_target), params=params,
                                 gauge=float(gauge), iterations=it, flux_deviation=dev)


def linear_guess(grid, params, amplitude, branch=1):
    """First-order traveling wave ``(eta, xi, c)`` on the requested branch."""
    lo, hi = linear_phase_speeds(params, grid.k1)
    c = hi if branch > 0 else lo
    k, d = grid.k1, params.d_ref
    eta = d + amplitude * np.cos(k * grid.x)
    xi = amplitude * (c + params.omega * d) / np.tanh(k * d) * np.sin(k * grid.x)
    return eta, xi, c


@dataclass
class ContinuationFamily:
    """Converged members of one branch, in amplitude order."""

    members: list = field(default_factory=list)
    failure: Exception | None = None
    failed_amplitude: float | None = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    def table(self, grid) -> np.ndarray:
        """Rows of (amplitude, c, k_flux, Hhat, residual_norm)."""
        rows = []
        for s in self.members:
            Hh = steady_hamiltonian(grid, s.params, s.state(), s.c, s.k_flux)
            rows.append((s.amplitude, s.c, s.k_flux, Hh, s.residual_norm))
        return np.array(rows, dtype=float).reshape(-1, 5)


def continuation_run(grid: PeriodicGrid, params: WaveParameters, branch_choice: int,
                     amplitude_steps, tol: float = 1e-10, max_iter: int = 25) -> ContinuationFamily:
    """Follow the even-wave branch through increasing first-mode amplitudes.

    Each member seeds the next with its deviation from the flat state
    rescaled to the new amplitude.  The run stops at the first failure.
    """
    steps = [float(a) for a in amplitude_steps]
    if any(b <= a for a, b in zip(steps, steps[1:])) or (steps and steps[0] < 0):
        raise ValueError("amplitude steps must be non-negative and increasing")
    branch = 1 if branch_choice >= 0 else -1
    fam = ContinuationFamily()
    prev = None
    for a in steps:
        if a == 0:
            guess = (None, None, branch)
        elif prev is None or prev.amplitude == 0:
            guess = linear_guess(grid, params, a, branch)
        else:
            r = a / prev.amplitude
            guess = (params.d_ref + r * (prev.eta - params.d_ref), r * prev.xi, prev.c)
        try:
            sol = traveling_solve(grid, params, guess, a, tol=tol, max_iter=max_iter,
                                  branch=branch)
        except (SteadySolveError, SolverError) as exc:
            log.warning("continuation stopped at amplitude %.6g: %s", a, exc)
            fam.failure = exc
            fam.failed_amplitude = a
            break
        fam.members.append(sol)
        prev = sol
    return fam
