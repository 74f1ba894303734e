"""Harmonic extension of surface data into the fluid layer.

The generalized potential is expanded in the separable harmonics

    phi(x, y) = a0 + sum_m [ac_m cos(k_m x) + bs_m sin(k_m x)] cosh(k_m y) / cosh(k_m d)

Every term is harmonic, has ``phi_y = 0`` on the bed ``y = 0`` and is
L-periodic, so the only condition left to impose numerically is
``phi(x_j, eta_j) = xi_j`` at the N surface nodes.  The harmonic conjugate
of each term is taken to vanish on the bed, which fixes the additive
constant of the stream function.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .core import (PeriodicGrid, WaveParameters, check_length, interpolate,
                   spectral_derivative, uniform_grid)


class SolverError(RuntimeError):
    """The collocation system could not be solved reliably."""


class SingularCollocationError(SolverError):
    def __init__(self, cond):
        super().__init__(f"collocation matrix numerically singular (cond ~ {cond:.3e})")
        self.cond = cond


class NonConvergenceError(SolverError):
    def __init__(self, residual, tol):
        super().__init__(
            f"Dirichlet residual {residual:.3e} exceeds tolerance {tol:.1e}")
        self.residual = residual
        self.tol = tol


class DomainError(ValueError):
    """Evaluation point outside the closed fluid domain."""


def _cosh_ratio(k, y, d):
    """cosh(k y)/cosh(k d) and sinh(k y)/cosh(k d) without overflow.

    ``k`` has shape (M,), ``y`` broadcasts against it.
    """
    y = np.asarray(y, dtype=float)
    ky = k * y
    scale = np.exp(ky - k * d) / (1.0 + np.exp(-2.0 * k * d))
    e = np.exp(-2.0 * ky)
    return scale * (1.0 + e), scale * (1.0 - e)


@dataclass(frozen=True)
class HarmonicField:
    """Coefficients of a solved potential together with the surface it was solved on.

    ``ac`` holds cosine coefficients for m = 1..N/2 (the last one is the
    Nyquist mode needed to make the collocation system square) and ``bs``
    holds sine coefficients for m = 1..N/2 with the Nyquist entry zero.
    """

    a0: float
    ac: np.ndarray = field(repr=False)
    bs: np.ndarray = field(repr=False)
    kw: np.ndarray = field(repr=False)
    d_ref: float
    L: float
    eta: np.ndarray = field(repr=False)
    residual: float = 0.0
    cond: float = 1.0

    @property
    def M(self) -> int:
        return len(self.ac)

    def _parts(self, x, y):
        x = np.asarray(x, dtype=float)[:, None]
        y = np.asarray(y, dtype=float)[:, None]
        C, S = _cosh_ratio(self.kw, y, self.d_ref)
        cs, sn = np.cos(self.kw * x), np.sin(self.kw * x)
        return C, S, cs, sn

    def potential(self, x, y):
        C, S, cs, sn = self._parts(x, y)
        return self.a0 + (C * (self.ac * cs + self.bs * sn)).sum(axis=1)

    def gradient(self, x, y):
        """(phi_x, phi_y) at the given points."""
        C, S, cs, sn = self._parts(x, y)
        k = self.kw
        phi_x = (k * C * (-self.ac * sn + self.bs * cs)).sum(axis=1)
        phi_y = (k * S * (self.ac * cs + self.bs * sn)).sum(axis=1)
        return phi_x, phi_y

    def conjugate(self, x, y):
        """Harmonic conjugate of phi, zero on the bed."""
        C, S, cs, sn = self._parts(x, y)
        return (S * (-self.ac * sn + self.bs * cs)).sum(axis=1)

    def surface_height(self, x):
        """Trigonometric interpolant of the surface the field was solved on."""
        return interpolate(uniform_grid(self.L, len(self.eta)), self.eta, x)


def collocation_matrix(grid: PeriodicGrid, d_ref: float, eta) -> np.ndarray:
    """Values of the N basis functions at the N surface nodes."""
    N = grid.N
    kw = grid.k[1:]
    C, _ = _cosh_ratio(kw, eta[:, None], d_ref)
    kx = np.outer(grid.x, kw)
    A = np.empty((N, N))
    A[:, 0] = 1.0
    A[:, 1:N // 2 + 1] = C * np.cos(kx)
    A[:, N // 2 + 1:] = (C * np.sin(kx))[:, :-1]
    return A


def solve_dirichlet(grid: PeriodicGrid, params: WaveParameters, eta, xi,
                    tol: float | None = None) -> HarmonicField:
    """Harmonic potential with trace ``xi`` on ``y = eta`` and no flux through the bed."""
    eta = check_length(grid, eta)
    xi = check_length(grid, xi)
    if np.any(eta <= 0):
        raise DomainError("surface must lie strictly above the bed")
    tol = params.solver_tol if tol is None else tol
    N = grid.N
    A = collocation_matrix(grid, params.d_ref, eta)
    lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    anorm = np.linalg.norm(A, 1)
    rcond = _lu_rcond(lu, anorm)
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if not np.isfinite(cond) or cond > params.cond_limit:
        raise SingularCollocationError(cond)
    coef = scipy.linalg.lu_solve((lu, piv), xi, check_finite=False)
    scale = max(np.max(np.abs(xi)), np.finfo(float).tiny)
    r = xi - A @ coef
    res = np.max(np.abs(r)) / scale
    if res > tol:
        coef = coef + scipy.linalg.lu_solve((lu, piv), r, check_finite=False)
        res = np.max(np.abs(xi - A @ coef)) / scale
        if res > tol:
            raise NonConvergenceError(res, tol)
    M = N // 2
    bs = np.zeros(M)
    bs[:-1] = coef[M + 1:]
    eta_ro = eta.copy()
    eta_ro.setflags(write=False)
    return HarmonicField(a0=float(coef[0]), ac=coef[1:M + 1].copy(), bs=bs,
                         kw=grid.k[1:].copy(), d_ref=float(params.d_ref),
                         L=grid.L, eta=eta_ro, residual=float(res), cond=float(cond))


def _lu_rcond(lu, anorm):
    gecon, = scipy.linalg.get_lapack_funcs(("gecon",), (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    return float(rcond)


@dataclass(frozen=True)
class SurfaceTraces:
    """Surface evaluations of the potential and its conjugate."""

    xi1: np.ndarray
    xi2: np.ndarray
    chi: np.ndarray
    t_xi: np.ndarray
    solve_residual: float


def surface_traces(field: HarmonicField, grid: PeriodicGrid, params: WaveParameters,
                   eta) -> SurfaceTraces:
    eta = check_length(grid, eta)
    xi1, xi2 = field.gradient(grid.x, eta)
    t_xi = field.conjugate(grid.x, eta)
    chi = t_xi - 0.5 * params.omega * eta**2
    return SurfaceTraces(xi1=xi1, xi2=xi2, chi=chi, t_xi=t_xi,
                         solve_residual=field.residual)


def solve_traces(grid, params, eta, xi):
    """Convenience: solve the boundary-value problem and return (field, traces)."""
    fld = solve_dirichlet(grid, params, eta, xi)
    return fld, surface_traces(fld, grid, params, eta)


def hilbert_transform(grid: PeriodicGrid, params: WaveParameters, eta, xi) -> np.ndarray:
    """Surface trace of the bed-anchored harmonic conjugate of the extension of ``xi``."""
    eta = check_length(grid, eta)
    fld = solve_dirichlet(grid, params, eta, xi)
    return fld.conjugate(grid.x, eta)


@dataclass(frozen=True)
class InteriorValues:
    phi: np.ndarray
    u: np.ndarray
    v: np.ndarray
    psi: np.ndarray
    outside: np.ndarray


def evaluate_interior(field: HarmonicField, params: WaveParameters, points,
                      allow_extension: bool = False) -> InteriorValues:
    """Potential, velocity and stream function at points ``(x, y)``.

    Points above the surface (beyond a 1e-12 d_ref slack) or below the bed
    raise :class:`DomainError` unless ``allow_extension`` is set, in which
    case the harmonic continuation is returned and the ``outside`` mask
    flags those points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[-1] != 2:
        raise ValueError("points must have shape (n, 2)")
    x, y = pts[:, 0], pts[:, 1]
    slack = 1e-12 * params.d_ref
    top = field.surface_height(x)
    outside = (y > top + slack) | (y < -slack)
    if np.any(outside) and not allow_extension:
        i = int(np.flatnonzero(outside)[0])
        raise DomainError(
            f"point ({x[i]:.6g}, {y[i]:.6g}) outside fluid domain 0 <= y <= {top[i]:.6g}")
    om = params.omega
    phi = field.potential(x, y)
    phi_x, phi_y = field.gradient(x, y)
    psi = field.conjugate(x, y) - 0.5 * om * y**2
    return InteriorValues(phi=phi, u=phi_x - om * y, v=phi_y, psi=psi, outside=outside)


def dno_series_order2(grid: PeriodicGrid, params: WaveParameters, eta, xi) -> SurfaceTraces:
    """Second-order operator expansion of the surface traces about the mean depth.

    Uses ``G ~ G0 + G1 + G2`` with ``G0 = D tanh(h D)``,
    ``G1 = D z D - G0 z G0`` and
    ``G2 = -(D^2 z^2 G0 + G0 z^2 D^2 - 2 G0 z G0 z G0) / 2`` where
    ``z = eta - h`` and ``D = -i d/dx``.  The conjugate trace follows from
    ``d/dx T xi = -G xi`` with its mean fixed by ``mean(T xi) = mean(eta xi_x)``.
    Accurate to O(|z|^3); meant as an independent check of the collocation solve.
    """
    eta = check_length(grid, eta)
    xi = check_length(grid, xi)
    N = grid.N
    h = float(np.mean(eta))
    z = eta - h
    k = grid.k
    g0 = k * np.tanh(k * h)

    def F(f):
        return np.fft.rfft(f)

    def iF(fh):
        return np.fft.irfft(fh, n=N)

    def G0(f):
        return iF(g0 * F(f))

    def Dsq(f):
        return iF(k**2 * F(f))

    def dx(f):
        return spectral_derivative(grid, f)

    G0xi = G0(xi)
    G1xi = -dx(z * dx(xi)) - G0(z * G0xi)
    G2xi = -0.5 * (Dsq(z**2 * G0xi) + G0(z**2 * Dsq(xi)) - 2 * G0(z * G0(z * G0xi)))
    Gxi = G0xi + G1xi + G2xi

    eta_x = dx(eta)
    xi_x = dx(xi)
    Gh = F(Gxi)
    inv = np.zeros_like(Gh)
    inv[1:] = Gh[1:] / (1j * k[1:])
    inv[-1] = 0.0
    t_xi = -iF(inv) + np.mean(eta * xi_x)
    den = 1 + eta_x**2
    xi1 = (xi_x - eta_x * Gxi) / den
    xi2 = (Gxi + eta_x * xi_x) / den
    chi = t_xi - 0.5 * params.omega * eta**2
    return SurfaceTraces(xi1=xi1, xi2=xi2, chi=chi, t_xi=t_xi, solve_residual=float("nan"))
