"""Periodic grid, Fourier differentiation and the shared state types.

Everything downstream samples L-periodic functions at the uniform nodes
``x_j = j L / N`` and manipulates them through the real FFT.  Arrays are
plain ``numpy.ndarray`` objects; the containers defined here are frozen
dataclasses so they can be passed between threads without copying.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class ConfigurationError(ValueError):
    """Invalid physical or numerical parameters."""

    def __init__(self, message, field_name=None):
        super().__init__(message)
        self.field_name = field_name


class ShapeError(ValueError):
    """Array length does not match the grid."""


@dataclass(frozen=True)
class WaveParameters:
    """Physical and numerical constants for one run.

    ``dealias_fraction`` is the fraction of the ``N/2`` resolved
    wavenumbers kept by the 2/3-style filter; a value of 1 disables it.
    """

    L: float
    g: float
    omega: float
    d_ref: float
    N: int
    P_atm: float = 0.0
    dealias_fraction: float = 2.0 / 3.0
    solver_tol: float = 1e-10
    cond_limit: float = 1e13

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ConfigurationError(f"L must be positive, got {self.L}", "L")
        if not np.isfinite(self.g) or self.g < 0:
            raise ConfigurationError(f"g must be non-negative, got {self.g}", "g")
        if not np.isfinite(self.omega):
            raise ConfigurationError("omega must be finite", "omega")
        if not np.isfinite(self.d_ref) or self.d_ref <= 0:
            raise ConfigurationError(f"d_ref must be positive, got {self.d_ref}", "d_ref")
        if int(self.N) != self.N or self.N < 8 or self.N % 2:
            raise ConfigurationError(f"N must be an even integer >= 8, got {self.N}", "N")
        if not 0 < self.dealias_fraction <= 1:
            raise ConfigurationError(
                "dealias_fraction must lie in (0, 1]", "dealias_fraction")
        if self.solver_tol <= 0:
            raise ConfigurationError("solver_tol must be positive", "solver_tol")
        object.__setattr__(self, "N", int(self.N))

    def with_(self, **changes) -> "WaveParameters":
        return replace(self, **changes)


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform collocation nodes on ``[0, L)`` and their rfft wavenumbers."""

    L: float
    N: int
    x: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)

    @property
    def dx(self) -> float:
        return self.L / self.N

    @property
    def k1(self) -> float:
        return 2 * np.pi / self.L

    def integrate(self, f) -> float:
        """Periodic trapezoid rule over one period."""
        f = check_length(self, f)
        return float(np.sum(f) * self.dx)

    def inner(self, f, g) -> float:
        return self.integrate(np.asarray(f) * np.asarray(g))

    def mean(self, f) -> float:
        return float(np.mean(check_length(self, f)))


def make_grid(params: WaveParameters) -> PeriodicGrid:
    return uniform_grid(params.L, params.N)


def uniform_grid(L: float, N: int) -> PeriodicGrid:
    L = float(L)
    if int(N) != N or N % 2 or N < 8:
        raise ConfigurationError(f"N must be an even integer >= 8, got {N}", "N")
    if L <= 0:
        raise ConfigurationError(f"L must be positive, got {L}", "L")
    N = int(N)
    x = np.arange(N) * (L / N)
    k = 2 * np.pi / L * np.arange(N // 2 + 1)
    x.setflags(write=False)
    k.setflags(write=False)
    return PeriodicGrid(L=L, N=N, x=x, k=k)


def check_length(grid: PeriodicGrid, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.N,):
        raise ShapeError(f"expected array of shape ({grid.N},), got {f.shape}")
    return f


def spectral_derivative(grid: PeriodicGrid, f) -> np.ndarray:
    """d/dx of the trigonometric interpolant of ``f``; Nyquist mode dropped."""
    f = check_length(grid, f)
    fh = np.fft.rfft(f)
    dfh = 1j * grid.k * fh
    dfh[-1] = 0.0
    return np.fft.irfft(dfh, n=grid.N)


def dealias_cutoff(grid: PeriodicGrid, fraction: float) -> int:
    """Highest mode index retained by the filter."""
    return int(np.floor(fraction * (grid.N // 2) + 1e-12))


def dealias(grid: PeriodicGrid, f, fraction: float) -> np.ndarray:
    """Zero Fourier modes above ``fraction * N/2``; identity for fraction >= 1."""
    f = check_length(grid, f)
    if fraction >= 1:
        return f.copy()
    fh = np.fft.rfft(f)
    fh[dealias_cutoff(grid, fraction) + 1:] = 0.0
    return np.fft.irfft(fh, n=grid.N)


def fourier_modes(grid: PeriodicGrid, f):
    """Return (mean, cos coefficients, sin coefficients) for m = 1..N/2.

    ``f = mean + sum_m a_m cos(k_m x) + b_m sin(k_m x)`` at the nodes.  The
    Nyquist sine coefficient is identically zero.
    """
    f = check_length(grid, f)
    fh = np.fft.rfft(f) / grid.N
    a = 2 * fh.real[1:]
    b = -2 * fh.imag[1:]
    a[-1] *= 0.5
    b[-1] = 0.0
    return float(fh.real[0]), a, b


def from_modes(grid: PeriodicGrid, mean=0.0, cos=(), sin=()) -> np.ndarray:
    """Synthesize nodal values from mode lists indexed from m = 1."""
    f = np.full(grid.N, float(mean))
    for m, a in enumerate(cos, start=1):
        if a:
            f += a * np.cos(grid.k1 * m * grid.x)
    for m, b in enumerate(sin, start=1):
        if b:
            f += b * np.sin(grid.k1 * m * grid.x)
    return f


def interpolate(grid: PeriodicGrid, f, x) -> np.ndarray:
    """Evaluate the trigonometric interpolant of nodal ``f`` at points ``x``."""
    f = check_length(grid, f)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    fh = np.fft.rfft(f) / grid.N
    w = np.full(fh.shape, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    phase = np.exp(1j * np.outer(x, grid.k))
    return (phase @ (w * fh)).real


@dataclass(frozen=True)
class SurfaceState:
    """Surface elevation and potential trace at the grid nodes."""

    t: float
    eta: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float)
        xi = np.array(self.xi, dtype=float)
        if eta.ndim != 1 or eta.shape != xi.shape:
            raise ShapeError(
                f"eta and xi must be 1-d arrays of equal length, got {eta.shape}, {xi.shape}")
        if not np.all(np.isfinite(eta)) or not np.all(np.isfinite(xi)):
            raise ValueError("state contains non-finite values")
        if np.any(eta <= 0):
            raise ValueError(f"surface touches the bed: min(eta) = {eta.min():.3e}")
        eta.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def flat(cls, grid: PeriodicGrid, depth: float, t: float = 0.0) -> "SurfaceState":
        return cls(t, np.full(grid.N, float(depth)), np.zeros(grid.N))

    def shifted_gauge(self, const: float) -> "SurfaceState":
        return SurfaceState(self.t, self.eta, self.xi + const)


def spectral_tail(grid: PeriodicGrid, f, fraction: float = 2.0 / 3.0) -> float:
    """Largest Fourier amplitude beyond the dealiasing cutoff, relative to the largest mode.

    A cheap resolution diagnostic: values near round-off mean the field is
    resolved on this grid.
    """
    fh = np.abs(np.fft.rfft(check_length(grid, f)))
    fh[0] = 0.0
    peak = fh.max()
    if peak == 0:
        return 0.0
    return float(fh[dealias_cutoff(grid, fraction) + 1:].max(initial=0.0) / peak)
