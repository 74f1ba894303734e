"""Spectral simulation and steady-wave continuation for periodic gravity water
waves with constant vorticity over a flat bed."""
from .core import (ConfigurationError, PeriodicGrid, ShapeError, SurfaceState, WaveParameters,
                   make_grid, spectral_derivative)
from .dynamics import integrate, linear_frequencies, linear_mode, linearize, rhs, step_rk4, suggest_dt
from .hamiltonian import (EnergyReport, chi_of_state, energy_surface, energy_volume, grad_eta,
                          grad_xi, mass)
from .harmonic import (HarmonicField, SurfaceTraces, dno_series_order2, evaluate_interior,
                       hilbert_transform, solve_dirichlet, surface_traces)
from .reconstruct import bed_flow_check, pressure_field, velocity_field
from .steady import (TravelingWaveSolution, continuation_run, mass_flux, steady_hamiltonian,
                     traveling_residual, traveling_solve)

__version__ = "0.1.0"
