# The surface map from potential data to the conjugate trace.
#
# Run with:  python demos/04_hilbert_transform.py
import numpy as np

from cvwaves import WaveParameters, dno_series_order2, hilbert_transform, make_grid, solve_dirichlet
from cvwaves.harmonic import surface_traces

params = WaveParameters(L=2 * np.pi, g=9.81, omega=1.0, d_ref=1.0, N=64)
grid = make_grid(params)
x, k = grid.x, grid.k1

# Flat surface: a Fourier multiplier, cos(kx) -> -tanh(kd) sin(kx)
flat = np.full(grid.N, params.d_ref)
for m in (1, 2, 4):
    t = hilbert_transform(grid, params, flat, np.cos(m * k * x))
    print("m = %d  error vs multiplier: %.1e" % (m, np.max(np.abs(t + np.tanh(m * k) * np.sin(m * k * x)))))


def skew_defect(eta, f, h):
    return abs(grid.inner(hilbert_transform(grid, params, eta, f), h)
               + grid.inner(f, hilbert_transform(grid, params, eta, h)))


f = np.cos(k * x)
h = np.cos(2 * k * x) + np.sin(k * x)
print("flat skew defect: %.1e" % skew_defect(flat, f, h))
for a in (0.01, 0.05, 0.1):
    print("amplitude %.2f skew defect: %.2e" % (a, skew_defect(1 + a * np.cos(k * x), f, h)))

# Second-order operator expansion against the collocation solve
print("\n   a      max deviation")
for a in (0.01, 0.02, 0.04):
    eta = 1 + a * np.cos(k * x)
    xi = np.sin(k * x)
    fld = solve_dirichlet(grid, params, eta, xi)
    exact = surface_traces(fld, grid, params, eta)
    approx = dno_series_order2(grid, params, eta, xi)
    print("  %.2f   %.2e   (cond %.1e)" % (a, np.max(np.abs(exact.t_xi - approx.t_xi)), fld.cond))
