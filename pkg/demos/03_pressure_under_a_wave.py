# Pressure and velocity beneath a steady wave on a shear current.
#
# Run with:  python demos/03_pressure_under_a_wave.py
import numpy as np

from cvwaves import WaveParameters, continuation_run, make_grid, pressure_field

params = WaveParameters(L=2 * np.pi, g=9.81, omega=2.0, d_ref=1.0, N=64)
grid = make_grid(params)
wave = continuation_run(grid, params, 1, [0.0, 0.02, 0.04])[-1]
state = wave.state()

# A vertical profile under the crest (x = 0) and under the trough (x = L/2)
for label, j in (("crest", 0), ("trough", grid.N // 2)):
    y = np.linspace(0, state.eta[j], 6)
    out = pressure_field(grid, params, state, np.column_stack([np.full(6, grid.x[j]), y]))
    print(label, " surface at y = %.4f" % state.eta[j])
    print("    y        u         v         psi       P      P - hydrostatic")
    for yy, u, v, psi, P in zip(y, out.u, out.v, out.psi, out.P):
        print("  %.3f  %8.4f  %8.4f  %8.4f  %7.4f  %8.5f"
              % (yy, u, v, psi, P, P - params.g * (state.eta[j] - yy)))

# On the free surface the pressure equals the atmospheric value
surf = pressure_field(grid, params, state, np.column_stack([grid.x, state.eta]))
print("max |P - P_atm| on the surface: %.1e" % np.max(np.abs(surf.P - params.P_atm)))
