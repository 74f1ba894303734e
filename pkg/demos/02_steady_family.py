# Traveling waves of permanent form, followed from zero amplitude.
#
# Run with:  python demos/02_steady_family.py
import numpy as np

from cvwaves import WaveParameters, continuation_run, make_grid
from cvwaves.core import fourier_modes

amps = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05]

for omega in (-2.0, 0.0, 2.0):
    params = WaveParameters(L=2 * np.pi, g=9.81, omega=omega, d_ref=1.0, N=64)
    grid = make_grid(params)
    fam = continuation_run(grid, params, 1, amps)
    print("omega = %+.0f" % omega)
    print("   a        c             k_flux        Hhat          residual")
    for row in fam.table(grid):
        print("  %.3f  %.10f  %.10f  %.8f  %.1e" % tuple(row))

# Speed grows like a^2.  At zero vorticity the classical second-order
# correction for a wave of mean depth d is available in closed form.
params = WaveParameters(L=2 * np.pi, g=9.81, omega=0.0, d_ref=1.0, N=64)
grid = make_grid(params)
fam = continuation_run(grid, params, 1, amps)
s = np.tanh(params.d_ref)
c0 = fam[0].c
print("\n   a     c - c0 (computed)   c - c0 (second order)")
for sol in fam.members[1:]:
    a = sol.amplitude
    pred = np.sqrt(params.g * s * (1 + a**2 * (9 - 10 * s**2 + 9 * s**4) / (8 * s**4)))
    print("  %.2f   %.6e        %.6e" % (a, sol.c - c0, pred - c0))

# Higher harmonics are slaved to the first one
_, cos_modes, _ = fourier_modes(grid, fam[-1].eta)
print("\nharmonics of the largest wave:", np.round(cos_modes[:5], 7))
