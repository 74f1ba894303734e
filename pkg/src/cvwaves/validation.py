"""Property checks run by ``cvwaves validate``.

Each check measures one quantity and compares it with a fixed tolerance.
The suite is deliberately self-contained so that a user can certify an
installation without the test tree.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SurfaceState, WaveParameters, make_grid, spectral_derivative
from .dynamics import integrate, linear_frequencies, linear_mode, linearize, rhs, suggest_dt
from .hamiltonian import energy_surface, energy_volume, gradients
from .harmonic import hilbert_transform
from .reconstruct import FlowReconstruction, bed_flow_check
from .steady import continuation_run, hamiltonian_form_residual, traveling_residual


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    comparison: str = "<="

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<44s} {self.value:11.3e} {self.comparison} {self.tolerance:.1e}"


def _check(name, value, tol, comparison="<="):
    ok = value <= tol if comparison == "<=" else value >= tol
    return CheckResult(name, float(value), float(tol), bool(ok and np.isfinite(value)), comparison)


def random_state(grid, params, rng, amplitude=0.1, modes=4, xi_scale=0.5):
    """Band-limited state with |eta - d| <= amplitude * d and geometrically decaying modes."""
    m = np.arange(1, modes + 1)
    w = 2.0 ** -m
    ph_e, ph_x = rng.uniform(0, 2 * np.pi, (2, modes))
    ce = rng.uniform(0.5, 1.0, modes) * w
    eta = np.cos(np.outer(grid.x, grid.k1 * m) + ph_e) @ ce
    eta = params.d_ref * (1 + amplitude * eta / np.max(np.abs(eta)))
    cx = rng.normal(size=modes) * w
    xi = xi_scale * np.cos(np.outer(grid.x, grid.k1 * m) + ph_x) @ cx + rng.normal()
    return SurfaceState(0.0, eta, xi)


def run_suite(params: WaveParameters | None = None, quick: bool = False, seed: int = 0):
    if params is None:
        params = WaveParameters(L=2 * np.pi, g=9.81, omega=1.0, d_ref=1.0, N=64)
    if quick:
        params = params.with_(N=32)
    grid = make_grid(params)
    rng = np.random.default_rng(seed)
    d, g = params.d_ref, params.g
    out = []

    k = grid.k1
    flat = SurfaceState.flat(grid, d)
    t = hilbert_transform(grid, params, flat.eta, np.cos(k * grid.x))
    out.append(_check("flat Hilbert transform cos -> -tanh sin",
                      np.max(np.abs(t + np.tanh(k * d) * np.sin(k * grid.x))), 1e-10))

    n_states = 4 if quick else 10
    chi_params = params.with_(N=max(params.N, 64))
    chi_grid = make_grid(chi_params)
    mism, grad_err, chi_err, skew_flat = 0.0, 0.0, 0.0, 0.0
    for _ in range(n_states):
        s = random_state(grid, params, rng)
        rep = energy_volume(grid, params, s)
        mism = max(mism, rep.relative_mismatch)
        g_eta, g_xi, tr = gradients(grid, params, s)
        # the chain-rule identity converges spectrally; test it on a resolved state
        sr = random_state(chi_grid, chi_params, rng, amplitude=0.02)
        _, gx_r, tr_r = gradients(chi_grid, chi_params, sr)
        chi_err = max(chi_err, np.max(np.abs(gx_r + spectral_derivative(chi_grid, tr_r.chi))))
        for grad, which in ((g_eta, "eta"), (g_xi, "xi")):
            dirn = random_state(grid, params, rng).xi
            dirn = dirn - dirn.mean()
            eps = 1e-5 / np.max(np.abs(dirn))

            def H(e):
                if which == "eta":
                    return energy_surface(grid, params, SurfaceState(0, s.eta + e * dirn, s.xi))
                return energy_surface(grid, params, SurfaceState(0, s.eta, s.xi + e * dirn))

            fd = (H(eps) - H(-eps)) / (2 * eps)
            an = grid.inner(grad, dirn)
            grad_err = max(grad_err, abs(fd - an) / max(abs(an), 1e-12))
        f, h = random_state(grid, params, rng).xi, random_state(grid, params, rng).xi
        tf = hilbert_transform(grid, params, flat.eta, f)
        th = hilbert_transform(grid, params, flat.eta, h)
        skew_flat = max(skew_flat, abs(grid.inner(tf, h) + grid.inner(f, th)))
    out.append(_check("energy surface/volume relative mismatch", mism, 1e-8))
    out.append(_check("gradient finite-difference relative error", grad_err, 1e-5))
    out.append(_check("dH/dxi + d(chi)/dx", chi_err, 1e-10))
    out.append(_check("flat skew-adjointness defect", skew_flat, 1e-10))

    wavy = SurfaceState(0, d * (1 + 0.1 * np.cos(k * grid.x)), np.zeros(grid.N))
    f = np.cos(k * grid.x)
    h = np.cos(2 * k * grid.x) + np.sin(k * grid.x)
    tf = hilbert_transform(grid, params, wavy.eta, f)
    th = hilbert_transform(grid, params, wavy.eta, h)
    out.append(_check("wavy skew-adjointness defect", abs(grid.inner(tf, h) + grid.inner(f, th)),
                      1e-6, ">="))

    eta_dot, xi_dot = rhs(grid, params, flat)
    out.append(_check("equilibrium |eta_dot|", np.max(np.abs(eta_dot)), 1e-12))
    out.append(_check("equilibrium |xi_dot + g d|", np.max(np.abs(xi_dot + g * d)), 1e-10))
    s = random_state(grid, params, rng)
    out.append(_check("gauge invariance of H",
                      abs(energy_surface(grid, params, s)
                          - energy_surface(grid, params, s.shifted_gauge(3.7)))
                      / abs(energy_surface(grid, params, s)), 1e-13))

    lin_params = params.with_(N=16 if quick else 32)
    lin_grid = make_grid(lin_params)
    A = linearize(lin_grid, lin_params, SurfaceState.flat(lin_grid, d))
    disp = 0.0
    for m in range(1, 5):
        sig = _mode_frequencies(lin_grid, A, m)
        lo, hi = linear_frequencies(lin_params, m * lin_grid.k1)
        ref = np.sort(np.abs([lo, lo, hi, hi]))
        disp = max(disp, np.max(np.abs(sig - ref) / ref))
    out.append(_check("linear dispersion relative error", disp, 1e-6))

    s0 = linear_mode(grid, params, 1, 0.01 * d)
    _, hi = linear_frequencies(params, k)
    periods = 1 if quick else 3
    T = periods * 2 * np.pi / abs(hi)
    n = int(np.ceil(T / suggest_dt(grid, params)))
    traj = integrate(grid, params, s0, T, T / n, output_stride=T / n)
    H = traj.column("H_surface")
    M = traj.column("mass")
    out.append(_check("energy drift (RK4)", np.max(np.abs(H - H[0])) / abs(H[0]), 1e-8))
    out.append(_check("mass drift (RK4)", np.max(np.abs(M - M[0])) / abs(M[0]), 1e-10))

    fam = continuation_run(grid, params, 1, [0.0, 0.01 * d, 0.02 * d])
    if fam.failure is not None:
        out.append(CheckResult("steady continuation", float("nan"), 1e-10, False))
    else:
        sol = fam[-1]
        out.append(_check("steady Newton residual", sol.residual_norm, 1e-10))
        R = traveling_residual(grid, params, sol.eta, sol.xi, sol.c)
        Q = hamiltonian_form_residual(grid, params, sol.eta, sol.xi, sol.c, sol.k_flux)
        agree = max(np.max(np.abs(R[0] - Q[0])),
                    np.max(np.abs((R[1] - R[1].mean()) - (Q[1] - Q[1].mean()))))
        out.append(_check("steady flux-form vs Hhat-form residuals", agree, 1e-8))
        out.append(_check("steady flux deviation", sol.flux_deviation, 1e-8))

    s = random_state(grid, params, rng, amplitude=0.05)
    rec = FlowReconstruction(grid, params, s)
    surf = rec.sample(np.column_stack([grid.x, s.eta]))
    out.append(_check("surface pressure - P_atm", np.max(np.abs(surf.P - params.P_atm)), 1e-8))
    out.append(_check("bed velocity integral", abs(bed_flow_check(grid, params, s)), 1e-12))
    return out


def _mode_frequencies(grid, A, m):
    """|Im| of the eigenvalues of the Jacobian restricted to Fourier mode m (sorted, 4 values)."""
    N = grid.N
    c = np.cos(m * grid.k1 * grid.x)
    s = np.sin(m * grid.k1 * grid.x)
    V = np.zeros((2 * N, 4))
    V[:N, 0], V[:N, 1], V[N:, 2], V[N:, 3] = c, s, c, s
    V /= np.linalg.norm(V, axis=0)
    B = V.T @ A @ V
    return np.sort(np.abs(np.linalg.eigvals(B).imag))
