import numpy as np
import pytest

from cvwaves.core import SurfaceState, fourier_modes, make_grid
from cvwaves.harmonic import hilbert_transform
from cvwaves.steady import (SteadySolveError, continuation_run, hamiltonian_form_residual,
                            linear_guess, linear_phase_speeds, mass_flux, traveling_residual,
                            traveling_solve)

from conftest import params_for


@pytest.fixture(scope="module")
def families():
    out = {}
    for om in (-2.0, 0.0, 2.0):
        p = params_for(omega=om)
        grid = make_grid(p)
        out[om] = (grid, p, continuation_run(grid, p, 1, [0, 0.01, 0.02, 0.04]))
    return out


@pytest.mark.parametrize("omega", [-2.0, 0.0, 2.0])
def test_family_converges_with_flux_identities(families, omega):
    grid, p, fam = families[omega]
    assert fam.failure is None and len(fam) == 4
    for sol in fam:
        assert sol.residual_norm <= 1e-10
        q = hilbert_transform(grid, p, sol.eta, sol.xi) - sol.c * sol.eta - omega / 2 * sol.eta**2
        assert np.max(np.abs(q - sol.k_flux)) <= 1e-8
        assert sol.flux_deviation <= 1e-8
        _, a, b = fourier_modes(grid, sol.eta)
        assert np.isclose(a[0], sol.amplitude, atol=1e-14)
        assert np.max(np.abs(b)) < 1e-13
        assert np.isclose(np.mean(sol.eta), p.d_ref, rtol=1e-14)


@pytest.mark.parametrize("omega", [-2.0, 0.0, 2.0])
def test_two_residual_forms_agree(families, omega):
    grid, p, fam = families[omega]
    sol = fam[-1]
    R = traveling_residual(grid, p, sol.eta, sol.xi, sol.c)
    Q = hamiltonian_form_residual(grid, p, sol.eta, sol.xi, sol.c, sol.k_flux)
    assert np.max(np.abs(R[0] - Q[0])) < 1e-10
    assert np.max(np.abs((R[1] - R[1].mean()) - (Q[1] - Q[1].mean()))) < 1e-10


def test_zero_amplitude_member_is_linear_wave(families):
    grid, p, fam = families[2.0]
    first = fam[0]
    assert first.amplitude == 0 and first.residual_norm == 0
    assert np.isclose(first.c, linear_phase_speeds(p, grid.k1)[1])
    # flat state: k = -omega d^2 / 2 - c d
    assert np.isclose(first.k_flux, -p.omega * p.d_ref**2 / 2 - first.c * p.d_ref)


def test_speed_correction_matches_stokes_second_order():
    # c^2 = (g/k) s [1 + (ka)^2 (9 - 10 s^2 + 9 s^4) / (8 s^4)], s = tanh(kd), for mean depth d
    for d in (1.0, 0.5):
        p = params_for(omega=0.0, d_ref=d)
        grid = make_grid(p)
        fam = continuation_run(grid, p, 1, [0, 0.005, 0.01])
        s = np.tanh(d)
        for sol in fam.members[1:]:
            a = sol.amplitude
            pred = np.sqrt(p.g * s * (1 + a**2 * (9 - 10 * s**2 + 9 * s**4) / (8 * s**4)))
            ratio = (sol.c - fam[0].c) / (pred - fam[0].c)
            assert abs(ratio - 1) < 2e-3


def test_speed_correction_is_quadratic_in_amplitude():
    p = params_for(omega=0.0)
    grid = make_grid(p)
    amps = [0, 0.01, 0.02, 0.04]
    fam = continuation_run(grid, p, 1, amps)
    dc = [sol.c - fam[0].c for sol in fam.members[1:]]
    slope = np.polyfit(np.log(amps[1:]), np.log(dc), 1)[0]
    assert abs(slope - 2) < 0.2


def test_left_branch_has_negative_speed():
    p = params_for(omega=2.0)
    grid = make_grid(p)
    fam = continuation_run(grid, p, -1, [0, 0.02])
    assert fam.failure is None
    assert fam[1].c < 0 and np.isclose(fam[0].c, linear_phase_speeds(p, grid.k1)[0])


def test_newton_failure_keeps_best_iterate():
    p = params_for(omega=1.0)
    grid = make_grid(p)
    guess = linear_guess(grid, p, 0.05)
    with pytest.raises(SteadySolveError) as exc:
        traveling_solve(grid, p, guess, 0.05, tol=1e-30, max_iter=2)
    assert exc.value.best is not None and len(exc.value.history) >= 2


def test_continuation_records_failure():
    p = params_for(omega=1.0)
    grid = make_grid(p)
    fam = continuation_run(grid, p, 1, [0, 0.01, 0.02], tol=1e-30, max_iter=2)
    assert len(fam) == 1 and fam.failed_amplitude == 0.01
    assert isinstance(fam.failure, SteadySolveError)


def test_invalid_amplitude_schedule():
    p = params_for()
    with pytest.raises(ValueError):
        continuation_run(make_grid(p), p, 1, [0, 0.02, 0.01])


def test_mass_flux_of_flat_state():
    p = params_for(omega=1.5)
    grid = make_grid(p)
    k, dev = mass_flux(grid, p, SurfaceState.flat(grid, 1.0), 2.0)
    assert np.isclose(k, -1.5 / 2 - 2.0) and dev < 1e-14
    with pytest.raises(ValueError):
        mass_flux(grid, p, SurfaceState.flat(grid, 1.0), 0.0)


def test_family_table_columns(families):
    grid, p, fam = families[0.0]
    t = fam.table(grid)
    assert t.shape == (4, 5)
    assert np.array_equal(t[:, 0], [0, 0.01, 0.02, 0.04])
    assert np.all(np.diff(t[:, 1]) > 0)
