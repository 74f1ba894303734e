import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvwaves.core import SurfaceState, make_grid
from cvwaves.harmonic import (DomainError, SingularCollocationError, dno_series_order2,
                              evaluate_interior, hilbert_transform, solve_dirichlet,
                              solve_traces, surface_traces)

from conftest import params_for, resolved_state


def test_flat_surface_traces_are_separable(setup):
    grid, p = setup
    k, d = grid.k1, p.d_ref
    eta = np.full(grid.N, d)
    fld, tr = solve_traces(grid, p, eta, np.cos(k * grid.x))
    assert np.max(np.abs(tr.xi1 + k * np.sin(k * grid.x))) < 1e-12
    assert np.max(np.abs(tr.xi2 - k * np.tanh(k * d) * np.cos(k * grid.x))) < 1e-12
    chi = -np.tanh(k * d) * np.sin(k * grid.x) - p.omega * d**2 / 2
    assert np.max(np.abs(tr.chi - chi)) < 1e-12
    assert fld.residual < 1e-14


def test_constant_trace_gives_still_water(setup):
    grid, p = setup
    _, tr = solve_traces(grid, p, np.full(grid.N, 1.0), np.full(grid.N, 3.0))
    assert np.max(np.abs(tr.xi1)) < 1e-13 and np.max(np.abs(tr.xi2)) < 1e-13
    assert np.allclose(tr.chi, -p.omega / 2)


@settings(max_examples=10, deadline=None)
@given(m=st.integers(1, 20), depth=st.floats(0.3, 3.0))
def test_flat_hilbert_multiplier(m, depth):
    p = params_for(N=64, d_ref=depth)
    grid = make_grid(p)
    k = m * grid.k1
    t = hilbert_transform(grid, p, np.full(grid.N, depth), np.sin(k * grid.x))
    assert np.max(np.abs(t - np.tanh(k * depth) * np.cos(k * grid.x))) < 1e-10


def test_dirichlet_data_reproduced_on_wavy_surface(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng, amplitude=0.1)
    fld = solve_dirichlet(grid, p, s.eta, s.xi)
    assert np.max(np.abs(fld.potential(grid.x, s.eta) - s.xi)) < 1e-11
    assert fld.cond < p.cond_limit


def test_hilbert_transform_independent_of_omega(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng)
    a = hilbert_transform(grid, p, s.eta, s.xi)
    b = hilbert_transform(grid, p.with_(omega=-3.0), s.eta, s.xi)
    assert np.array_equal(a, b)


def test_chi_definition(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng)
    _, tr = solve_traces(grid, p, s.eta, s.xi)
    t = hilbert_transform(grid, p, s.eta, s.xi)
    assert np.max(np.abs(t - p.omega / 2 * s.eta**2 - tr.chi)) < 1e-12


def test_field_is_harmonic_with_no_bed_flux(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng)
    fld = solve_dirichlet(grid, p, s.eta, s.xi)
    x, y, h = np.array([0.7, 2.1]), np.array([0.3, 0.6]), 1e-4
    lap = (fld.potential(x + h, y) + fld.potential(x - h, y) + fld.potential(x, y + h)
           + fld.potential(x, y - h) - 4 * fld.potential(x, y)) / h**2
    assert np.max(np.abs(lap)) < 1e-5
    _, v_bed = fld.gradient(grid.x, np.zeros(grid.N))
    assert np.max(np.abs(v_bed)) < 1e-15
    assert np.max(np.abs(fld.conjugate(grid.x, np.zeros(grid.N)))) < 1e-15


def test_conjugate_satisfies_cauchy_riemann(setup, rng):
    grid, p = setup
    fld = solve_dirichlet(grid, p, *(lambda s: (s.eta, s.xi))(resolved_state(grid, p, rng)))
    x, y, h = np.array([1.3]), np.array([0.5]), 1e-5
    px, py = fld.gradient(x, y)
    qx = (fld.conjugate(x + h, y) - fld.conjugate(x - h, y)) / (2 * h)
    qy = (fld.conjugate(x, y + h) - fld.conjugate(x, y - h)) / (2 * h)
    assert abs(qy - px) < 1e-8 and abs(qx + py) < 1e-8


def test_series_oracle_agrees_at_small_amplitude(setup):
    grid, p = setup
    k = grid.k1
    eta = p.d_ref * (1 + 0.01 * np.cos(k * grid.x))
    xi = 0.05 * np.sin(k * grid.x) + 0.02 * np.cos(2 * k * grid.x)
    _, tr = solve_traces(grid, p, eta, xi)
    ser = dno_series_order2(grid, p, eta, xi)
    assert np.max(np.abs(ser.t_xi - tr.t_xi)) < 1e-5
    assert np.max(np.abs(ser.xi2 - tr.xi2)) < 1e-5


def test_interior_domain_checks(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng)
    fld = solve_dirichlet(grid, p, s.eta, s.xi)
    with pytest.raises(DomainError):
        evaluate_interior(fld, p, [[0.0, s.eta[0] + 0.1]])
    with pytest.raises(DomainError):
        evaluate_interior(fld, p, [[0.0, -0.01]])
    out = evaluate_interior(fld, p, [[0.0, s.eta[0] + 0.1], [0.0, 0.5]], allow_extension=True)
    assert out.outside.tolist() == [True, False]
    on = evaluate_interior(fld, p, np.column_stack([grid.x, s.eta]))
    assert not on.outside.any()


def test_stream_function_matches_chi_on_surface(setup, rng):
    grid, p = setup
    s = resolved_state(grid, p, rng)
    fld, tr = solve_traces(grid, p, s.eta, s.xi)
    vals = evaluate_interior(fld, p, np.column_stack([grid.x, s.eta]))
    assert np.max(np.abs(vals.psi - tr.chi)) < 1e-10


def test_surface_below_bed_rejected(setup):
    grid, p = setup
    eta = np.ones(grid.N)
    eta[3] = -0.1
    with pytest.raises(DomainError):
        solve_dirichlet(grid, p, eta, np.zeros(grid.N))


def test_ill_conditioned_collocation_is_reported():
    p = params_for(N=256)
    grid = make_grid(p)
    eta = 1 + 0.3 * np.cos(grid.x)
    with pytest.raises(SingularCollocationError) as exc:
        solve_dirichlet(grid, p, eta, np.sin(grid.x))
    assert exc.value.cond > p.cond_limit
