import numpy as np
import pytest

from cvwaves.core import WaveParameters, make_grid
from cvwaves.validation import random_state

TWO_PI = 2 * np.pi


def params_for(omega=1.0, N=64, **kw):
    base = dict(L=TWO_PI, g=9.81, omega=omega, d_ref=1.0, N=N)
    base.update(kw)
    return WaveParameters(**base)


@pytest.fixture
def setup():
    p = params_for()
    return make_grid(p), p


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def resolved_state(grid, params, rng, amplitude=0.05):
    return random_state(grid, params, rng, amplitude=amplitude)


def euler_residuals(grid, params, state, points, h=1e-4, dt=1e-4):
    """Centered finite-difference residuals of the momentum and mass equations.

    Time derivatives at fixed points come from the states state -/+ dt * rate,
    with rate the unfiltered evolution.  Returns (x-momentum, y-momentum,
    divergence, vorticity - omega) arrays.
    """
    from cvwaves.core import SurfaceState
    from cvwaves.dynamics import rhs
    from cvwaves.reconstruct import FlowReconstruction

    rec = FlowReconstruction(grid, params, state)
    eta_t, xi_t = rhs(grid, params, state, dealiased=False)
    later = FlowReconstruction(grid, params, SurfaceState(0, state.eta + dt * eta_t,
                                                          state.xi + dt * xi_t), False)
    earlier = FlowReconstruction(grid, params, SurfaceState(0, state.eta - dt * eta_t,
                                                            state.xi - dt * xi_t), False)
    pts = np.asarray(points, float)
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    c = rec.sample(pts)
    xp, xm, yp, ym = (rec.sample(pts + e) for e in (ex, -ex, ey, -ey))
    u_t = (later.sample(pts).u - earlier.sample(pts).u) / (2 * dt)
    v_t = (later.sample(pts).v - earlier.sample(pts).v) / (2 * dt)
    ux, uy = (xp.u - xm.u) / (2 * h), (yp.u - ym.u) / (2 * h)
    vx, vy = (xp.v - xm.v) / (2 * h), (yp.v - ym.v) / (2 * h)
    Px, Py = (xp.P - xm.P) / (2 * h), (yp.P - ym.P) / (2 * h)
    mom_x = u_t + c.u * ux + c.v * uy + Px
    mom_y = v_t + c.u * vx + c.v * vy + Py + params.g
    return mom_x, mom_y, ux + vy, vx - uy - params.omega


ACCEPTANCE_LINES = []


def record(number, title, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
