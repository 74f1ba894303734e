import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cvwaves.config import (ConfigError, ResolutionError, build_initial_state, load_config,
                            parse_config)
from cvwaves.core import SurfaceState, make_grid
from cvwaves.snapshot import (Snapshot, SnapshotError, loads, read_csv, read_snapshot, write_csv,
                              write_snapshot)

from conftest import params_for

BASE = """
[physics]
L = 6.283185307179586
g = 9.81
omega = 1.0
[numerics]
N = 32
"""

finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.floats(0.1, 10), finite), min_size=8, max_size=8), finite)
def test_snapshot_roundtrip_is_exact(rows, t):
    p = params_for(N=8, omega=-0.3)
    eta, xi = np.array(rows).T
    state = SurfaceState(t, eta, xi)
    back = loads(Snapshot.from_state(p, state).dumps())
    assert np.array_equal(back.eta, eta) and np.array_equal(back.xi, xi)
    assert back.t == state.t and back.omega == -0.3 and back.N == 8


def test_snapshot_schema_errors():
    p = params_for(N=8)
    text = Snapshot.from_state(p, SurfaceState.flat(make_grid(p), 1.0)).dumps()
    with pytest.raises(SnapshotError, match="format_version"):
        loads(text.replace("format_version = 1", "format_version = 2"))
    with pytest.raises(SnapshotError, match="data rows"):
        loads(text.rsplit("\n", 2)[0] + "\n")
    with pytest.raises(SnapshotError, match="missing"):
        loads(text.replace("omega = ", "# omega = "))
    with pytest.raises(SnapshotError, match="unknown"):
        loads(text.replace("t = 0", "t = 0\nfoo = 1"))


def test_snapshot_and_csv_files(tmp_path):
    p = params_for(N=8)
    s = SurfaceState(0.5, np.linspace(1, 2, 8), np.arange(8.0))
    write_snapshot(tmp_path / "s.txt", p, s)
    back = read_snapshot(tmp_path / "s.txt").state()
    assert np.array_equal(back.eta, s.eta) and back.t == 0.5
    write_csv(tmp_path / "sub" / "a.csv", ("a", "b"), [[1, 0.1], [2, 1 / 3]])
    cols, data = read_csv(tmp_path / "sub" / "a.csv")
    assert cols == ["a", "b"] and data[1, 1] == 1 / 3
    assert b"\r" not in (tmp_path / "sub" / "a.csv").read_bytes()


def test_minimal_config_defaults():
    cfg = parse_config(BASE)
    assert cfg.params.d_ref == 1.0 and cfg.params.N == 32
    assert cfg.initial.shape == "flat" and cfg.amplitudes == (0.0, 0.02, 0.04)


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE + "[time]\nt_end = 1\ndtt = 0.1\n")
    assert exc.value.line == 10 and exc.value.field_name == "dtt"
    with pytest.raises(ConfigError, match="unknown section"):
        parse_config(BASE + "[extra]\n")


def test_bad_values_are_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(BASE.replace("N = 32", "N = 33"))
    assert exc.value.field_name == "N" and exc.value.line == 7
    with pytest.raises(ConfigError, match="number"):
        parse_config(BASE.replace("g = 9.81", "g = lots"))
    with pytest.raises(ConfigError, match="missing"):
        parse_config(BASE.replace("omega = 1.0", ""))
    with pytest.raises(ConfigError, match="increasing"):
        parse_config(BASE + "[steady]\namplitudes = 0, 0.04, 0.02\n")
    with pytest.raises(ConfigError, match="ic must be"):
        parse_config(BASE + "[initial]\nic = soliton\n")


def test_simulate_mode_requires_time_keys():
    with pytest.raises(ConfigError, match="t_end"):
        parse_config(BASE, mode="simulate")
    with pytest.raises(ConfigError, match="dt"):
        parse_config(BASE + "[time]\nt_end = 1\n", mode="simulate")
    cfg = parse_config(BASE + "[time]\nt_end = 1\ndt = auto\n", mode="simulate")
    grid = make_grid(cfg.params)
    dt = cfg.resolved_dt(grid)
    n = round(1 / dt)
    assert np.isclose(n * dt, 1.0) and dt <= 0.5 / 1.0 + 1e-15


def test_numeric_dt_is_an_upper_bound():
    cfg = parse_config(BASE + "[time]\nt_end = 1\ndt = 0.3\n", mode="simulate")
    assert np.isclose(cfg.resolved_dt(make_grid(cfg.params)), 0.25)


def test_initial_conditions(tmp_path):
    cfg = parse_config(BASE + "[initial]\nic = linear-mode\nmode = 2\namplitude = 0.05\n")
    grid = make_grid(cfg.params)
    s = build_initial_state(cfg, grid)
    assert np.isclose(s.eta.max(), 1.05)
    cfg = parse_config(BASE + "[initial]\nic = custom\neta_cos = 0, 0.1\nxi_sin = 0.2\n")
    s = build_initial_state(cfg, grid)
    assert np.allclose(s.eta, 1 + 0.1 * np.cos(2 * grid.x))
    assert np.allclose(s.xi, 0.2 * np.sin(grid.x))
    with pytest.raises(ResolutionError):
        build_initial_state(parse_config(BASE + "[initial]\nic = linear-mode\nmode = 11\n"), grid)


def test_snapshot_initial_condition(tmp_path):
    p = params_for(N=32, omega=1.0)
    grid = make_grid(p)
    write_snapshot(tmp_path / "s.txt", p, SurfaceState(2.0, 1 + 0.1 * np.cos(grid.x), np.zeros(32)))
    (tmp_path / "run.ini").write_text(BASE + "[initial]\nic = snapshot\npath = s.txt\n")
    cfg = load_config(tmp_path / "run.ini")
    assert build_initial_state(cfg, grid).t == 2.0
    (tmp_path / "bad.ini").write_text(BASE.replace("omega = 1.0", "omega = 2.0")
                                      + "[initial]\nic = snapshot\npath = s.txt\n")
    with pytest.raises(ConfigError, match="omega"):
        build_initial_state(load_config(tmp_path / "bad.ini"), grid)
    with pytest.raises(ConfigError, match="not found"):
        parse_config(BASE + "[initial]\nic = snapshot\npath = nowhere.txt\n", base_dir=str(tmp_path))
