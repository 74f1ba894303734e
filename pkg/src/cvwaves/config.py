"""Run configuration: INI-style sections of ``key = value`` pairs.

Recognised sections and keys (defaults in brackets)::

    [physics]   L, g, omega, d_ref [1], P_atm [0]
    [numerics]  N, dealias_fraction [2/3], solver_tol [1e-10],
                gauge_normalization [true], quadrature_order [24]
    [initial]   ic = flat | linear-mode | custom | snapshot
                mode [1], amplitude [0.01 d_ref], branch [1]      (linear-mode)
                eta_cos, eta_sin, xi_cos, xi_sin [empty]          (custom, m = 1, 2, ...)
                path                                              (snapshot)
    [time]      t_end, dt (upper bound or "auto"), output_stride [t_end],
                diagnostics_stride [dt], drift_tolerance [1e-6]
    [steady]    branch [1], amplitudes [0, 0.02, 0.04], newton_tol [1e-10], max_iter [25]
    [output]    directory [output], lattice_ny [16]

Unknown sections or keys are rejected so that typos never pass silently.
"""
from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

import numpy as np

from .core import (ConfigurationError, PeriodicGrid, SurfaceState, WaveParameters, dealias_cutoff,
                   from_modes)
from .dynamics import linear_mode, suggest_dt
from .snapshot import SnapshotError, read_snapshot

MODES = ("simulate", "steady", "validate", "reconstruct")
IC_SHAPES = ("flat", "linear-mode", "custom", "snapshot")

SCHEMA = {
    "physics": {"L", "g", "omega", "d_ref", "P_atm"},
    "numerics": {"N", "dealias_fraction", "solver_tol", "gauge_normalization",
                 "quadrature_order"},
    "initial": {"ic", "mode", "amplitude", "branch", "eta_cos", "eta_sin", "xi_cos", "xi_sin",
                "path"},
    "time": {"t_end", "dt", "output_stride", "diagnostics_stride", "drift_tolerance"},
    "steady": {"branch", "amplitudes", "newton_tol", "max_iter"},
    "output": {"directory", "lattice_ny"},
}


class ConfigError(ConfigurationError):
    """Configuration problem, tagged with a line number or a field name."""

    def __init__(self, message, field_name=None, line=None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message, field_name)
        self.line = line


class ResolutionError(ConfigError):
    pass


@dataclass(frozen=True)
class InitialCondition:
    shape: str = "flat"
    mode: int = 1
    amplitude: float | None = None
    branch: int = 1
    eta_cos: tuple = ()
    eta_sin: tuple = ()
    xi_cos: tuple = ()
    xi_sin: tuple = ()
    path: str | None = None


@dataclass(frozen=True)
class RunConfig:
    params: WaveParameters
    mode: str | None = None
    initial: InitialCondition = field(default_factory=InitialCondition)
    t_end: float | None = None
    dt: float | None = None
    output_stride: float | None = None
    diagnostics_stride: float | None = None
    drift_tolerance: float = 1e-6
    gauge_normalization: bool = True
    quadrature_order: int = 24
    steady_branch: int = 1
    amplitudes: tuple = (0.0, 0.02, 0.04)
    newton_tol: float = 1e-10
    max_iter: int = 25
    output_dir: str = "output"
    lattice_ny: int = 16

    def resolved_dt(self, grid: PeriodicGrid) -> float:
        """Step size reaching ``t_end`` in a whole number of steps.

        A numeric ``dt`` is an upper bound and is shortened to ``t_end / n``
        when it does not divide ``t_end``; 'auto' starts from the stability
        guidance instead.
        """
        target = self.dt if self.dt is not None else suggest_dt(grid, self.params)
        if not self.t_end:
            return target
        n = int(np.ceil(self.t_end / target * (1 - 1e-12)))
        return self.t_end / max(n, 1)


def _float(section, key, raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}", key) from None


def _int(section, key, raw):
    try:
        v = float(raw)
    except ValueError:
        v = None
    if v is None or v != int(v):
        raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}", key)
    return int(v)


def _bool(section, key, raw):
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}", key)


def _list(section, key, raw):
    items = [s for s in raw.replace(";", ",").split(",") if s.strip()]
    return tuple(_float(section, key, s) for s in items)


def _read(text):
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   inline_comment_prefixes=("#", ";"),
                                   default_section="__defaults_unused__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("key outside of any [section]", line=exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ConfigError(exc.message.split(": ", 1)[-1], line=exc.lineno) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}", line=lineno) from None
    # line numbers of keys, for semantic errors
    lines = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
        elif section and s and not s.startswith(("#", ";")):
            for sep in ("=", ":"):
                if sep in s:
                    lines[(section, s.split(sep, 1)[0].strip())] = no
                    break
    return cp, lines


def parse_config(text: str, mode: str | None = None, base_dir: str | None = None) -> RunConfig:
    """Parse and validate a configuration text.

    Relative snapshot paths are resolved against ``base_dir`` and must exist.
    """
    cp, lines = _read(text)
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section,
                              line=_section_line(text, section))
        for key in cp[section]:
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", key,
                                  line=lines.get((section, key)))

    def get(section, key):
        return cp[section][key] if cp.has_option(section, key) else None

    def need(section, key):
        raw = get(section, key)
        if raw is None:
            raise ConfigError(f"missing required key {key!r} in [{section}]", key)
        return raw

    def wrap(fn, section, key, raw):
        try:
            return fn(section, key, raw)
        except ConfigError as exc:
            raise ConfigError(str(exc), key, line=lines.get((section, key))) from None

    phys = {}
    for key in ("L", "g", "omega"):
        phys[key] = wrap(_float, "physics", key, need("physics", key))
    for key, default in (("d_ref", 1.0), ("P_atm", 0.0)):
        raw = get("physics", key)
        phys[key] = default if raw is None else wrap(_float, "physics", key, raw)
    num = {"N": wrap(_int, "numerics", "N", need("numerics", "N"))}
    for key in ("dealias_fraction", "solver_tol"):
        raw = get("numerics", key)
        if raw is not None:
            num[key] = wrap(_float, "numerics", key, raw)
    try:
        params = WaveParameters(**phys, **num)
    except ConfigurationError as exc:
        name = exc.field_name
        sec = "physics" if name in SCHEMA["physics"] else "numerics"
        raise ConfigError(str(exc), name, line=lines.get((sec, name))) from None

    kw = {"params": params, "mode": mode}
    raw = get("numerics", "gauge_normalization")
    if raw is not None:
        kw["gauge_normalization"] = wrap(_bool, "numerics", "gauge_normalization", raw)
    raw = get("numerics", "quadrature_order")
    if raw is not None:
        kw["quadrature_order"] = wrap(_int, "numerics", "quadrature_order", raw)
        if kw["quadrature_order"] < 2:
            raise ConfigError("quadrature_order must be at least 2", "quadrature_order")

    kw["initial"] = _initial(cp, lines, base_dir, params, get, wrap)

    for key in ("t_end", "output_stride", "diagnostics_stride", "drift_tolerance"):
        raw = get("time", key)
        if raw is not None:
            kw[key] = wrap(_float, "time", key, raw)
    raw = get("time", "dt")
    if raw is not None and raw.strip().lower() != "auto":
        kw["dt"] = wrap(_float, "time", "dt", raw)
        if kw["dt"] <= 0:
            raise ConfigError("dt must be positive", "dt", line=lines.get(("time", "dt")))
    if mode == "simulate":
        if kw.get("t_end") is None:
            raise ConfigError("missing required key 't_end' in [time]", "t_end")
        if raw is None:
            raise ConfigError("missing required key 'dt' in [time]", "dt")
    if kw.get("t_end") is not None and kw["t_end"] < 0:
        raise ConfigError("t_end must be non-negative", "t_end")

    raw = get("steady", "branch")
    if raw is not None:
        kw["steady_branch"] = 1 if wrap(_float, "steady", "branch", raw) >= 0 else -1
    raw = get("steady", "amplitudes")
    if raw is not None:
        amps = wrap(_list, "steady", "amplitudes", raw)
        if not amps or any(b <= a for a, b in zip(amps, amps[1:])) or amps[0] < 0:
            raise ConfigError("amplitudes must be non-negative and strictly increasing",
                              "amplitudes", line=lines.get(("steady", "amplitudes")))
        kw["amplitudes"] = amps
    raw = get("steady", "newton_tol")
    if raw is not None:
        kw["newton_tol"] = wrap(_float, "steady", "newton_tol", raw)
    raw = get("steady", "max_iter")
    if raw is not None:
        kw["max_iter"] = wrap(_int, "steady", "max_iter", raw)

    raw = get("output", "directory")
    if raw is not None:
        kw["output_dir"] = raw.strip()
    raw = get("output", "lattice_ny")
    if raw is not None:
        kw["lattice_ny"] = wrap(_int, "output", "lattice_ny", raw)
        if kw["lattice_ny"] < 2:
            raise ConfigError("lattice_ny must be at least 2", "lattice_ny")
    return RunConfig(**kw)


def _section_line(text, section):
    for no, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == f"[{section}]":
            return no
    return None


def _initial(cp, lines, base_dir, params, get, wrap):
    raw = get("initial", "ic")
    shape = "flat" if raw is None else raw.strip().lower()
    if shape not in IC_SHAPES:
        raise ConfigError(f"ic must be one of {', '.join(IC_SHAPES)}, got {raw!r}", "ic",
                          line=lines.get(("initial", "ic")))
    ic = {"shape": shape}
    if get("initial", "mode") is not None:
        ic["mode"] = wrap(_int, "initial", "mode", get("initial", "mode"))
        if ic["mode"] < 1:
            raise ConfigError("mode must be >= 1", "mode")
    if get("initial", "amplitude") is not None:
        ic["amplitude"] = wrap(_float, "initial", "amplitude", get("initial", "amplitude"))
    if get("initial", "branch") is not None:
        ic["branch"] = 1 if wrap(_float, "initial", "branch", get("initial", "branch")) >= 0 else -1
    for key in ("eta_cos", "eta_sin", "xi_cos", "xi_sin"):
        if get("initial", key) is not None:
            ic[key] = wrap(_list, "initial", key, get("initial", key))
    if shape == "snapshot":
        raw = get("initial", "path")
        if raw is None:
            raise ConfigError("ic = snapshot requires 'path'", "path")
        path = raw.strip()
        if base_dir and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        if not os.path.exists(path):
            raise ConfigError(f"snapshot file not found: {path}", "path",
                              line=lines.get(("initial", "path")))
        ic["path"] = path
    return InitialCondition(**ic)


def load_config(path: str, mode: str | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, mode=mode, base_dir=os.path.dirname(os.path.abspath(path)))


def build_initial_state(config: RunConfig, grid: PeriodicGrid) -> SurfaceState:
    params = config.params
    ic = config.initial
    d = params.d_ref
    cutoff = dealias_cutoff(grid, params.dealias_fraction)
    if ic.shape == "flat":
        return SurfaceState.flat(grid, d)
    if ic.shape == "linear-mode":
        if ic.mode > cutoff:
            raise ResolutionError(
                f"mode {ic.mode} exceeds the dealiased range (max {cutoff})", "mode")
        a = 0.01 * d if ic.amplitude is None else ic.amplitude
        if abs(a) >= d:
            raise ConfigError("amplitude must be smaller than d_ref", "amplitude")
        return linear_mode(grid, params, ic.mode, a, branch=ic.branch)
    if ic.shape == "custom":
        longest = max(len(ic.eta_cos), len(ic.eta_sin), len(ic.xi_cos), len(ic.xi_sin))
        if longest > cutoff:
            raise ResolutionError(
                f"custom modes up to {longest} exceed the dealiased range (max {cutoff})",
                "eta_cos")
        eta = from_modes(grid, d, ic.eta_cos, ic.eta_sin)
        if np.min(eta) <= 0:
            raise ConfigError("custom surface touches the bed", "eta_cos")
        return SurfaceState(0.0, eta, from_modes(grid, 0.0, ic.xi_cos, ic.xi_sin))
    try:
        snap = read_snapshot(ic.path)
    except (OSError, SnapshotError) as exc:
        raise ConfigError(f"cannot load snapshot {ic.path}: {exc}", "path") from exc
    for key in ("N", "L", "g", "omega", "d_ref"):
        if not np.isclose(getattr(snap, key), getattr(params, key), rtol=1e-15, atol=0):
            raise ConfigError(
                f"snapshot {key} = {getattr(snap, key)} does not match configuration "
                f"{key} = {getattr(params, key)}", key)
    return snap.state()
