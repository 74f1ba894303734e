"""Command-line driver.

    cvwaves simulate    --config run.ini [--out DIR]
    cvwaves steady      --config run.ini [--out DIR]
    cvwaves reconstruct --config run.ini [--out DIR]
    cvwaves validate    [--config run.ini] [--quick] [--seed N]

Exit status: 0 success, 1 validation failure, 2 configuration error,
3 solver failure, 4 Newton non-convergence, 5 I/O error, 6 instability.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .config import ConfigError, RunConfig, build_initial_state, load_config
from .core import ConfigurationError, make_grid
from .dynamics import DIAGNOSTIC_COLUMNS, StepError, diagnose, integrate, suggest_dt
from .harmonic import SolverError
from .reconstruct import pressure_field, sample_lattice
from .snapshot import SnapshotError, write_csv, write_snapshot
from .steady import continuation_run
from .validation import run_suite

log = logging.getLogger("cvwaves")

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_SOLVER, EXIT_NONCONVERGENCE, EXIT_IO, EXIT_UNSTABLE = \
    0, 1, 2, 3, 4, 5, 6

SIM_COLUMNS = ("t", "H_surface", "mass", "min_eta", "max_eta", "solve_residual")
FAMILY_COLUMNS = ("amplitude", "c", "k_flux", "H_hat", "residual_norm")
FIELD_COLUMNS = ("x", "y", "u", "v", "psi", "P")


class InstabilityError(RuntimeError):
    pass


def _setup_log(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    handler = logging.FileHandler(os.path.join(out_dir, "run.log"), mode="w")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("cvwaves")
    root.addHandler(handler)
    root.setLevel(logging.INFO)
    return handler


def simulate(config: RunConfig, out_dir: str) -> int:
    params = config.params
    grid = make_grid(params)
    state0 = build_initial_state(config, grid)
    dt = config.resolved_dt(grid)
    t_end = state0.t + config.t_end
    log.info("simulate: N=%d omega=%g dt=%.6g (guidance %.6g) t_end=%.6g",
             params.N, params.omega, dt, suggest_dt(grid, params), t_end)
    # strides are rounded to whole numbers of steps
    diag_every = max(1, int(round((config.diagnostics_stride or dt) / dt)))
    diag_stride = diag_every * dt
    snap_stride = config.output_stride or config.t_end or dt
    every = max(1, int(round(snap_stride / diag_stride)))
    H0 = diagnose(grid, params, state0)[1]

    def monitor(state, row):
        drift = abs(row[1] - H0) / max(abs(H0), 1e-300)
        if not np.isfinite(row[1]) or drift > config.drift_tolerance:
            raise InstabilityError(
                f"energy drift {drift:.3e} exceeds {config.drift_tolerance:.1e} at t={state.t:.6g}")

    traj = integrate(grid, params, state0, t_end, dt, output_stride=diag_stride,
                     normalize_gauge=config.gauge_normalization, monitor=monitor)
    snap_dir = os.path.join(out_dir, "snapshots")
    os.makedirs(snap_dir, exist_ok=True)
    cols = [DIAGNOSTIC_COLUMNS.index(c) for c in SIM_COLUMNS]
    write_csv(os.path.join(out_dir, "diagnostics.csv"), SIM_COLUMNS,
              [[row[i] for i in cols] for row in traj.rows])
    for i, state in enumerate(traj.states):
        if i % every == 0 or i == len(traj.states) - 1:
            write_snapshot(os.path.join(snap_dir, f"snap_{i:06d}.txt"), params, state)
    if traj.error is not None:
        err = traj.error
        print(f"simulation stopped at t={traj.times[-1]:.6g}: {err}", file=sys.stderr)
        if isinstance(err, InstabilityError):
            return EXIT_UNSTABLE
        if isinstance(err, (StepError, SolverError)):
            print(f"(guidance dt <= {suggest_dt(grid, params):.4g})", file=sys.stderr)
            return EXIT_SOLVER
        raise err
    H = traj.column("H_surface")
    print(f"simulated to t={traj.times[-1]:.6g} in {len(traj.times) - 1} outputs; "
          f"max relative energy drift {np.max(np.abs(H - H[0])) / abs(H[0]):.3e}")
    return EXIT_OK


def steady(config: RunConfig, out_dir: str) -> int:
    params = config.params
    grid = make_grid(params)
    amps = [a * 1.0 for a in config.amplitudes]
    fam = continuation_run(grid, params, config.steady_branch, amps,
                           tol=config.newton_tol, max_iter=config.max_iter)
    write_csv(os.path.join(out_dir, "family.csv"), FAMILY_COLUMNS, fam.table(grid))
    mem_dir = os.path.join(out_dir, "members")
    os.makedirs(mem_dir, exist_ok=True)
    for i, sol in enumerate(fam):
        write_snapshot(os.path.join(mem_dir, f"member_{i:03d}.txt"), params, sol.state())
    for row in fam.table(grid):
        print("a={:.6g} c={:.12g} k={:.12g} Hhat={:.12g} residual={:.2e}".format(*row))
    if fam.failure is not None:
        print(f"continuation stopped at amplitude {fam.failed_amplitude:.6g}: {fam.failure}",
              file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def reconstruct(config: RunConfig, out_dir: str) -> int:
    params = config.params
    grid = make_grid(params)
    state = build_initial_state(config, grid)
    pts = sample_lattice(grid, state, config.lattice_ny)
    samples = pressure_field(grid, params, state, pts)
    write_csv(os.path.join(out_dir, "fields.csv"), FIELD_COLUMNS, samples.as_array())
    print(f"wrote {len(pts)} samples")
    return EXIT_OK


def validate(config: RunConfig | None, quick: bool, seed: int) -> int:
    params = config.params if config is not None else None
    results = run_suite(params, quick=quick, seed=seed)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cvwaves",
        description="Periodic gravity water waves with constant vorticity.")
    sub = parser.add_subparsers(dest="mode", required=True)
    for name in ("simulate", "steady", "reconstruct"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None, help="output directory (overrides [output])")
    p = sub.add_parser("validate")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--quick", action="store_true", help="reduced resolution")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, mode=args.mode) if args.config else None
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read configuration: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.mode == "validate":
        return validate(config, args.quick, args.seed)
    out_dir = args.out or config.output_dir
    handler = None
    try:
        handler = _setup_log(out_dir)
        if args.mode == "simulate":
            return simulate(config, out_dir)
        if args.mode == "steady":
            return steady(config, out_dir)
        return reconstruct(config, out_dir)
    except (ConfigError, ConfigurationError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, SnapshotError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    finally:
        if handler is not None:
            logging.getLogger("cvwaves").removeHandler(handler)
            handler.close()


if __name__ == "__main__":
    sys.exit(main())
