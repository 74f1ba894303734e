"""Plain-text snapshot and CSV writers.

Snapshot layout::

    # cvwaves surface snapshot
    format_version = 1
    L = 6.2831853071795862
    N = 64
    g = 9.8100000000000005
    omega = 2
    d_ref = 1
    t = 0
    eta,xi
    1.01,0
    ...

Numbers use 17 significant digits so doubles round-trip exactly.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .core import SurfaceState

FORMAT_VERSION = 1
HEADER_KEYS = ("L", "N", "g", "omega", "d_ref", "t")


class SnapshotError(ValueError):
    pass


def fmt(v) -> str:
    return format(float(v), ".17g")


@dataclass(frozen=True)
class Snapshot:
    L: float
    N: int
    g: float
    omega: float
    d_ref: float
    t: float
    eta: np.ndarray
    xi: np.ndarray

    @classmethod
    def from_state(cls, params, state: SurfaceState) -> "Snapshot":
        return cls(L=params.L, N=params.N, g=params.g, omega=params.omega, d_ref=params.d_ref,
                   t=state.t, eta=np.asarray(state.eta), xi=np.asarray(state.xi))

    def state(self) -> SurfaceState:
        return SurfaceState(self.t, self.eta, self.xi)

    def dumps(self) -> str:
        lines = ["# cvwaves surface snapshot", f"format_version = {FORMAT_VERSION}"]
        for key in HEADER_KEYS:
            val = getattr(self, key)
            lines.append(f"{key} = {val if key == 'N' else fmt(val)}")
        lines.append("eta,xi")
        lines.extend(f"{fmt(a)},{fmt(b)}" for a, b in zip(self.eta, self.xi))
        return "\n".join(lines) + "\n"


def loads(text: str) -> Snapshot:
    header = {}
    rows = []
    in_data = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if in_data:
            parts = line.split(",")
            if len(parts) != 2:
                raise SnapshotError(f"line {lineno}: expected two comma-separated values")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError as exc:
                raise SnapshotError(f"line {lineno}: {exc}") from None
        elif line == "eta,xi":
            in_data = True
        else:
            key, sep, val = line.partition("=")
            if not sep:
                raise SnapshotError(f"line {lineno}: expected 'key = value'")
            header[key.strip()] = val.strip()
    version = header.pop("format_version", None)
    if version is None:
        raise SnapshotError("missing format_version")
    if version != str(FORMAT_VERSION):
        raise SnapshotError(
            f"unsupported snapshot format_version {version} (expected {FORMAT_VERSION})")
    missing = [k for k in HEADER_KEYS if k not in header]
    if missing:
        raise SnapshotError(f"missing header keys: {', '.join(missing)}")
    unknown = sorted(set(header) - set(HEADER_KEYS))
    if unknown:
        raise SnapshotError(f"unknown header keys: {', '.join(unknown)}")
    N = int(header["N"])
    if len(rows) != N:
        raise SnapshotError(f"header declares N = {N} but {len(rows)} data rows found")
    data = np.array(rows, dtype=float).reshape(N, 2)
    return Snapshot(L=float(header["L"]), N=N, g=float(header["g"]),
                    omega=float(header["omega"]), d_ref=float(header["d_ref"]),
                    t=float(header["t"]), eta=data[:, 0].copy(), xi=data[:, 1].copy())


def write_snapshot(path, params, state: SurfaceState) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(Snapshot.from_state(params, state).dumps())


def read_snapshot(path) -> Snapshot:
    with open(path, encoding="ascii") as fh:
        return loads(fh.read())


def write_csv(path, columns, rows) -> None:
    """Comma-separated, header row, LF endings, 17-digit decimals."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv(path):
    """Return (columns, array) from a file written by :func:`write_csv`."""
    with open(path, encoding="ascii") as fh:
        columns = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return columns, data
