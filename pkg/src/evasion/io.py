"""Plain-text snapshot files and the diagnostics CSV stream."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import IO

import numpy as np

from evasion.diagnostics import DiagnosticsRecord
from evasion.pde_solver import Grid, SystemState

DIAGNOSTICS_COLUMNS = ("t", "dt", "supN", "supP", "supW", "mass_v", "lyapunov", "mode1_amp", "status")


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def write_snapshot(path, state: SystemState) -> None:
    """Header lines ``t=``, ``dim=``, ``n=``, ``L=`` then ``x[,y],N,P,W`` rows."""
    g = state.grid
    with open(path, "w") as fh:
        fh.write(f"t={fmt(state.t)}\n")
        fh.write(f"dim={g.dim}\n")
        fh.write(f"n={g.n}\n")
        fh.write(f"L={fmt(g.L)}\n")
        coords = [c.ravel() for c in g.coords()]
        cols = coords + [state.N.ravel(), state.P.ravel(), state.W.ravel()]
        for row in zip(*cols):
            fh.write(",".join(fmt(v) for v in row))
            fh.write("\n")


def read_snapshot(path) -> SystemState:
    with open(path) as fh:
        head = {}
        for _ in range(4):
            key, _, val = fh.readline().strip().partition("=")
            head[key] = val
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    dim, n = int(head["dim"]), int(head["n"])
    grid = Grid(dim, float(head["L"]), n)
    shape = grid.shape
    N, P, W = (data[:, dim + k].reshape(shape) for k in range(3))
    return SystemState(float(head["t"]), N, P, W, grid)


class DiagnosticsWriter:
    """Streams :class:`DiagnosticsRecord` rows to a CSV file."""

    def __init__(self, stream: IO[str]):
        self._stream = stream
        self._w = csv.writer(stream, lineterminator="\n")
        self._w.writerow(DIAGNOSTICS_COLUMNS)

    def __call__(self, rec: DiagnosticsRecord) -> None:
        self._w.writerow(
            [fmt(rec.t), fmt(rec.dt), fmt(rec.supN), fmt(rec.supP), fmt(rec.supW),
             fmt(rec.mass_v), fmt(rec.lyapunov), fmt(rec.mode1_amp), rec.status]
        )

    def flush(self) -> None:
        self._stream.flush()


class SnapshotWriter:
    """Writes ``snapshot_00000.txt``, ``snapshot_00001.txt``, ... into a directory."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.count = 0

    def __call__(self, state: SystemState) -> None:
        write_snapshot(self.directory / f"snapshot_{self.count:05d}.txt", state)
        self.count += 1
