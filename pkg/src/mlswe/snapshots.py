"""Delimited snapshot output.

One CSV per snapshot, one row per cell:

    x, z_b, H, u_1 ... u_N, w_1 ... w_N

written with 17 significant digits so a reread is bit-exact.  A run-level
series CSV accumulates ``t, dt, mass, energy`` per snapshot.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .diagnostics import vertical_velocity
from .state import SimState


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def snapshot_filename(index: int) -> str:
    return f"snapshot_{index:05d}.csv"


def write_snapshot_arrays(path, x, zb, H, u, w):
    """Write raw snapshot columns; shapes (I,), (I,), (I,), (N,I), (N,I)."""
    u = np.atleast_2d(u)
    w = np.atleast_2d(w)
    n_layers = u.shape[0]
    header = (["x", "z_b", "H"]
              + [f"u_{a + 1}" for a in range(n_layers)]
              + [f"w_{a + 1}" for a in range(n_layers)])
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for i in range(len(x)):
                row = [x[i], zb[i], H[i], *u[:, i], *w[:, i]]
                writer.writerow(_fmt(v) for v in row)
    except OSError as exc:
        raise OSError(f"cannot write snapshot {path!r}: {exc}") from exc


def write_snapshot(path, state: SimState, model) -> None:
    """Snapshot of a state on a model grid, vertical velocity included."""
    u = state.velocities(model.part, model.config.dry_threshold)
    w = vertical_velocity(state, model.bathy, model.grid, model.part,
                          model.config.dry_threshold)
    write_snapshot_arrays(path, model.grid.x, model.bathy.z, state.H, u, w)


def read_snapshot(path):
    """Reread a snapshot into a dict of arrays (keys x, zb, H, u, w)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows).T
    n_layers = sum(1 for name in header if name.startswith("u_"))
    out = {
        "x": data[0],
        "zb": data[1],
        "H": data[2],
        "u": data[3:3 + n_layers],
        "w": data[3 + n_layers:3 + 2 * n_layers],
    }
    return out


SERIES_HEADER = ["t", "dt", "mass", "energy"]


class SeriesWriter:
    """Appends one ``t, dt, mass, energy`` row per snapshot."""

    def __init__(self, path):
        self.path = path
        with open(path, "w", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerow(SERIES_HEADER)

    def append(self, t, dt, mass, energy):
        with open(self.path, "a", newline="", encoding="utf-8") as fh:
            csv.writer(fh).writerow(_fmt(v) for v in (t, dt, mass, energy))


def read_series(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.array(rows).T if rows else np.zeros((4, 0))
    return dict(zip(SERIES_HEADER, data))


def list_snapshots(directory):
    """Snapshot files of a run directory, in index order."""
    names = sorted(n for n in os.listdir(directory)
                   if n.startswith("snapshot_") and n.endswith(".csv"))
    return [os.path.join(directory, n) for n in names]
