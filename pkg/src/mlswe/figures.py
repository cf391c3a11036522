"""Figure rendering for run reports.

Reads the delimited output of a run directory (scenario.ini, snapshots,
series) and writes PNG files alongside it: surface profile, per-layer
horizontal and vertical velocity fields on the layer mesh, velocity
vectors, and the mass/energy series.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .scenario import load_scenario  # noqa: E402
from .snapshots import list_snapshots, read_series, read_snapshot  # noqa: E402


def _layer_mesh(x, zb, H, fractions):
    """Corner coordinates of the postprocessing layer mesh.

    Returns X, Z of shape (N+1, I+1): cell-corner abscissae and the layer
    interface elevations interpolated to them.
    """
    x = np.asarray(x)
    edges = np.empty(x.size + 1)
    edges[1:-1] = 0.5 * (x[:-1] + x[1:])
    edges[0] = x[0] - (edges[1] - x[0])
    edges[-1] = x[-1] + (x[-1] - edges[-2])

    cum = np.concatenate(([0.0], np.cumsum(fractions)))
    z_iface = zb[None, :] + cum[:, None] * H[None, :]  # (N+1, I)
    z_corner = np.empty((cum.size, x.size + 1))
    z_corner[:, 1:-1] = 0.5 * (z_iface[:, :-1] + z_iface[:, 1:])
    z_corner[:, 0] = z_iface[:, 0]
    z_corner[:, -1] = z_iface[:, -1]
    X = np.broadcast_to(edges, z_corner.shape)
    return X, z_corner


def _field_figure(path, x, zb, H, fractions, field, title, label):
    X, Z = _layer_mesh(x, zb, H, fractions)
    fig, ax = plt.subplots(figsize=(9, 4))
    mesh = ax.pcolormesh(X, Z, field, shading="flat", cmap="RdBu_r")
    ax.plot(x, zb, "k-", lw=1.2)
    ax.plot(x, zb + H, "b-", lw=0.8)
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("z (m)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_run_figures(directory):
    """Render all report figures for a completed run; returns the paths."""
    scenario = load_scenario(os.path.join(directory, "scenario.ini"))
    snaps = list_snapshots(directory)
    if not snaps:
        raise FileNotFoundError(f"no snapshots in {directory!r}")
    final = read_snapshot(snaps[-1])
    x, zb, H = final["x"], final["zb"], final["H"]
    fractions = scenario.fractions
    written = []

    fig, ax = plt.subplots(figsize=(9, 4))
    for path in snaps[:-1]:
        snap = read_snapshot(path)
        ax.plot(snap["x"], snap["zb"] + snap["H"], color="0.8", lw=0.6)
    ax.plot(x, zb + H, "b-", lw=1.5, label="free surface")
    ax.fill_between(x, np.min(zb) - 0.05 * (np.max(zb + H) - np.min(zb)), zb,
                    color="0.4")
    ax.plot(x, zb, "k-", lw=1.0, label="bed")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("z (m)")
    ax.set_title("Free surface (final, grey: earlier snapshots)")
    ax.legend(loc="best")
    fig.tight_layout()
    out = os.path.join(directory, "surface.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    written.append(out)

    out = os.path.join(directory, "velocity_field.png")
    _field_figure(out, x, zb, H, fractions, final["u"],
                  "Layer horizontal velocities", "u (m/s)")
    written.append(out)

    out = os.path.join(directory, "vertical_velocity.png")
    _field_figure(out, x, zb, H, fractions, final["w"],
                  "Reconstructed vertical velocities", "w (m/s)")
    written.append(out)

    # velocity vectors at layer midpoints, subsampled in x
    cum = np.concatenate(([0.0], np.cumsum(fractions)))
    mid = 0.5 * (cum[:-1] + cum[1:])
    zmid = zb[None, :] + mid[:, None] * H[None, :]
    stride = max(1, x.size // 40)
    speed = np.hypot(final["u"], final["w"]).max()
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.quiver(np.broadcast_to(x, zmid.shape)[:, ::stride], zmid[:, ::stride],
              final["u"][:, ::stride], final["w"][:, ::stride],
              angles="xy", width=2.5e-3,
              scale=None if speed > 0.0 else 1.0)
    ax.plot(x, zb, "k-", lw=1.0)
    ax.plot(x, zb + H, "b-", lw=0.8)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("z (m)")
    ax.set_title("Velocity field")
    fig.tight_layout()
    out = os.path.join(directory, "velocity_vectors.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    written.append(out)

    series_path = os.path.join(directory, "series.csv")
    if os.path.exists(series_path):
        series = read_series(series_path)
        if series["t"].size:
            fig, ax = plt.subplots(figsize=(9, 4))
            ax.plot(series["t"], series["mass"], "b-", label="mass")
            ax.set_xlabel("t (s)")
            ax.set_ylabel("mass (m^2)", color="b")
            twin = ax.twinx()
            twin.plot(series["t"], series["energy"], "r-", label="energy")
            twin.set_ylabel("energy (m^4/s^2)", color="r")
            ax.set_title("Mass and energy")
            fig.tight_layout()
            out = os.path.join(directory, "series.png")
            fig.savefig(out, dpi=150)
            plt.close(fig)
            written.append(out)
    return written
