"""Interlayer mass-exchange rates and the momentum they carry.

The exchange rate through the interface between layers ``a`` and ``a+1`` of
cell ``i`` follows explicitly from the per-layer mass-flux differences:

    dx_i G_{a+1/2,i} = sum_{j<=a} ( Fd_{h_j,i} - l_j sum_p Fd_{h_p,i} )

with ``Fd_{h_j,i} = F_{h_j,i+1/2} - F_{h_j,i-1/2}``.  The layer sum
telescopes, so the row ``a = N`` vanishes identically (no transfer through
the free surface) and only the N-1 interior rates are kept.  ``G`` is
stored divided by ``dx_i`` (units m/s), which is also the form the CFL
bound consumes.
"""

from __future__ import annotations

import numpy as np

from .state import LayerPartition


def exchange_rows(mass_flux_diff: np.ndarray, part: LayerPartition) -> np.ndarray:
    """All N rows of ``dx * G`` including the free-surface row, shape (N, I)."""
    total = np.sum(mass_flux_diff, axis=0)
    partial = np.cumsum(mass_flux_diff, axis=0)
    return partial - part.cumulative[:, None] * total[None, :]


def compute_exchanges(mass_flux_diff: np.ndarray, part: LayerPartition,
                      dx) -> np.ndarray:
    """Interior exchange rates ``G_{a+1/2,i}``, shape (N-1, I).

    ``mass_flux_diff`` holds the per-layer mass-flux differences of each
    cell (already including any hydrostatic reconstruction).
    """
    rows = exchange_rows(mass_flux_diff, part)
    return rows[:-1] / np.asarray(dx, dtype=float)[None, :]


def interface_velocity(u_lower, u_upper, G):
    """Upwinded interface velocity: ``u_{a+1}`` when ``G >= 0``, else ``u_a``."""
    return np.where(np.asarray(G) >= 0.0, u_upper, u_lower)


def momentum_exchange(G: np.ndarray, u_interface: np.ndarray) -> np.ndarray:
    """Per-layer momentum source ``u_{a+1/2} G_{a+1/2} - u_{a-1/2} G_{a-1/2}``.

    ``G`` and ``u_interface`` hold the N-1 interior interfaces; the bed and
    free-surface rates are structurally zero.  Output shape is (N, I); the
    mass equation receives no exchange contribution at all.
    """
    n_layers = G.shape[0] + 1
    flux = G * u_interface
    out = np.zeros((n_layers, G.shape[1]))
    out[:-1] += flux
    out[1:] -= flux
    return out
