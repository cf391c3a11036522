"""Ghost-cell boundary conditions for the finite-volume stepper.

The stepper works on arrays extended by two ghost cells per side; the
second ghost only matters for the limited reconstruction of the first one.
Velocities are rightward-positive everywhere, including imposed
discharges.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .state import DEFAULT_DRY_THRESHOLD


class BoundaryKind(Enum):
    WALL = "wall"
    DISCHARGE = "discharge"
    HEIGHT = "height"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class BoundarySpec:
    """End conditions of the domain.

    ``left_value``/``right_value`` carry the imposed discharge (m^2/s) or
    height (m) where the kind requires one and are ignored otherwise.
    """

    left: BoundaryKind = BoundaryKind.WALL
    right: BoundaryKind = BoundaryKind.WALL
    left_value: float = 0.0
    right_value: float = 0.0

    def __post_init__(self):
        errors = []
        if (self.left is BoundaryKind.PERIODIC) != (self.right is BoundaryKind.PERIODIC):
            errors.append("periodic boundaries must be set on both ends")
        for side, kind, value in (("left", self.left, self.left_value),
                                  ("right", self.right, self.right_value)):
            if kind in (BoundaryKind.DISCHARGE, BoundaryKind.HEIGHT):
                if not np.isfinite(value):
                    errors.append(f"{side} boundary value must be finite")
                if kind is BoundaryKind.HEIGHT and value < 0.0:
                    errors.append(f"{side} boundary height must be non-negative")
        if errors:
            raise ConfigurationError(errors)


def _ghost_column(kind, value, H_edge, u_edge, zb_edge, gravity, dry_threshold):
    """Ghost (H, u, zb) next to one boundary from the adjacent interior cell."""
    if kind is BoundaryKind.WALL:
        return H_edge, -u_edge, zb_edge
    if kind is BoundaryKind.HEIGHT:
        return value, u_edge.copy(), zb_edge
    if kind is BoundaryKind.DISCHARGE:
        if H_edge > dry_threshold:
            h_ghost = H_edge
        elif value != 0.0:
            # inflow onto a dry bed: start from the critical height
            h_ghost = (value * value / gravity) ** (1.0 / 3.0)
        else:
            return 0.0, np.zeros_like(u_edge), zb_edge
        u_ghost = np.full_like(u_edge, value / h_ghost)
        return h_ghost, u_ghost, zb_edge
    raise ConfigurationError(f"unsupported boundary kind {kind!r}")


def extend_state(H, u, zb, bc: BoundarySpec, gravity,
                 dry_threshold=DEFAULT_DRY_THRESHOLD):
    """Extend ``(H, u, zb)`` by two ghost cells per side.

    Returns arrays of shapes (I+4,), (N, I+4), (I+4,).  Wall ghosts mirror
    the state with negated velocity (zero normal flux); imposed-discharge
    ghosts copy the interior height and spread the discharge uniformly over
    the layers; imposed-height ghosts pin the height and copy the interior
    velocities; periodic wraps.
    """
    H = np.asarray(H, dtype=float)
    u = np.asarray(u, dtype=float)
    zb = np.asarray(zb, dtype=float)
    n_cells = H.size
    H_ext = np.empty(n_cells + 4)
    u_ext = np.empty((u.shape[0], n_cells + 4))
    zb_ext = np.empty(n_cells + 4)
    H_ext[2:-2] = H
    u_ext[:, 2:-2] = u
    zb_ext[2:-2] = zb

    if bc.left is BoundaryKind.PERIODIC:
        idx = [(n_cells - 2) % n_cells, (n_cells - 1) % n_cells]
        H_ext[:2] = H[idx]
        u_ext[:, :2] = u[:, idx]
        zb_ext[:2] = zb[idx]
        H_ext[-2:] = H[[0, 1 % n_cells]]
        u_ext[:, -2:] = u[:, [0, 1 % n_cells]]
        zb_ext[-2:] = zb[[0, 1 % n_cells]]
        return H_ext, u_ext, zb_ext

    if bc.left is BoundaryKind.WALL:
        for ghost, interior in ((1, 0), (0, min(1, n_cells - 1))):
            H_ext[ghost] = H[interior]
            u_ext[:, ghost] = -u[:, interior]
            zb_ext[ghost] = zb[interior]
    else:
        hg, ug, zg = _ghost_column(bc.left, bc.left_value, H[0], u[:, 0],
                                   zb[0], gravity, dry_threshold)
        for ghost in (0, 1):
            H_ext[ghost] = hg
            u_ext[:, ghost] = ug
            zb_ext[ghost] = zg

    if bc.right is BoundaryKind.WALL:
        for ghost, interior in ((-2, -1), (-1, -min(2, n_cells))):
            H_ext[ghost] = H[interior]
            u_ext[:, ghost] = -u[:, interior]
            zb_ext[ghost] = zb[interior]
    else:
        hg, ug, zg = _ghost_column(bc.right, bc.right_value, H[-1], u[:, -1],
                                   zb[-1], gravity, dry_threshold)
        for ghost in (-2, -1):
            H_ext[ghost] = hg
            u_ext[:, ghost] = ug
            zb_ext[ghost] = zg

    return H_ext, u_ext, zb_ext
