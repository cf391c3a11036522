"""Core containers: grid, layer partition, bathymetry, state and physics.

Conventions used throughout the package:

* ``H`` is the total water height per cell, shape ``(I,)``.
* Layer quantities are stacked layer-first, shape ``(N, I)``, with layer 0
  at the bed and layer N-1 at the free surface.
* Layer heights are ``h_a = l_a * H`` for fixed fractions ``l_a``, so the
  only per-layer prognostic variables are the discharges
  ``q_a = l_a * H * u_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError

DEFAULT_DRY_THRESHOLD = 1e-10

PARTITION_SUM_TOL = 1e-14


def _as_float_array(values, name):
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ConfigurationError(f"{name} must be one-dimensional")
    return arr


@dataclass(frozen=True)
class Grid1D:
    """Cell-centered 1D grid: centers ``x`` and widths ``dx``."""

    x: np.ndarray
    dx: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _as_float_array(self.x, "x"))
        object.__setattr__(self, "dx", _as_float_array(self.dx, "dx"))
        errors = []
        if self.x.size == 0:
            errors.append("grid needs at least one cell")
        if self.x.size != self.dx.size:
            errors.append("x and dx must have the same length")
        elif np.any(self.dx <= 0.0):
            errors.append("cell widths must be positive")
        if self.x.size > 1 and np.any(np.diff(self.x) <= 0.0):
            errors.append("cell centers must be strictly increasing")
        if errors:
            raise ConfigurationError(errors)

    @classmethod
    def uniform(cls, x_min, x_max, cells):
        if cells < 1 or x_max <= x_min:
            raise ConfigurationError("uniform grid needs cells >= 1 and x_max > x_min")
        dx = (x_max - x_min) / cells
        x = x_min + (np.arange(cells) + 0.5) * dx
        return cls(x=x, dx=np.full(cells, dx))

    @property
    def n_cells(self) -> int:
        return self.x.size

    @property
    def total_length(self) -> float:
        return float(np.sum(self.dx))


@dataclass(frozen=True)
class LayerPartition:
    """Fixed vertical fractions ``l_a`` with ``sum(l_a) = 1``.

    ``l_a = 0`` is rejected: the implicit viscous matrix divides by
    ``l_a + l_{a+1}`` and velocity recovery divides by ``l_a``.
    """

    fractions: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "fractions", _as_float_array(self.fractions, "fractions")
        )
        errors = []
        if self.fractions.size == 0:
            errors.append("at least one layer is required")
        if np.any(self.fractions <= 0.0):
            errors.append("layer fractions must be strictly positive")
        total = float(np.sum(self.fractions))
        if abs(total - 1.0) > PARTITION_SUM_TOL:
            errors.append(f"layer fractions must sum to 1, got {total!r}")
        if errors:
            raise ConfigurationError(errors)

    @classmethod
    def uniform(cls, n_layers):
        if n_layers < 1:
            raise ConfigurationError("layer count must be >= 1")
        return cls(fractions=np.full(n_layers, 1.0 / n_layers))

    @property
    def n_layers(self) -> int:
        return self.fractions.size

    @property
    def cumulative(self) -> np.ndarray:
        """Partial sums ``b_a = l_1 + ... + l_a``, shape (N,)."""
        return np.cumsum(self.fractions)

    def column(self) -> np.ndarray:
        """Fractions as an (N, 1) column for broadcasting against (N, I)."""
        return self.fractions[:, None]


@dataclass(frozen=True)
class Bathymetry:
    """Static bed elevation per cell."""

    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", _as_float_array(self.z, "z"))
        if not np.all(np.isfinite(self.z)):
            raise ConfigurationError("bed elevations must be finite")


class FrictionLaw(Enum):
    NONE = "none"
    NAVIER = "navier"
    NAVIER_TURBULENT = "navier_turbulent"
    STRICKLER = "strickler"


@dataclass(frozen=True)
class PhysParams:
    """Gravity, vertical viscosity, bottom friction law and wind stress.

    ``wind_stress`` is kinematic (m^2/s^2) and acts on the top layer only.
    """

    gravity: float = 9.81
    viscosity: float = 0.0
    friction: FrictionLaw = FrictionLaw.NONE
    k_l: float = 0.0
    k_t: float = 0.0
    strickler_k: float = 0.0
    wind_stress: float = 0.0

    def __post_init__(self):
        errors = []
        if self.gravity <= 0.0:
            errors.append("gravity must be positive")
        if self.viscosity < 0.0:
            errors.append("viscosity must be non-negative")
        if self.k_l < 0.0 or self.k_t < 0.0:
            errors.append("friction coefficients must be non-negative")
        if self.friction is FrictionLaw.STRICKLER and self.strickler_k <= 0.0:
            errors.append("strickler coefficient must be positive")
        if errors:
            raise ConfigurationError(errors)


@dataclass
class SimState:
    """Prognostic variables: total height ``H`` and layer discharges ``q``."""

    H: np.ndarray
    q: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        if self.q.ndim != 2 or self.q.shape[1] != self.H.shape[0]:
            raise ConfigurationError(
                f"q must have shape (N, {self.H.shape[0]}), got {self.q.shape}"
            )

    @classmethod
    def from_velocity(cls, H, u, part: LayerPartition, t=0.0):
        H = np.asarray(H, dtype=float)
        u = np.broadcast_to(np.asarray(u, dtype=float), (part.n_layers, H.size))
        return cls(H=H.copy(), q=part.column() * H[None, :] * u, t=t)

    @property
    def n_layers(self) -> int:
        return self.q.shape[0]

    @property
    def n_cells(self) -> int:
        return self.H.size

    def copy(self) -> "SimState":
        return SimState(H=self.H.copy(), q=self.q.copy(), t=self.t)

    def velocities(self, part: LayerPartition,
                   dry_threshold=DEFAULT_DRY_THRESHOLD) -> np.ndarray:
        """Layer velocities ``u_a = q_a / (l_a H)``; zero below the dry threshold."""
        _check_layers(self, part)
        wet = self.H > dry_threshold
        denom = np.where(wet, self.H, 1.0)[None, :] * part.column()
        return np.where(wet[None, :], self.q / denom, 0.0)

    def total_discharge(self) -> np.ndarray:
        """Column discharge ``sum_a q_a`` per cell."""
        return np.sum(self.q, axis=0)

    def mass(self, grid: Grid1D) -> float:
        """Total water volume per unit width, ``sum_i H_i dx_i``."""
        return float(np.sum(self.H * grid.dx))


def _check_layers(state, part):
    if state.n_layers != part.n_layers:
        raise ConfigurationError(
            f"state has {state.n_layers} layers, partition has {part.n_layers}"
        )


def layer_heights(state: SimState, part: LayerPartition) -> np.ndarray:
    """Per-layer heights ``h_a = l_a * H``, shape (N, I)."""
    _check_layers(state, part)
    return part.column() * state.H[None, :]


def interface_elevations(state: SimState, part: LayerPartition,
                         bathy: Bathymetry) -> np.ndarray:
    """Elevations of the N+1 layer interfaces, shape (N+1, I).

    Row 0 is the bed, row N the free surface; rows are non-decreasing.
    """
    _check_layers(state, part)
    if bathy.z.size != state.n_cells:
        raise ConfigurationError("bathymetry and state have different cell counts")
    h = layer_heights(state, part)
    z = np.empty((part.n_layers + 1, state.n_cells))
    z[0] = bathy.z
    np.cumsum(h, axis=0, out=z[1:])
    z[1:] += bathy.z[None, :]
    return z
