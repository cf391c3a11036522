"""Semi-implicit vertical viscosity, bottom friction and wind stress.

After the explicit hyperbolic step the layer discharges are relaxed by a
backward-Euler solve of the vertical momentum exchange terms.  The water
height is untouched, so each column yields an independent symmetric
tridiagonal N x N system ``T u = q_tilde`` with

    T(a,a)   = l_a H + (2 dt / H) (nu_a/(l_a+l_{a+1}) + nu_{a-1}/(l_a+l_{a-1}))
    T(a,a+1) = T(a+1,a) = -(2 dt / H) nu_a/(l_a+l_{a+1})

where the interface viscosity ``nu_a`` is zero at the bed and the free
surface and equals the fluid viscosity in between.  Bottom friction adds
``dt kappa`` to the first diagonal entry (evaluated with the pre-step
velocity and the new height), wind stress adds ``dt tau_w`` to the top
right-hand side.  The column sums of T reduce to ``l_a H`` plus friction,
which is why pure viscosity conserves column momentum exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .state import DEFAULT_DRY_THRESHOLD, FrictionLaw, LayerPartition, PhysParams


def friction_coefficient(u_bottom, H, phys: PhysParams):
    """Friction coefficient kappa (m/s) of the configured wall law."""
    u_bottom = np.asarray(u_bottom, dtype=float)
    H = np.asarray(H, dtype=float)
    if phys.friction is FrictionLaw.NONE:
        return np.zeros(np.broadcast(u_bottom, H).shape)
    if phys.friction is FrictionLaw.NAVIER:
        return np.full(np.broadcast(u_bottom, H).shape, phys.k_l)
    if phys.friction is FrictionLaw.NAVIER_TURBULENT:
        return phys.k_l + phys.k_t * H * np.abs(u_bottom)
    if phys.friction is FrictionLaw.STRICKLER:
        if np.any(H <= 0.0):
            raise ConfigurationError("strickler friction needs H > 0")
        return phys.gravity * np.abs(u_bottom) / (
            phys.strickler_k ** 2 * np.cbrt(H)
        )
    raise ConfigurationError(f"unknown friction law {phys.friction!r}")


@dataclass(frozen=True)
class ColumnSystem:
    """Per-column tridiagonal systems, vectorised over cells.

    ``diag`` has shape (N, I); ``off`` (N-1, I) holds the symmetric sub- and
    super-diagonal; ``rhs`` (N, I) is the explicit-step discharge plus wind.
    """

    diag: np.ndarray
    off: np.ndarray
    rhs: np.ndarray

    @property
    def sub(self) -> np.ndarray:
        return self.off

    @property
    def sup(self) -> np.ndarray:
        return self.off


def build_columns(H_new, q_tilde, part: LayerPartition, phys: PhysParams,
                  dt, u_bottom_old) -> ColumnSystem:
    """Assemble the implicit systems for columns with heights ``H_new``.

    Dry columns must be filtered by the caller; ``H_new > 0`` is assumed.
    """
    H_new = np.asarray(H_new, dtype=float)
    q_tilde = np.asarray(q_tilde, dtype=float)
    l = part.fractions
    n = part.n_layers
    diag = l[:, None] * H_new[None, :]
    off = np.zeros((max(n - 1, 0), H_new.size))
    if phys.viscosity > 0.0 and n > 1:
        couple = (2.0 * dt * phys.viscosity / H_new)[None, :] / (
            (l[:-1] + l[1:])[:, None]
        )
        off -= couple
        diag[:-1] += couple
        diag[1:] += couple
    kappa = friction_coefficient(u_bottom_old, H_new, phys)
    diag[0] += dt * kappa
    rhs = q_tilde.copy()
    rhs[-1] += dt * phys.wind_stress
    return ColumnSystem(diag=diag, off=off, rhs=rhs)


def solve_columns(sys: ColumnSystem) -> np.ndarray:
    """Thomas elimination of every column system; returns velocities (N, I).

    The matrices are strictly diagonally dominant (positive fractions,
    non-negative viscosity and friction), so no pivoting is needed.
    """
    n = sys.diag.shape[0]
    denom = sys.diag[0].copy()
    cp = np.empty_like(sys.off)
    dp = np.empty_like(sys.diag)
    dp[0] = sys.rhs[0] / denom
    for a in range(1, n):
        cp[a - 1] = sys.off[a - 1] / denom
        denom = sys.diag[a] - sys.off[a - 1] * cp[a - 1]
        dp[a] = (sys.rhs[a] - sys.off[a - 1] * dp[a - 1]) / denom
    u = np.empty_like(dp)
    u[n - 1] = dp[n - 1]
    for a in range(n - 2, -1, -1):
        u[a] = dp[a] - cp[a] * u[a + 1]
    return u


def implicit_update(H_new, q_tilde, part: LayerPartition, phys: PhysParams,
                    dt, u_bottom_old,
                    dry_threshold=DEFAULT_DRY_THRESHOLD):
    """Apply the viscous/friction/wind step; returns ``(q_new, u_new)``.

    Dry columns skip the solve and end with zero velocity and discharge.
    With no viscosity, friction or wind the discharges pass through
    unchanged (only the dry zeroing applies).
    """
    H_new = np.asarray(H_new, dtype=float)
    q_tilde = np.asarray(q_tilde, dtype=float)
    wet = H_new > dry_threshold
    trivial = (
        phys.viscosity == 0.0
        and phys.wind_stress == 0.0
        and (phys.friction is FrictionLaw.NONE
             or (phys.friction in (FrictionLaw.NAVIER, FrictionLaw.NAVIER_TURBULENT)
                 and phys.k_l == 0.0 and phys.k_t == 0.0))
    )
    lH = part.column() * np.where(wet, H_new, 1.0)[None, :]
    if trivial:
        q_new = np.where(wet[None, :], q_tilde, 0.0)
        u_new = np.where(wet[None, :], q_tilde / lH, 0.0)
        return q_new, u_new
    H_safe = np.where(wet, H_new, 1.0)
    u_b = np.where(wet, np.asarray(u_bottom_old, dtype=float), 0.0)
    sys = build_columns(H_safe, q_tilde, part, phys, dt, u_b)
    u_new = solve_columns(sys)
    u_new = np.where(wet[None, :], u_new, 0.0)
    q_new = np.where(wet[None, :], lH * u_new, 0.0)
    return q_new, u_new
