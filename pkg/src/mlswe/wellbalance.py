"""Hydrostatic reconstruction of interface heights and the topographic source.

The reconstruction replaces the two heights meeting at an interface by

    z*    = max(z_l, z_r)
    H_l*  = max(0, eta_l - z*),   H_r* = max(0, eta_r - z*)

with ``eta = H + z_b`` the free surface.  The clipping at zero is required
when the surface sits below the neighbouring bed; without it the squared
heights in the source would see negative values.  The reconstructed heights
feed both the interface flux and the momentum source, which is what makes
lake-at-rest states stationary.
"""

from __future__ import annotations

import numpy as np

from .kinetic import rest_pressure_flux
from .state import Bathymetry, LayerPartition, SimState


def reconstruct_interface_heights(H_left, H_right, zb_left, zb_right):
    """Hydrostatic heights ``(H_l*, H_r*)`` on the two sides of an interface.

    Accepts scalars or arrays; never exceeds the input heights.
    """
    H_left = np.asarray(H_left, dtype=float)
    H_right = np.asarray(H_right, dtype=float)
    z_star = np.maximum(zb_left, zb_right)
    h_minus = np.maximum(0.0, H_left + zb_left - z_star)
    h_plus = np.maximum(0.0, H_right + zb_right - z_star)
    return h_minus, h_plus


def reconstruct_from_surface(eta_left, eta_right, zb_left, zb_right):
    """Same reconstruction, parametrised by the surface elevations.

    Used by the stepper: when the two surfaces carry the identical float the
    two reconstructed heights are bitwise equal, which keeps lake-at-rest
    preservation exact.
    """
    z_star = np.maximum(zb_left, zb_right)
    h_minus = np.maximum(0.0, eta_left - z_star)
    h_plus = np.maximum(0.0, eta_right - z_star)
    return h_minus, h_plus


def topo_source(state: SimState, bathy: Bathymetry, part: LayerPartition,
                gravity) -> np.ndarray:
    """First-order topographic momentum source per cell and layer, (N, I).

    ``Sb_a,i = l_a ((g/2) H*_{i+1/2-}^2 - (g/2) H*_{i-1/2+}^2)`` in flux-
    difference form (units m^3/s^2); the mass component is identically zero
    and therefore not represented.  Boundary interfaces use zero-gradient
    ghost values, so the first and last cells see a locally flat bed.
    """
    H = np.concatenate(([state.H[0]], state.H, [state.H[-1]]))
    zb = np.concatenate(([bathy.z[0]], bathy.z, [bathy.z[-1]]))
    eta = H + zb
    h_minus, h_plus = reconstruct_from_surface(eta[:-1], eta[1:], zb[:-1], zb[1:])
    pf_minus = rest_pressure_flux(h_minus, part, gravity)
    pf_plus = rest_pressure_flux(h_plus, part, gravity)
    return pf_minus[:, 1:] - pf_plus[:, :-1]
