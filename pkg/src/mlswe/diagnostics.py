"""Observable quantities: discrete energy, reconstructed vertical velocity,
and the hyperbolicity analysis of the quasilinear system."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError, NumericalError
from .state import (
    DEFAULT_DRY_THRESHOLD,
    Bathymetry,
    Grid1D,
    LayerPartition,
    SimState,
    layer_heights,
)


@dataclass(frozen=True)
class EnergyReport:
    """Discrete mechanical energy ``E_a = h_a u_a^2/2 + g h_a (eta+z_b)/2``.

    ``per_layer`` is the energy density per cell and layer (m^3/s^2 per
    unit width); ``total`` is the cell-width weighted sum.
    """

    per_layer: np.ndarray
    total: float
    t: float

    def rate_from(self, previous: "EnergyReport") -> float:
        """Mean dE/dt since ``previous``; 0 for coincident times."""
        dt = self.t - previous.t
        if dt == 0.0:
            return 0.0
        return (self.total - previous.total) / dt


def total_energy(state: SimState, bathy: Bathymetry, part: LayerPartition,
                 gravity, grid: Optional[Grid1D] = None) -> EnergyReport:
    """Energy report of a state; unit cell widths when no grid is given."""
    h = layer_heights(state, part)
    u = state.velocities(part)
    eta = state.H + bathy.z
    per_layer = 0.5 * h * u * u + 0.5 * gravity * h * (eta + bathy.z)[None, :]
    widths = grid.dx if grid is not None else np.ones(state.n_cells)
    total = float(np.sum(np.sum(per_layer, axis=0) * widths))
    return EnergyReport(per_layer=per_layer, total=total, t=state.t)


def vertical_velocity(state: SimState, bathy: Bathymetry, grid: Grid1D,
                      part: LayerPartition,
                      dry_threshold=DEFAULT_DRY_THRESHOLD) -> np.ndarray:
    """Vertical velocity at the layer midpoints, shape (N, I).

    Postprocessing only: integrates the divergence-free condition upward
    from the bed, where the non-penetration condition gives
    ``w(z_b) = u_1 dz_b/dx`` (static bed).  Horizontal derivatives are
    central inside the domain and one-sided at the ends.
    """

    def ddx(f):
        f = np.atleast_2d(f)
        out = np.empty_like(f)
        if f.shape[1] == 1:
            out[:] = 0.0
            return out
        out[:, 1:-1] = (f[:, 2:] - f[:, :-2]) / (grid.x[2:] - grid.x[:-2])
        out[:, 0] = (f[:, 1] - f[:, 0]) / (grid.x[1] - grid.x[0])
        out[:, -1] = (f[:, -1] - f[:, -2]) / (grid.x[-1] - grid.x[-2])
        return out

    u = state.velocities(part, dry_threshold)
    w_bed = u[0] * ddx(bathy.z)[0]
    # q_a already equals h_a u_a; cumulative sums give the flux below each
    # layer interface.
    flux_below = np.cumsum(state.q, axis=0)
    w_iface = w_bed[None, :] - ddx(flux_below)
    w_mid = np.empty_like(u)
    w_mid[0] = 0.5 * (w_bed + w_iface[0])
    if part.n_layers > 1:
        w_mid[1:] = 0.5 * (w_iface[:-1] + w_iface[1:])
    return w_mid


@dataclass(frozen=True)
class CharPoly:
    """Cubic ``D(x) = det(A - xM)`` of the two-layer system."""

    coefficients: np.ndarray  # (c3, c2, c1, c0), highest degree first
    roots: np.ndarray         # three real roots, ascending

    def evaluate(self, x):
        c3, c2, c1, c0 = self.coefficients
        x = np.asarray(x, dtype=float)
        return ((c3 * x + c2) * x + c1) * x + c0


def _two_layer_coefficients(H, u1, u2, l, u_int, g):
    a1 = 2.0 * u1 - u_int
    a2 = 2.0 * u2 - u_int
    c3 = -1.0
    c2 = a1 + a2 + u_int
    c1 = (-a1 * a2
          - l * (a2 * u_int - g * H + u1 * u1)
          - (1.0 - l) * (a1 * u_int - g * H + u2 * u2))
    c0 = (-l * a2 * (g * H - u1 * u1)
          - (1.0 - l) * a1 * (g * H - u2 * u2))
    return np.array([c3, c2, c1, c0])


def _bisect_root(f, lo, hi, iters=80):
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo > 0.0) == (fmid > 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _polish_newton(f, df, x, iters=3):
    for _ in range(iters):
        d = df(x)
        if d == 0.0:
            break
        step = f(x) / d
        if not np.isfinite(step):
            break
        x -= step
    return x


def two_layer_charpoly(H, u1, u2, l, u_interface, g) -> CharPoly:
    """Characteristic cubic of the two-layer system and its three real roots.

    Root isolation follows the hyperbolicity proof: the polynomial is
    positive at -inf, negative at +inf, and changes sign across evaluation
    points built from the velocities (``u_int``, ``u_i +- 2 l gamma^2``).
    The roots are bisected and Newton-polished.
    """
    if H <= 0.0:
        raise ConfigurationError("two_layer_charpoly needs H > 0")
    if not 0.0 < l < 1.0:
        raise ConfigurationError("layer fraction must satisfy 0 < l < 1")
    coeffs = _two_layer_coefficients(H, u1, u2, l, u_interface, g)
    c3, c2, c1, c0 = coeffs

    def f(x):
        return ((c3 * x + c2) * x + c1) * x + c0

    def df(x):
        return (3.0 * c3 * x + 2.0 * c2) * x + c1

    a = np.sqrt(g * H)
    if u1 == u2:
        roots = np.sort([u1 - a, u1, u1 + a])
        roots = np.array([_polish_newton(f, df, r) for r in roots])
        return CharPoly(coefficients=coeffs, roots=roots)

    gamma2 = abs(u2 - u1)
    candidates = np.unique([
        u1, u2, u_interface,
        u1 + 2.0 * l * gamma2, u1 - 2.0 * l * gamma2,
        u2 + 2.0 * (1.0 - l) * gamma2, u2 - 2.0 * (1.0 - l) * gamma2,
    ])
    values = f(candidates)
    p_neg = p_pos = None
    for x, v in zip(candidates, values):
        if v < 0.0 and p_neg is None:
            p_neg = x
        elif v > 0.0 and p_neg is not None:
            p_pos = x
            break
    if p_pos is None:
        # a candidate may sit exactly on a root; deflate through it
        on_root = candidates[values == 0.0]
        if on_root.size:
            r = float(on_root[0])
            b2 = c3
            b1 = c2 + b2 * r
            b0 = c1 + b1 * r
            disc = b1 * b1 - 4.0 * b2 * b0
            if disc >= 0.0:
                sq = np.sqrt(disc)
                roots = np.sort([r, (-b1 + sq) / (2.0 * b2),
                                 (-b1 - sq) / (2.0 * b2)])
                return CharPoly(coefficients=coeffs, roots=np.asarray(roots))
        raise NumericalError(
            "two-layer characteristic polynomial: sign brackets not found")

    span = max(1.0, gamma2 + a + abs(u1) + abs(u2))
    lo = p_neg - span
    while f(lo) <= 0.0:
        span *= 2.0
        lo = p_neg - span
    span = max(1.0, gamma2 + a + abs(u1) + abs(u2))
    hi = p_pos + span
    while f(hi) >= 0.0:
        span *= 2.0
        hi = p_pos + span

    r1 = _bisect_root(f, lo, p_neg)
    r2 = _bisect_root(f, p_neg, p_pos)
    r3 = _bisect_root(f, p_pos, hi)
    roots = np.array([_polish_newton(f, df, r) for r in (r1, r2, r3)])
    return CharPoly(coefficients=coeffs, roots=np.sort(roots))


@dataclass(frozen=True)
class HyperbolicityReport:
    """Eigenstructure of the frozen quasilinear system of one column."""

    eigenvalues: np.ndarray       # (N+1,) complex, sorted by real part
    max_imag: float
    spectral_radius: float
    real_and_distinct: bool
    charpoly: Optional[CharPoly]  # filled for two-layer columns

    @property
    def real_parts(self):
        return self.eigenvalues.real

    @property
    def imag_parts(self):
        return self.eigenvalues.imag


def quasilinear_matrices(H, u, u_iface, part: LayerPartition, g):
    """The (N+1)x(N+1) matrices (A, M) of the frozen quasilinear form."""
    u = np.asarray(u, dtype=float)
    u_iface = np.asarray(u_iface, dtype=float)
    n = part.n_layers
    if u.shape != (n,) or u_iface.shape != (max(n - 1, 0),):
        raise ConfigurationError("velocity arrays do not match the partition")
    l = part.fractions
    A = np.zeros((n + 1, n + 1))
    M = np.eye(n + 1)
    A[0, 1:] = l
    for a in range(n):
        r = a + 1
        A[r, 0] = g * H - u[a] * u[a]
        A[r, r] = 2.0 * u[a]
        if a >= 1:
            A[r, 1:r] = u_iface[a - 1] * l[: a] / l[a]
        if a <= n - 2:
            A[r, r + 1:] = u_iface[a] * l[a + 1:] / l[a]
        v = 0.0
        if a >= 1:
            v += u_iface[a - 1] * np.sum(l[: a]) / l[a]
        if a <= n - 2:
            v += u_iface[a] * np.sum(l[a + 1:]) / l[a]
        M[r, 0] = v
    return A, M


def nlayer_eigen(H, u, u_iface, part: LayerPartition, g,
                 tol=1e-9) -> HyperbolicityReport:
    """Numerical eigenvalues of ``M^-1 A`` for one column.

    ``M`` is unit lower triangular, so the generalized problem reduces to a
    plain eigensolve.  ``real_and_distinct`` holds when all imaginary parts
    and all pairwise gaps clear ``tol`` times the spectral scale.
    """
    if H <= 0.0:
        raise ConfigurationError("nlayer_eigen needs H > 0")
    A, M = quasilinear_matrices(H, u, u_iface, part, g)
    ev = np.linalg.eigvals(np.linalg.solve(M, A))
    ev = ev[np.argsort(ev.real)]
    radius = float(np.max(np.abs(ev))) if ev.size else 0.0
    scale = max(radius, 1.0)
    max_imag = float(np.max(np.abs(ev.imag)))
    gaps = np.diff(ev.real)
    distinct = bool(np.all(gaps > tol * scale)) if gaps.size else True
    charpoly = None
    if part.n_layers == 2:
        charpoly = two_layer_charpoly(H, float(u[0]), float(u[1]),
                                      float(part.fractions[0]),
                                      float(u_iface[0]), g)
    return HyperbolicityReport(
        eigenvalues=ev,
        max_imag=max_imag,
        spectral_radius=radius,
        real_and_distinct=bool(max_imag <= tol * scale) and distinct,
        charpoly=charpoly,
    )
