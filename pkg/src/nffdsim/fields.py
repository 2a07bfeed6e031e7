"""Near-field Fresnel diffraction trap potentials.

A plane wave of amplitude E0 illuminates a circular aperture of radius a in a
conducting screen.  Behind the screen (z > 0) the scalar field is the
Rayleigh-Sommerfeld integral over the aperture disk

    E(p)/E0 = (1/2pi) int_{x'^2+y'^2 <= a^2}
              (e^{ikr}/r) (z/r) (1/r - ik) dx' dy',   r = |p - (x',y',0)|,

and a red-detuned two-level atom sees the attractive optical potential

    U(p) = -U0 |E(p)/E0|^2,    U0 = (3/8) (Gamma_e/|Delta_eg|) E0^2 / k^3.

On the optical axis the integral collapses to the closed form
e^{ikz} - (z/R) e^{ikR} with R = sqrt(z^2 + a^2); the interference of the two
terms produces a chain of axial intensity maxima (trap minima of U) whose
position scales like a^2/lambda.  Everything here works in units lambda = 1,
k = 2pi, hbar = 1.

Quadrature: Gauss-Legendre in radius times a uniform azimuthal grid
(spectrally accurate for the periodic angle integral), node counts doubled
jointly until the relative change between levels drops below tolerance, with a
hard budget of 2^20 nodes per evaluation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import QuadratureError, TrapMinimumNotFoundError

LAMBDA = 1.0
K_LASER = 2.0 * math.pi / LAMBDA

_QUAD_LEVELS = (8, 16, 32, 64, 128, 256, 512, 1024)
_NODE_BUDGET = 2**20
_REL_FLOOR = 1e-12  # relative change measured against max(|value|, floor)
_CHUNK_ELEMENTS = 2**21  # cap on points*nodes per integrand block


# ---------------------------------------------------------------------------
# parameter bundles


@dataclass(frozen=True)
class ApertureSpec:
    """Circular aperture, radius in units of the laser wavelength."""

    radius: float
    wavelength: float = LAMBDA

    def __post_init__(self):
        if not self.radius >= 1.0:
            raise ValueError(
                f"aperture radius must be >= 1 wavelength, got {self.radius}"
            )
        if self.wavelength != LAMBDA:
            raise ValueError("wavelength is fixed to 1 by the unit convention")

    @property
    def k(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def fresnel_number(self) -> float:
        return self.radius / self.wavelength


@dataclass(frozen=True)
class TrapLaserParams:
    """Trap laser drive: amplitude, linewidth and (red) detuning.

    u0 is the potential scale (3/8)(Gamma_e/|Delta_eg|) E0^2/k^3; the detuning
    must be negative so the potential is attractive.
    """

    e0: float
    gamma_e: float
    detuning: float

    def __post_init__(self):
        if self.gamma_e <= 0:
            raise ValueError("gamma_e must be positive")
        if not self.detuning < 0:
            raise ValueError(
                f"red detuning required (detuning < 0), got {self.detuning}"
            )
        if self.e0 == 0:
            raise ValueError("e0 must be nonzero")

    @property
    def u0(self) -> float:
        return 0.375 * (self.gamma_e / abs(self.detuning)) * self.e0**2 / K_LASER**3


@dataclass
class AxialProfile:
    """On-axis potential samples u(z) in units of U0 (u <= 0)."""

    z: np.ndarray
    u: np.ndarray
    aperture: ApertureSpec

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if self.z.shape != self.u.shape or self.z.ndim != 1:
            raise ValueError("z and u must be 1-d arrays of equal length")
        if self.z.size >= 2 and not np.all(np.diff(self.z) > 0):
            raise ValueError("z samples must be strictly increasing")
        if np.any(self.u > 1e-12):
            raise ValueError("profile values must be non-positive (units of U0)")

    @property
    def samples(self) -> Iterable[tuple[float, float]]:
        return zip(self.z.tolist(), self.u.tolist())


@dataclass
class PotentialMap:
    """Potential on an (r, z) grid; values in energy units, u0 recorded."""

    r: np.ndarray
    z: np.ndarray
    values: np.ndarray  # shape (len(r), len(z))
    u0: float

    @property
    def values_over_u0(self) -> np.ndarray:
        return self.values / self.u0


@dataclass(frozen=True)
class LatticeConfig:
    """Separability-based optical lattice: depth per active axis."""

    depths: tuple[float, ...]
    k_lat: float
    axes: tuple[str, ...] = ("x",)

    def __post_init__(self):
        if self.k_lat <= 0:
            raise ValueError("k_lat must be positive")
        if len(self.depths) != len(self.axes):
            raise ValueError("one depth per active axis")
        if any(d < 0 for d in self.depths):
            raise ValueError("lattice depths must be non-negative")
        if any(ax not in ("x", "y", "z") for ax in self.axes):
            raise ValueError("axes must be a subset of x, y, z")
        if len(set(self.axes)) != len(self.axes):
            raise ValueError("duplicate axis")

    @property
    def period(self) -> float:
        return math.pi / self.k_lat


class TrapMinimum(NamedTuple):
    z_min: float
    depth: float  # u(z_min) in units of U0, negative


# ---------------------------------------------------------------------------
# quadrature engine


@lru_cache(maxsize=None)
def _radial_rule(n_r: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(n_r)
    return tuple(x.tolist()), tuple(w.tolist())


def _level_values(points: np.ndarray, aperture: ApertureSpec, n_r: int, n_phi: int) -> np.ndarray:
    """Evaluate the aperture integral for all points at one quadrature level."""
    a = aperture.radius
    k = aperture.k
    gx, gw = _radial_rule(n_r)
    rho = 0.5 * a * (np.asarray(gx) + 1.0)
    w_rho = 0.5 * a * np.asarray(gw) * rho  # includes the polar Jacobian
    phi = (2.0 * math.pi / n_phi) * np.arange(n_phi)
    w_phi = 2.0 * math.pi / n_phi

    xs = rho[:, None] * np.cos(phi)[None, :]
    ys = rho[:, None] * np.sin(phi)[None, :]

    out = np.empty(len(points), dtype=complex)
    block = max(1, _CHUNK_ELEMENTS // (n_r * n_phi))
    for lo in range(0, len(points), block):
        p = points[lo : lo + block]
        dx = p[:, 0, None, None] - xs[None, :, :]
        dy = p[:, 1, None, None] - ys[None, :, :]
        z = p[:, 2, None, None]
        r = np.sqrt(dx * dx + dy * dy + z * z)
        integrand = np.exp(1j * k * r) / r * (z / r) * (1.0 / r - 1j * k)
        out[lo : lo + block] = (integrand * w_rho[None, :, None]).sum(axis=(1, 2)) * w_phi
    return out / (2.0 * math.pi)


def rs_amplitude_many(
    points: Sequence[Sequence[float]] | np.ndarray,
    aperture: ApertureSpec,
    tol: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """Diffracted field E/E0 at many points, with per-point error estimates.

    Returns (amplitudes, estimates) where estimates are the relative change of
    the final node-doubling step.  Raises QuadratureError if any point fails to
    converge within the node budget.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must have shape (n, 3)")
    if np.any(pts[:, 2] <= 0):
        raise ValueError("all evaluation points must have z > 0")
    if tol <= 0:
        raise ValueError("tol must be positive")

    prev = None
    errs = np.full(len(pts), np.inf)
    for n in _QUAD_LEVELS:
        if n * n > _NODE_BUDGET:
            break
        cur = _level_values(pts, aperture, n, n)
        if prev is not None:
            scale = np.maximum(np.abs(cur), _REL_FLOOR)
            errs = np.abs(cur - prev) / scale
            if np.all(errs <= tol):
                return cur, errs
        prev = cur
    worst = float(np.max(errs))
    raise QuadratureError(
        f"quadrature did not converge: worst relative change {worst:.3e} > tol {tol:.3e}",
        estimate=worst,
        value=None,
    )


def rs_amplitude(
    point: Sequence[float], aperture: ApertureSpec, tol: float = 1e-8
) -> complex:
    """Diffracted field E/E0 at a single point (x, y, z), z > 0."""
    amps, _ = rs_amplitude_many([point], aperture, tol=tol)
    return complex(amps[0])


# ---------------------------------------------------------------------------
# potentials


def nffd_potential(
    point: Sequence[float],
    aperture: ApertureSpec,
    laser: TrapLaserParams,
    tol: float = 1e-8,
) -> float:
    """Optical potential -U0 |E/E0|^2 at a point behind the aperture."""
    amp = rs_amplitude(point, aperture, tol=tol)
    return -laser.u0 * abs(amp) ** 2


def axial_profile(
    aperture: ApertureSpec,
    z_lo: float,
    z_hi: float,
    n: int,
    tol: float = 1e-8,
) -> AxialProfile:
    """Sample the on-axis potential u(z)/U0 on n points of [z_lo, z_hi]."""
    if not 0 < z_lo < z_hi:
        raise ValueError("need 0 < z_lo < z_hi")
    if n < 2:
        raise ValueError("need at least two samples")
    z = np.linspace(z_lo, z_hi, n)
    pts = np.column_stack([np.zeros(n), np.zeros(n), z])
    amps, _ = rs_amplitude_many(pts, aperture, tol=tol)
    return AxialProfile(z=z, u=-np.abs(amps) ** 2, aperture=aperture)


def potential_map(
    aperture: ApertureSpec,
    laser: TrapLaserParams,
    r_values: Sequence[float] | np.ndarray,
    z_values: Sequence[float] | np.ndarray,
    tol: float = 1e-8,
) -> PotentialMap:
    """Potential on the (r, z) product grid, row-major over r then z."""
    r = np.asarray(r_values, dtype=float)
    z = np.asarray(z_values, dtype=float)
    if r.ndim != 1 or z.ndim != 1 or r.size == 0 or z.size == 0:
        raise ValueError("r_values and z_values must be non-empty 1-d")
    if np.any(z <= 0):
        raise ValueError("all z grid values must be > 0")
    rr, zz = np.meshgrid(r, z, indexing="ij")
    pts = np.column_stack([rr.ravel(), np.zeros(rr.size), zz.ravel()])
    amps, _ = rs_amplitude_many(pts, aperture, tol=tol)
    values = (-laser.u0 * np.abs(amps) ** 2).reshape(r.size, z.size)
    return PotentialMap(r=r, z=z, values=values, u0=laser.u0)


# ---------------------------------------------------------------------------
# trap minimum search


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_minimize(f, a: float, b: float, x_tol: float) -> float:
    """Golden-section refinement of a bracketed minimum to width x_tol."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > x_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def locate_trap_minimum(
    aperture: ApertureSpec,
    z_window: tuple[float, float] = (0.1, 12.0),
    coarse_n: int = 600,
    z_tol: float = 1e-4,
    tol: float = 1e-8,
) -> TrapMinimum:
    """Locate the deepest on-axis trap: coarse scan, then golden-section.

    Scans u(z) = -|E/E0|^2 on coarse_n points of z_window, picks the deepest
    interior local minimum (the axial profile can have several), and refines
    its bracket by golden section until the z uncertainty is below z_tol.
    """
    z_lo, z_hi = z_window
    if not 0 < z_lo < z_hi:
        raise ValueError("invalid z window")
    if coarse_n < 8:
        raise ValueError("coarse_n too small")
    z = np.linspace(z_lo, z_hi, coarse_n)
    pts = np.column_stack([np.zeros(coarse_n), np.zeros(coarse_n), z])
    amps, _ = rs_amplitude_many(pts, aperture, tol=tol)
    u = -np.abs(amps) ** 2

    interior = np.where((u[1:-1] < u[:-2]) & (u[1:-1] < u[2:]))[0] + 1
    if interior.size == 0:
        raise TrapMinimumNotFoundError(
            f"no interior axial minimum in [{z_lo}, {z_hi}] for a={aperture.radius}"
        )
    i = interior[np.argmin(u[interior])]

    def u_of_z(zz: float) -> float:
        return -abs(rs_amplitude((0.0, 0.0, zz), aperture, tol=tol)) ** 2

    z_min = _golden_minimize(u_of_z, z[i - 1], z[i + 1], z_tol)
    return TrapMinimum(z_min=z_min, depth=u_of_z(z_min))


# ---------------------------------------------------------------------------
# auxiliary optical potentials


def stark_shift(omega: complex, delta: float) -> float:
    """Second-order AC Stark shift |Omega|^2 / (4 Delta) of the ground level."""
    if delta == 0:
        raise ValueError("stark shift undefined at zero detuning")
    return abs(omega) ** 2 / (4.0 * delta)


def lattice_potential(point: Sequence[float], cfg: LatticeConfig) -> float:
    """Separable standing-wave potential sum_i V0_i cos^2(k_lat x_i)."""
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError("point must be a 3-vector")
    axis_index = {"x": 0, "y": 1, "z": 2}
    total = 0.0
    for depth, ax in zip(cfg.depths, cfg.axes):
        total += depth * math.cos(cfg.k_lat * p[axis_index[ax]]) ** 2
    return total
