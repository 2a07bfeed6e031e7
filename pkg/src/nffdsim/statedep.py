"""State-dependent optical lattices and qubit transport.

Two counter-propagating beams with polarization angle 2*theta between them
decompose into circular components whose standing waves are displaced by the
angle:

    sigma+ ~ cos(k x - theta),    sigma- ~ -cos(k x + theta),

giving the component potentials V+-(x) = -V_L cos^2(k x -+ theta).  A qubit
state c in {0, 1} couples to a fixed convex-ish combination

    V_c(x) = w_plus_c V+(x) + w_minus_c V-(x),

so rotating theta drags the two qubit components in opposite directions: each
component moves half a lattice site per quarter turn of theta, which is the
basis of the collisional two-qubit gate.

The argmin of V_c has the closed form x_min = -arg(A)/(2k) + n pi/k with
A = w_plus e^{-2 i theta} + w_minus e^{2 i theta}; branch continuity is kept by
rounding n toward a hint (the previous position during transport).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchTrackingError, DegenerateLatticeError, GeometryError, SchedulingError
from .fields import K_LASER

_DEGENERACY_RTOL = 1e-12
_BRANCH_ATOL = 1e-9


@dataclass(frozen=True)
class WeightScheme:
    """Component weights (w_plus_c, w_minus_c) for qubit states c = 0, 1."""

    name: str
    w_plus_0: float
    w_minus_0: float
    w_plus_1: float
    w_minus_1: float

    def __post_init__(self):
        for w in (self.w_plus_0, self.w_minus_0, self.w_plus_1, self.w_minus_1):
            if w < 0:
                raise ValueError("weights must be non-negative")
        if self.w_plus_0 + self.w_minus_0 <= 0 or self.w_plus_1 + self.w_minus_1 <= 0:
            raise ValueError("each qubit state needs positive total weight")

    def weights_for(self, component: int) -> tuple[float, float]:
        if component == 0:
            return self.w_plus_0, self.w_minus_0
        if component == 1:
            return self.w_plus_1, self.w_minus_1
        raise ValueError("component must be 0 or 1")

    def displacement_direction(self, component: int) -> int:
        """Sign of d x_min / d theta for the component (0 if degenerate)."""
        w_plus, w_minus = self.weights_for(component)
        return int(np.sign(w_plus - w_minus))


# F=1/F=2 hyperfine qubit: |0> = 3/4 sigma+ + 1/4 sigma-, |1> = pure sigma-.
MANDEL = WeightScheme("MANDEL", 0.75, 0.25, 0.0, 1.0)
# Raman-coupled pair of Zeeman levels with mirrored 1/4 - 3/4 weights.
RAMAN_BASIS = WeightScheme("RAMAN_BASIS", 0.25, 0.75, 0.75, 0.25)

_SCHEMES = {s.name: s for s in (MANDEL, RAMAN_BASIS)}


def weight_scheme(name: str) -> WeightScheme:
    try:
        return _SCHEMES[name]
    except KeyError:
        raise ValueError(
            f"unknown weight scheme {name!r}; known: {sorted(_SCHEMES)}"
        ) from None


@dataclass(frozen=True)
class StateDepConfig:
    """Lattice depth V_L, wavenumber and the weight scheme in use."""

    depth: float = 1.0
    k_lat: float = K_LASER
    scheme: WeightScheme = RAMAN_BASIS

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        if self.k_lat <= 0:
            raise ValueError("k_lat must be positive")

    @property
    def period(self) -> float:
        return math.pi / self.k_lat


@dataclass
class ThetaRamp:
    """Sampled polarization-angle schedule theta(t).

    Times strictly increase and consecutive samples stay within a quarter
    turn so minimum tracking cannot skip a branch.
    """

    t: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        if self.t.ndim != 1 or self.t.shape != self.theta.shape or self.t.size == 0:
            raise ValueError("t and theta must be equal-length 1-d arrays")
        if self.t.size >= 2:
            if not np.all(np.diff(self.t) > 0):
                raise ValueError("ramp times must be strictly increasing")
            if np.any(np.abs(np.diff(self.theta)) >= math.pi / 2):
                raise ValueError("theta steps must stay below a quarter turn")

    @classmethod
    def linear(cls, theta_start: float, theta_stop: float, duration: float, n: int) -> "ThetaRamp":
        if duration <= 0 or n < 2:
            raise ValueError("need positive duration and at least two samples")
        return cls(np.linspace(0.0, duration, n), np.linspace(theta_start, theta_stop, n))

    def reversed(self) -> "ThetaRamp":
        """Time-reversed ramp, continuing where this one ended."""
        t_end = self.t[-1]
        return ThetaRamp(t_end + (t_end - self.t[::-1]), self.theta[::-1].copy())


# ---------------------------------------------------------------------------
# potentials


def sigma_components(x: float, theta: float, k: float = K_LASER) -> tuple[float, float]:
    """Standing-wave factors of the two circular polarization components."""
    return math.cos(k * x - theta), -math.cos(k * x + theta)


def v_plus_minus(x, theta: float, cfg: StateDepConfig):
    """Component potentials (V+, V-) = -depth cos^2(k x -+ theta)."""
    x = np.asarray(x, dtype=float)
    v_plus = -cfg.depth * np.cos(cfg.k_lat * x - theta) ** 2
    v_minus = -cfg.depth * np.cos(cfg.k_lat * x + theta) ** 2
    return v_plus, v_minus


def qubit_potential(x, theta: float, cfg: StateDepConfig):
    """Potentials (V_0, V_1) seen by the two qubit states."""
    v_plus, v_minus = v_plus_minus(x, theta, cfg)
    s = cfg.scheme
    v0 = s.w_plus_0 * v_plus + s.w_minus_0 * v_minus
    v1 = s.w_plus_1 * v_plus + s.w_minus_1 * v_minus
    return v0, v1


# ---------------------------------------------------------------------------
# minima and transport


def component_minimum(
    theta: float,
    w_plus: float,
    w_minus: float,
    k: float = K_LASER,
    branch_hint: float = 0.0,
) -> float:
    """Closed-form argmin of w+ V+ + w- V- on the branch nearest branch_hint.

    Minimizing -[w+ cos^2(kx - theta) + w- cos^2(kx + theta)] is maximizing
    Re[A e^{2ikx}] with A = w+ e^{-2i theta} + w- e^{2i theta}, so
    x_min = -arg(A)/(2k) (mod pi/k).  |A| = 0 means every x is a minimum.
    """
    if w_plus < 0 or w_minus < 0 or w_plus + w_minus <= 0:
        raise ValueError("weights must be non-negative with positive sum")
    if k <= 0:
        raise ValueError("k must be positive")
    amp = w_plus * np.exp(-2j * theta) + w_minus * np.exp(2j * theta)
    if abs(amp) < _DEGENERACY_RTOL * (w_plus + w_minus):
        raise DegenerateLatticeError(
            f"component potential flat at theta={theta}: equal weights at an "
            "odd multiple of pi/4 leave no isolated minimum"
        )
    base = -np.angle(amp) / (2.0 * k)
    n = round((branch_hint - base) * k / math.pi)
    return base + n * math.pi / k


def transport_trajectory(
    ramp: ThetaRamp,
    w_plus: float,
    w_minus: float,
    k: float = K_LASER,
    x_start: float = 0.0,
) -> list[tuple[float, float]]:
    """Track the component minimum through a ramp, branch-continuously.

    Returns the ordered (t, x_min) samples.  Raises BranchTrackingError if two
    consecutive minima are separated by half a site (pi/(2k)) or more, which
    means the sampling is too coarse to identify the branch.
    """
    x0 = component_minimum(ramp.theta[0], w_plus, w_minus, k, branch_hint=x_start)
    if abs(x0 - x_start) > _BRANCH_ATOL:
        raise ValueError(
            f"x_start={x_start} is not a lattice minimum at theta={ramp.theta[0]}"
        )
    out = [(float(ramp.t[0]), x0)]
    x_prev = x0
    # a step of half a site (pi/2k) is equidistant from two branch copies;
    # within rounding of that the branch choice is meaningless
    jump_limit = math.pi / (2.0 * k) * (1.0 - 1e-12)
    for t_i, th_i in zip(ramp.t[1:], ramp.theta[1:]):
        x_i = component_minimum(th_i, w_plus, w_minus, k, branch_hint=x_prev)
        if abs(x_i - x_prev) >= jump_limit:
            raise BranchTrackingError(
                f"minimum jumped {abs(x_i - x_prev):.4g} at t={t_i:.4g}; ramp too coarse"
            )
        out.append((float(t_i), x_i))
        x_prev = x_i
    return out


def mirrored(ramp: ThetaRamp) -> ThetaRamp:
    """Forward ramp followed by its exact reverse (shared peak sample)."""
    rev = ramp.reversed()
    return ThetaRamp(
        np.concatenate([ramp.t, rev.t[1:]]),
        np.concatenate([ramp.theta, rev.theta[1:]]),
    )


def displacement_ramp(
    displacement: float,
    w_plus: float,
    w_minus: float,
    k: float = K_LASER,
    samples_per_quarter_turn: int = 64,
) -> ThetaRamp:
    """Linear theta ramp from 0 that moves the given component by displacement.

    Each quarter turn of theta moves the component half a site, pi/(2k), so
    the displacement must be a signed integer multiple of pi/(2k) and the
    total angle is theta = k * displacement * sign(w_plus - w_minus).
    """
    if samples_per_quarter_turn < 2:
        raise ValueError("need at least 2 samples per quarter turn")
    direction = np.sign(w_plus - w_minus)
    if direction == 0:
        raise SchedulingError(
            "balanced weights give a stationary minimum; component cannot be moved"
        )
    half_period = math.pi / (2.0 * k)
    m = displacement / half_period
    if abs(m - round(m)) > 1e-9:
        raise GeometryError(
            f"displacement {displacement} is not an integer multiple of half "
            f"the lattice period ({half_period})"
        )
    theta_total = k * displacement * direction
    quarter_turns = abs(theta_total) / (math.pi / 2.0)
    n = int(round(samples_per_quarter_turn * quarter_turns)) + 1
    # duration in units of one quarter turn per unit time
    return ThetaRamp.linear(0.0, theta_total, max(quarter_turns, 1e-12), max(n, 2))


def collision_schedule(
    site_i: int,
    site_j: int,
    pitch: float,
    cfg: StateDepConfig,
    samples_per_quarter_turn: int = 64,
) -> ThetaRamp:
    """Ramp bringing |0> of site i and |1> of site j together and back.

    Sites sit at x = site * pitch on a common lattice line; the pitch must be
    an integer multiple of the lattice period pi/k.  The forward ramp steers
    both components to the midpoint (where the collision phase accumulates)
    and the return leg is the exact mirror.  The meeting point and the return
    to the start are verified by minimum tracking before the ramp is returned.
    """
    if site_i == site_j:
        raise ValueError("need two distinct sites")
    k = cfg.k_lat
    period = math.pi / k
    m = pitch / period
    if pitch <= 0 or abs(m - round(m)) > 1e-9:
        raise GeometryError(
            f"pitch {pitch} must be a positive integer multiple of the lattice "
            f"period {period}"
        )
    s0 = cfg.scheme.displacement_direction(0)
    s1 = cfg.scheme.displacement_direction(1)
    if s0 == 0 or s1 == 0 or s0 == s1:
        raise SchedulingError(
            f"scheme {cfg.scheme.name} cannot run a collision: the two qubit "
            "components must move in opposite directions"
        )

    x_i = site_i * pitch
    x_j = site_j * pitch
    midpoint = 0.5 * (x_i + x_j)
    forward = displacement_ramp(
        midpoint - x_i, *cfg.scheme.weights_for(0), k=k,
        samples_per_quarter_turn=samples_per_quarter_turn,
    )
    ramp = mirrored(forward)

    peak = forward.t.size - 1
    traj0 = transport_trajectory(ramp, *cfg.scheme.weights_for(0), k=k, x_start=x_i)
    traj1 = transport_trajectory(ramp, *cfg.scheme.weights_for(1), k=k, x_start=x_j)
    if abs(traj0[peak][1] - midpoint) > 1e-6 or abs(traj1[peak][1] - midpoint) > 1e-6:
        raise SchedulingError("components failed to meet at the midpoint")
    if abs(traj0[-1][1] - x_i) > 1e-9 or abs(traj1[-1][1] - x_j) > 1e-9:
        raise SchedulingError("components failed to return to their sites")
    return ramp
