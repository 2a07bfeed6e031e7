"""Trap-array machine: geometry validation, the six-step gate protocol,
register evolution and parallel scheduling.

A gate between two trapped atoms runs as

    1. optional Hadamards on both qubits
    2. diffraction traps at the two sites switched off
    3. screen withdrawn (atoms handed to the optical lattice)
    4. polarization ramp: state-dependent transport to the collision point,
       hold for the interaction phase
    5. reverse ramp (exact mirror of step 4)
    6. screen re-engaged, traps back on

Each execution emits a ProtocolTrace recording the six steps in order.
Geometry decides how the collision point is reached: along a shared lattice
line, via two orthogonal lattices meeting at (x_j, y_i), or along the arms of
a radial array meeting at the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, NamedTuple, Sequence

import numpy as np

from .errors import ConfigError, GeometryError, ProtocolError, SchedulingError
from .fields import ApertureSpec
from .gates import CollisionParams, TwoLevelUnitary, collision_phase_gate, hadamard
from .statedep import (
    StateDepConfig,
    ThetaRamp,
    collision_schedule,
    displacement_ramp,
    mirrored,
    transport_trajectory,
    weight_scheme,
)

_COORD_ATOL = 1e-9
MAX_QUBITS = 20


class LatticeRequirement(str, Enum):
    SINGLE_AXIS = "SINGLE_AXIS"
    TWO_ORTHOGONAL = "TWO_ORTHOGONAL"
    RADIAL_CENTER = "RADIAL_CENTER"


# ---------------------------------------------------------------------------
# trap array


@dataclass
class TrapArray:
    """Sites, their diffraction traps, and the shared transport lattice."""

    kind: str  # "square" | "radial" | "arbitrary"
    positions: np.ndarray  # (n_sites, 2)
    lattice: StateDepConfig
    aperture: ApertureSpec
    trap_on: list[bool]
    screen_engaged: bool = True
    orthogonal_lattices: bool = False
    pitch: float | None = None
    rows: int | None = None
    cols: int | None = None
    arms: int | None = None
    sites_per_arm: int | None = None

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2 or len(self.positions) == 0:
            raise ValueError("positions must be a non-empty (n, 2) array")
        if len(self.trap_on) != len(self.positions):
            raise ValueError("one trap flag per site")
        for a in range(len(self.positions)):
            for b in range(a + 1, len(self.positions)):
                if np.linalg.norm(self.positions[a] - self.positions[b]) < _COORD_ATOL:
                    raise ValueError(f"sites {a} and {b} coincide")

    @property
    def n_sites(self) -> int:
        return len(self.positions)

    @classmethod
    def square(
        cls,
        rows: int,
        cols: int,
        pitch: float,
        lattice: StateDepConfig | None = None,
        aperture: ApertureSpec | None = None,
        screen_engaged: bool = True,
    ) -> "TrapArray":
        lattice = lattice or StateDepConfig()
        if rows < 1 or cols < 1:
            raise ValueError("need at least one row and one column")
        _check_pitch(pitch, lattice.period)
        pos = [(c * pitch, r * pitch) for r in range(rows) for c in range(cols)]
        return cls(
            kind="square",
            positions=np.array(pos),
            lattice=lattice,
            aperture=aperture or ApertureSpec(radius=1.0),
            trap_on=[True] * (rows * cols),
            screen_engaged=screen_engaged,
            orthogonal_lattices=True,
            pitch=pitch,
            rows=rows,
            cols=cols,
        )

    @classmethod
    def radial(
        cls,
        arms: int,
        sites_per_arm: int,
        pitch: float,
        lattice: StateDepConfig | None = None,
        aperture: ApertureSpec | None = None,
        screen_engaged: bool = True,
    ) -> "TrapArray":
        lattice = lattice or StateDepConfig()
        if arms < 1 or sites_per_arm < 1:
            raise ValueError("need at least one arm with one site")
        _check_pitch(pitch, lattice.period)
        pos = []
        for a in range(arms):
            angle = 2.0 * math.pi * a / arms
            direction = (math.cos(angle), math.sin(angle))
            for s in range(sites_per_arm):
                radius = (s + 1) * pitch
                pos.append((radius * direction[0], radius * direction[1]))
        return cls(
            kind="radial",
            positions=np.array(pos),
            lattice=lattice,
            aperture=aperture or ApertureSpec(radius=1.0),
            trap_on=[True] * (arms * sites_per_arm),
            screen_engaged=screen_engaged,
            pitch=pitch,
            arms=arms,
            sites_per_arm=sites_per_arm,
        )

    @classmethod
    def arbitrary(
        cls,
        sites: Sequence[Sequence[float]],
        lattice: StateDepConfig | None = None,
        aperture: ApertureSpec | None = None,
        orthogonal_lattices: bool = False,
        screen_engaged: bool = True,
    ) -> "TrapArray":
        lattice = lattice or StateDepConfig()
        pos = np.asarray(sites, dtype=float)
        return cls(
            kind="arbitrary",
            positions=pos,
            lattice=lattice,
            aperture=aperture or ApertureSpec(radius=1.0),
            trap_on=[True] * len(pos),
            screen_engaged=screen_engaged,
            orthogonal_lattices=orthogonal_lattices,
        )

    def arm_of(self, site: int) -> int:
        if self.kind != "radial":
            raise ValueError("arm_of only applies to radial layouts")
        return site // self.sites_per_arm


def _check_pitch(pitch: float, period: float) -> None:
    if pitch <= 0:
        raise ValueError("pitch must be positive")
    m = pitch / period
    if abs(m - round(m)) > _COORD_ATOL or round(m) < 1:
        raise GeometryError(
            f"pitch {pitch} must be an integer multiple of the lattice period {period}"
        )


def trap_array_from_config(cfg: dict) -> TrapArray:
    """Build a TrapArray from a plain JSON-style dict."""
    if not isinstance(cfg, dict):
        raise ConfigError("array config must be an object")
    lat_cfg = cfg.get("lattice", {})
    try:
        lattice = StateDepConfig(
            depth=float(lat_cfg.get("depth", 1.0)),
            k_lat=float(lat_cfg.get("k_lat", 2.0 * math.pi)),
            scheme=weight_scheme(lat_cfg.get("scheme", "RAMAN_BASIS")),
        )
        aperture = ApertureSpec(radius=float(cfg.get("aperture_radius", 1.0)))
        kind = cfg.get("layout")
        if kind == "square":
            array = TrapArray.square(
                rows=int(cfg["rows"]),
                cols=int(cfg["cols"]),
                pitch=float(cfg["pitch"]),
                lattice=lattice,
                aperture=aperture,
            )
        elif kind == "radial":
            array = TrapArray.radial(
                arms=int(cfg["arms"]),
                sites_per_arm=int(cfg["sites_per_arm"]),
                pitch=float(cfg["pitch"]),
                lattice=lattice,
                aperture=aperture,
            )
        elif kind == "arbitrary":
            array = TrapArray.arbitrary(
                sites=cfg["sites"],
                lattice=lattice,
                aperture=aperture,
                orthogonal_lattices=bool(cfg.get("orthogonal_lattices", False)),
            )
        else:
            raise ConfigError(f"unknown layout {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"array config missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad array config: {exc}") from exc
    if "trap_on" in cfg:
        flags = [bool(v) for v in cfg["trap_on"]]
        if len(flags) != array.n_sites:
            raise ConfigError("trap_on length does not match site count")
        array.trap_on = flags
    if "screen_engaged" in cfg:
        array.screen_engaged = bool(cfg["screen_engaged"])
    return array


# ---------------------------------------------------------------------------
# pair geometry


@dataclass
class PairGeometry:
    requirement: LatticeRequirement
    collision_point: tuple[float, float]
    keys: frozenset  # occupancy keys for conflict checking (sites + lines)


def _period_index(coord: float, period: float, what: str) -> int:
    m = coord / period
    if abs(m - round(m)) > _COORD_ATOL:
        raise GeometryError(
            f"{what} {coord} is not on the lattice grid (period {period})"
        )
    return int(round(m))


def _pair_geometry(array: TrapArray, site_i: int, site_j: int) -> PairGeometry:
    n = array.n_sites
    if not (0 <= site_i < n and 0 <= site_j < n):
        raise ValueError(f"site index out of range for {n} sites")
    if site_i == site_j:
        raise GeometryError("a gate needs two distinct sites")
    period = array.lattice.period
    xi, yi = array.positions[site_i]
    xj, yj = array.positions[site_j]
    site_keys = {("site", site_i), ("site", site_j)}
    radial_key = {("radial-exclusive",)} if array.kind == "radial" else set()

    if array.kind == "radial":
        arm_i = array.arm_of(site_i)
        arm_j = array.arm_of(site_j)
        if arm_i == arm_j:
            mid = 0.5 * (np.array([xi, yi]) + np.array([xj, yj]))
            keys = site_keys | {("arm", arm_i)} | radial_key
            return PairGeometry(
                LatticeRequirement.SINGLE_AXIS, (float(mid[0]), float(mid[1])), frozenset(keys)
            )
        keys = site_keys | {("arm", arm_i), ("arm", arm_j)} | radial_key
        return PairGeometry(LatticeRequirement.RADIAL_CENTER, (0.0, 0.0), frozenset(keys))

    same_row = abs(yi - yj) <= _COORD_ATOL
    same_col = abs(xi - xj) <= _COORD_ATOL
    if same_row:
        keys = site_keys | {("row", round(yi / period, 6))}
        return PairGeometry(
            LatticeRequirement.SINGLE_AXIS, (0.5 * (xi + xj), yi), frozenset(keys)
        )
    if same_col:
        keys = site_keys | {("col", round(xi / period, 6))}
        return PairGeometry(
            LatticeRequirement.SINGLE_AXIS, (xi, 0.5 * (yi + yj)), frozenset(keys)
        )
    if not array.orthogonal_lattices:
        raise GeometryError(
            "sites share no lattice line and the array has no orthogonal "
            "lattice pair configured"
        )
    # atom i rides its row lattice to x_j, atom j rides the column at x_j
    keys = site_keys | {("row", round(yi / period, 6)), ("col", round(xj / period, 6))}
    return PairGeometry(LatticeRequirement.TWO_ORTHOGONAL, (xj, yi), frozenset(keys))


def validate_pair(array: TrapArray, site_i: int, site_j: int) -> LatticeRequirement:
    """Check a pair of occupied sites is gate-compatible; classify the geometry."""
    for s in (site_i, site_j):
        if 0 <= s < array.n_sites and not array.trap_on[s]:
            raise GeometryError(f"site {s} has no trapped atom (trap off)")
    return _pair_geometry(array, site_i, site_j).requirement


# ---------------------------------------------------------------------------
# gate plan


@dataclass
class GatePlan:
    """Everything step 4 needs: geometry plus the forward transport ramps."""

    pair_sites: tuple[int, int]
    requirement: LatticeRequirement
    collision_point: tuple[float, float]
    ramps: dict[str, ThetaRamp]  # forward legs, keyed by lattice-line label
    collision: CollisionParams


def _verify_leg(ramp_fwd: ThetaRamp, weights: tuple[float, float], k: float,
                start: float, target: float) -> None:
    full = mirrored(ramp_fwd)
    traj = transport_trajectory(full, *weights, k=k, x_start=start)
    peak = ramp_fwd.t.size - 1
    if abs(traj[peak][1] - target) > 1e-6:
        raise SchedulingError(
            f"transport leg missed its target by {abs(traj[peak][1] - target):.3g}"
        )
    if abs(traj[-1][1] - start) > 1e-9:
        raise SchedulingError("transport leg failed to return to its start")


def plan_gate(
    array: TrapArray,
    site_i: int,
    site_j: int,
    cp: CollisionParams,
    samples_per_quarter_turn: int = 64,
) -> GatePlan:
    """Plan the transport for a gate: validate geometry, build forward ramps.

    In every geometry the |0> component of atom i and the |1> component of
    atom j are steered to the collision point; each leg is verified by
    minimum tracking before the plan is returned.
    """
    geom = _pair_geometry(array, site_i, site_j)
    cfg = array.lattice
    k = cfg.k_lat
    period = cfg.period
    w0 = cfg.scheme.weights_for(0)
    w1 = cfg.scheme.weights_for(1)
    pi_, pj_ = array.positions[site_i], array.positions[site_j]

    if geom.requirement is LatticeRequirement.SINGLE_AXIS:
        if array.kind == "radial":
            # coordinate = radius along the arm
            ci = float(np.linalg.norm(pi_))
            cj = float(np.linalg.norm(pj_))
        elif abs(pi_[1] - pj_[1]) <= _COORD_ATOL:
            ci, cj = float(pi_[0]), float(pj_[0])
        else:
            ci, cj = float(pi_[1]), float(pj_[1])
        mi = _period_index(ci, period, "site coordinate")
        mj = _period_index(cj, period, "site coordinate")
        ramp = collision_schedule(mi, mj, period, cfg, samples_per_quarter_turn)
        peak = (ramp.t.size - 1) // 2
        forward = ThetaRamp(ramp.t[: peak + 1].copy(), ramp.theta[: peak + 1].copy())
        ramps = {"axis": forward}
    elif geom.requirement is LatticeRequirement.TWO_ORTHOGONAL:
        xi = _period_index(pi_[0], period, "x coordinate") * period
        xj = _period_index(pj_[0], period, "x coordinate") * period
        yi = _period_index(pi_[1], period, "y coordinate") * period
        yj = _period_index(pj_[1], period, "y coordinate") * period
        leg_x = displacement_ramp(xj - xi, *w0, k=k,
                                  samples_per_quarter_turn=samples_per_quarter_turn)
        leg_y = displacement_ramp(yi - yj, *w1, k=k,
                                  samples_per_quarter_turn=samples_per_quarter_turn)
        _verify_leg(leg_x, w0, k, xi, xj)
        _verify_leg(leg_y, w1, k, yj, yi)
        ramps = {"x": leg_x, "y": leg_y}
    else:  # RADIAL_CENTER
        ri = float(np.linalg.norm(pi_))
        rj = float(np.linalg.norm(pj_))
        _period_index(ri, period, "radius")
        _period_index(rj, period, "radius")
        leg_i = displacement_ramp(-ri, *w0, k=k,
                                  samples_per_quarter_turn=samples_per_quarter_turn)
        leg_j = displacement_ramp(-rj, *w1, k=k,
                                  samples_per_quarter_turn=samples_per_quarter_turn)
        _verify_leg(leg_i, w0, k, ri, 0.0)
        _verify_leg(leg_j, w1, k, rj, 0.0)
        ramps = {"arm_i": leg_i, "arm_j": leg_j}

    return GatePlan(
        pair_sites=(site_i, site_j),
        requirement=geom.requirement,
        collision_point=geom.collision_point,
        ramps=ramps,
        collision=cp,
    )


# ---------------------------------------------------------------------------
# register


@dataclass
class Register:
    """Pure state of n trapped qubits; qubit q lives at site site_of[q].

    Qubit 0 is the most significant bit of the amplitude index.
    """

    amplitudes: np.ndarray
    site_of: tuple[int, ...]

    def __post_init__(self):
        self.site_of = tuple(int(s) for s in self.site_of)
        n = len(self.site_of)
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}]")
        if len(set(self.site_of)) != n:
            raise ValueError("two qubits cannot share a site")
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape != (2**n,):
            raise ValueError("amplitude length must be 2**n")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"register not normalized (|psi| = {norm})")

    @property
    def n(self) -> int:
        return len(self.site_of)

    @classmethod
    def from_bits(cls, bits: str, site_of: Sequence[int] | None = None) -> "Register":
        if not bits or any(b not in "01" for b in bits):
            raise ValueError("bits must be a non-empty string over {0, 1}")
        n = len(bits)
        amps = np.zeros(2**n, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps, tuple(site_of) if site_of is not None else tuple(range(n)))

    def qubit_at(self, site: int) -> int | None:
        try:
            return self.site_of.index(site)
        except ValueError:
            return None


def apply_one_qubit(reg: Register, q: int, u: TwoLevelUnitary) -> Register:
    """New register with the 2x2 unitary applied to qubit q."""
    if not 0 <= q < reg.n:
        raise IndexError(f"qubit {q} out of range for {reg.n} qubits")
    t = reg.amplitudes.reshape((2,) * reg.n)
    t = np.moveaxis(np.tensordot(u.matrix, t, axes=([1], [q])), 0, q)
    return Register(t.reshape(-1), reg.site_of)


def _apply_two_qubit(amps: np.ndarray, n: int, qi: int, qj: int, m4: np.ndarray) -> np.ndarray:
    t = amps.reshape((2,) * n)
    m = m4.reshape(2, 2, 2, 2)
    t = np.moveaxis(np.tensordot(m, t, axes=([2, 3], [qi, qj])), (0, 1), (qi, qj))
    return t.reshape(-1)


# ---------------------------------------------------------------------------
# protocol trace


@dataclass
class ProtocolStep:
    step: int
    description: str
    params: dict[str, Any]
    outcome: str = "ok"


@dataclass
class ProtocolTrace:
    pair_qubits: tuple[int, int]
    pair_sites: tuple[int, int]
    requirement: LatticeRequirement
    collision_point: tuple[float, float]
    steps: list[ProtocolStep] = field(default_factory=list)

    def validate(self) -> None:
        """Assert the six protocol steps were traced once, in order."""
        if [s.step for s in self.steps] != [1, 2, 3, 4, 5, 6]:
            raise ProtocolError(0, "trace must contain steps 1..6 exactly once, in order")
        for s in self.steps:
            if s.outcome != "ok":
                raise ProtocolError(s.step, f"step recorded outcome {s.outcome!r}")
        fwd = self.steps[3].params.get("ramps", {})
        rev = self.steps[4].params.get("ramps", {})
        if set(fwd) != set(rev):
            raise ProtocolError(5, "reverse ramps do not mirror the forward legs")
        for label, ramp in fwd.items():
            if not np.array_equal(rev[label].theta, ramp.theta[::-1]):
                raise ProtocolError(5, f"reverse ramp {label!r} is not the exact mirror")

    def to_wire(self) -> dict:
        return {
            "pair_qubits": list(self.pair_qubits),
            "pair_sites": list(self.pair_sites),
            "requirement": self.requirement.value,
            "collision_point": [float(c) for c in self.collision_point],
            "steps": [
                {
                    "step": s.step,
                    "description": s.description,
                    "outcome": s.outcome,
                    "params": _params_to_wire(s.params),
                }
                for s in self.steps
            ],
        }

    def to_csv_rows(self) -> list[list[str]]:
        rows = [["step", "description", "outcome"]]
        for s in self.steps:
            rows.append([str(s.step), s.description, s.outcome])
        return rows


def _params_to_wire(value):
    if isinstance(value, ThetaRamp):
        return {"t": value.t.tolist(), "theta": value.theta.tolist()}
    if isinstance(value, dict):
        return {k: _params_to_wire(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_params_to_wire(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


# ---------------------------------------------------------------------------
# gate protocol


def run_two_qubit_gate(
    reg: Register,
    array: TrapArray,
    i: int,
    j: int,
    cp: CollisionParams,
    pre_hadamard: bool = True,
) -> tuple[Register, ProtocolTrace]:
    """Run the six-step collision gate on qubits i and j.

    Returns the new register and the full protocol trace; the input register
    is never mutated.  Raises ProtocolError naming the offending step when
    the machine state cannot support the protocol.
    """
    if not (0 <= i < reg.n and 0 <= j < reg.n):
        raise IndexError(f"qubit indices ({i}, {j}) out of range for {reg.n} qubits")
    if i == j:
        raise GeometryError("a gate needs two distinct qubits")
    site_i, site_j = reg.site_of[i], reg.site_of[j]
    for s in (site_i, site_j):
        if not 0 <= s < array.n_sites:
            raise ValueError(f"register site {s} does not exist in the array")
        if not array.trap_on[s]:
            raise ProtocolError(2, f"cannot release site {s}: its trap is already off")
    if not array.screen_engaged:
        raise ProtocolError(3, "cannot withdraw the screen: it is already withdrawn")

    plan = plan_gate(array, site_i, site_j, cp)
    amps = reg.amplitudes.copy()
    trace = ProtocolTrace(
        pair_qubits=(i, j),
        pair_sites=(site_i, site_j),
        requirement=plan.requirement,
        collision_point=plan.collision_point,
    )

    h = hadamard().matrix
    if pre_hadamard:
        n = reg.n
        t = amps.reshape((2,) * n)
        for q in (i, j):
            t = np.moveaxis(np.tensordot(h, t, axes=([1], [q])), 0, q)
        amps = t.reshape(-1)
    trace.steps.append(
        ProtocolStep(1, "hadamard on both qubits", {"applied": pre_hadamard, "qubits": [i, j]})
    )

    trace.steps.append(
        ProtocolStep(2, "diffraction traps off at gate sites", {"sites": [site_i, site_j]})
    )
    trace.steps.append(
        ProtocolStep(3, "screen withdrawn", {"screen_engaged": False})
    )

    amps = _apply_two_qubit(amps, reg.n, i, j, collision_phase_gate(cp))
    trace.steps.append(
        ProtocolStep(
            4,
            "transport to collision point and hold",
            {
                "ramps": dict(plan.ramps),
                "requirement": plan.requirement.value,
                "collision_point": list(plan.collision_point),
                "u_int": cp.u_int,
                "t_hold": cp.t_hold,
                "phase": cp.phase,
            },
        )
    )
    trace.steps.append(
        ProtocolStep(
            5,
            "reverse transport to home sites",
            {"ramps": {label: ramp.reversed() for label, ramp in plan.ramps.items()}},
        )
    )
    trace.steps.append(
        ProtocolStep(
            6,
            "screen re-engaged, traps on",
            {"screen_engaged": True, "sites": [site_i, site_j]},
        )
    )
    trace.validate()
    return Register(amps, reg.site_of), trace


def run_parallel_gates(
    reg: Register,
    array: TrapArray,
    pairs: Sequence[tuple[int, int]],
    cp: CollisionParams,
    pre_hadamard: bool = True,
) -> tuple[Register, list[ProtocolTrace]]:
    """Run several gates that must be simultaneously compatible.

    All pairs must fit a single parallel batch (no shared sites or lattice
    lines; radial layouts allow only one pair at a time), otherwise
    SchedulingError.  Gates on disjoint qubits commute, so they are applied
    in the given order.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    geoms = []
    for (i, j) in pairs:
        if not (0 <= i < reg.n and 0 <= j < reg.n):
            raise IndexError(f"qubit indices ({i}, {j}) out of range")
        if i == j:
            raise GeometryError("a gate needs two distinct qubits")
        geoms.append(_pair_geometry(array, reg.site_of[i], reg.site_of[j]))
    for a in range(len(pairs)):
        for b in range(a + 1, len(pairs)):
            clash = geoms[a].keys & geoms[b].keys
            if clash:
                raise SchedulingError(
                    f"pairs {tuple(pairs[a])} and {tuple(pairs[b])} cannot run "
                    f"simultaneously (shared {sorted(clash)[0]})"
                )
    traces = []
    current = reg
    for (i, j) in pairs:
        current, trace = run_two_qubit_gate(current, array, i, j, cp, pre_hadamard)
        traces.append(trace)
    return current, traces


# ---------------------------------------------------------------------------
# scheduling


def schedule_parallel(
    array: TrapArray, pairs: Sequence[tuple[int, int]]
) -> list[list[tuple[int, int]]]:
    """Greedy partition of site pairs into conflict-free parallel batches.

    Two pairs conflict when they share a site or a transport lattice line;
    on radial layouts any two pairs conflict (all arms meet at the center).
    Pairs are placed in the given order into the first batch they fit,
    so the result is deterministic.
    """
    items = []
    for (i, j) in pairs:
        geom = _pair_geometry(array, int(i), int(j))
        items.append(((int(i), int(j)), geom.keys))
    batches: list[list[tuple[int, int]]] = []
    batch_keys: list[set] = []
    for pair, keys in items:
        placed = False
        for bi in range(len(batches)):
            if not (batch_keys[bi] & keys):
                batches[bi].append(pair)
                batch_keys[bi] |= keys
                placed = True
                break
        if not placed:
            batches.append([pair])
            batch_keys.append(set(keys))
    return batches


class AdiabaticityReport(NamedTuple):
    eta: float
    adiabatic: bool
    threshold: float


def adiabatic_check(trap_freq: float, ramp_time: float, threshold: float = 0.1) -> AdiabaticityReport:
    """eta = 1 / (trap_freq * ramp_time); adiabatic when eta < threshold."""
    if trap_freq <= 0 or ramp_time <= 0:
        raise ValueError("trap_freq and ramp_time must be positive")
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    eta = 1.0 / (trap_freq * ramp_time)
    return AdiabaticityReport(eta=eta, adiabatic=eta < threshold, threshold=threshold)
