"""One- and two-qubit gates: Raman pulses and collisional phases.

Adiabatic elimination of the excited level in a two-photon Raman drive leaves
the qubit Hamiltonian (hbar = 1)

    H = (eps/2) sigma_z - (Omega_0 Omega_1 / 4 Delta) sigma_x,
    eps = (E_1 - E_0) + (Omega_1^2 - Omega_0^2) / (4 Delta),

in the ordered basis (|0>, |1>).  Since H = c I + h . sigma, propagators have
the closed form e^{-iHt} = e^{-ict} (cos|h|t - i sin|h|t hhat . sigma), which
is what evolve() uses: no integrator, no truncation error beyond rounding.

The two-qubit resource is the collision phase: when the |0> component of one
atom sits on top of the |1> component of its partner for a hold time t, the
pair state |01> acquires e^{-iUt} relative to the others, i.e. the gate
diag(1, e^{-iUt}, 1, 1) in the basis (|00>, |01>, |10>, |11>).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_UNITARITY_TOL = 1e-12
_REGIME_FACTOR = 10.0


@dataclass(frozen=True)
class RamanParams:
    """Two-photon drive: Rabi amplitudes, common detuning, level splitting."""

    omega0: float
    omega1: float
    delta: float
    e_split: float = 0.0  # E_1 - E_0

    def __post_init__(self):
        if self.delta == 0:
            raise ValueError("raman drive undefined at zero detuning")

    @property
    def epsilon(self) -> float:
        """Effective two-level splitting including differential light shifts."""
        return self.e_split + (self.omega1**2 - self.omega0**2) / (4.0 * self.delta)

    @property
    def coupling(self) -> float:
        """Effective sigma_x coefficient -Omega_0 Omega_1 / (4 Delta)."""
        return -self.omega0 * self.omega1 / (4.0 * self.delta)

    @property
    def within_validity_regime(self) -> bool:
        """Adiabatic elimination needs |Delta| well above splitting and shifts."""
        scale = max(
            abs(self.e_split),
            self.omega0**2 / abs(self.delta),
            self.omega1**2 / abs(self.delta),
        )
        return abs(self.delta) >= _REGIME_FACTOR * scale


@dataclass
class TwoLevelUnitary:
    """2x2 unitary; construction rejects matrices off the unitary manifold."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        defect = np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2)))
        if defect > _UNITARITY_TOL:
            raise ValueError(f"matrix is not unitary (defect {defect:.3e})")

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def __matmul__(self, other: "TwoLevelUnitary") -> "TwoLevelUnitary":
        return TwoLevelUnitary(self.matrix @ other.matrix)

    def dagger(self) -> "TwoLevelUnitary":
        return TwoLevelUnitary(self.matrix.conj().T)


@dataclass(frozen=True)
class CollisionParams:
    """Interaction strength U and hold time at the merged-trap configuration."""

    u_int: float
    t_hold: float

    def __post_init__(self):
        if self.t_hold < 0:
            raise ValueError("hold time must be non-negative")

    @property
    def phase(self) -> float:
        """Accumulated collision phase U * t_hold."""
        return self.u_int * self.t_hold


def effective_hamiltonian(rp: RamanParams) -> np.ndarray:
    """Effective qubit Hamiltonian of the Raman drive, in the (|0>, |1>) basis.

    Emits a UserWarning (never an error) when the large-detuning condition
    |Delta| >= 10 max(E1-E0, Omega_i^2/|Delta|) fails, so parameter sweeps can
    probe the regime boundary.
    """
    if not rp.within_validity_regime:
        warnings.warn(
            "adiabatic elimination marginal: |delta| is not large against the "
            "splitting and light shifts",
            UserWarning,
            stacklevel=2,
        )
    return 0.5 * rp.epsilon * SIGMA_Z + rp.coupling * SIGMA_X


def evolve(hamiltonian: np.ndarray, t: float) -> TwoLevelUnitary:
    """Exact propagator e^{-iHt} for a 2x2 Hermitian H."""
    h = np.asarray(hamiltonian, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError("expected a 2x2 hamiltonian")
    if np.max(np.abs(h - h.conj().T)) > 1e-10:
        raise ValueError("hamiltonian must be Hermitian")
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    c = 0.5 * (h[0, 0].real + h[1, 1].real)
    hx = h[0, 1].real
    hy = -h[0, 1].imag
    hz = 0.5 * (h[0, 0].real - h[1, 1].real)
    hnorm = math.sqrt(hx * hx + hy * hy + hz * hz)
    phase = np.exp(-1j * c * t)
    if hnorm * t == 0.0:
        return TwoLevelUnitary(phase * np.eye(2))
    hhat = (hx * SIGMA_X + hy * SIGMA_Y + hz * SIGMA_Z) / hnorm
    u = math.cos(hnorm * t) * np.eye(2) - 1j * math.sin(hnorm * t) * hhat
    return TwoLevelUnitary(phase * u)


# ---------------------------------------------------------------------------
# Walsh-Hadamard synthesis


WALSH_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class PulseStep:
    """One Raman pulse: drive parameters and duration."""

    label: str
    params: RamanParams
    duration: float


@dataclass
class HadamardRecipe:
    """Physical z-x-z pulse sequence whose product is the Hadamard."""

    pulses: tuple[PulseStep, ...]
    synthesized: TwoLevelUnitary
    global_phase: float  # exp(i global_phase) * synthesized == Hadamard


def hadamard() -> TwoLevelUnitary:
    """The Walsh-Hadamard gate (1/sqrt2) [[1, 1], [1, -1]]."""
    return TwoLevelUnitary(WALSH_HADAMARD.copy())


def hadamard_recipe() -> HadamardRecipe:
    """Build the Hadamard from physical pulses: Rz(pi/2) Rx(pi/2) Rz(pi/2).

    The z rotations are free precession under the level splitting with both
    drives off; the x rotation is a resonant Raman pulse (eps = 0, equal Rabi
    amplitudes) held for a quarter-cycle of the effective coupling.  All three
    sit comfortably inside the adiabatic-elimination regime.  The product
    equals the Hadamard up to the reported global phase (pi/2).
    """
    delta = -100.0
    z_params = RamanParams(omega0=0.0, omega1=0.0, delta=delta, e_split=1.0)
    z_time = math.pi / 2.0  # eps = 1, Rz angle = eps * t
    x_params = RamanParams(omega0=1.0, omega1=1.0, delta=delta, e_split=0.0)
    x_time = (math.pi / 4.0) / abs(x_params.coupling)  # quarter Rabi cycle

    pulses = (
        PulseStep("z", z_params, z_time),
        PulseStep("x", x_params, x_time),
        PulseStep("z", z_params, z_time),
    )
    u = TwoLevelUnitary(np.eye(2, dtype=complex))
    for step in pulses:
        u = evolve(effective_hamiltonian(step.params), step.duration) @ u
    overlap = np.trace(WALSH_HADAMARD.conj().T @ u.matrix) / 2.0
    global_phase = float(-np.angle(overlap))
    return HadamardRecipe(pulses=pulses, synthesized=u, global_phase=global_phase)


# ---------------------------------------------------------------------------
# collision gate


def collision_phase_gate(cp: CollisionParams) -> np.ndarray:
    """diag(1, e^{-iUt}, 1, 1) on (|00>, |01>, |10>, |11>)."""
    return np.diag([1.0, np.exp(-1j * cp.phase), 1.0, 1.0]).astype(complex)


def collision_output_state(cp: CollisionParams) -> np.ndarray:
    """Output of the full gate protocol on |00>: Hadamards then collision.

    (1/2) (|00> + e^{-iUt} |01> + |10> + |11>); maximally entangled when the
    collision phase is an odd multiple of pi.
    """
    return 0.5 * np.array([1.0, np.exp(-1j * cp.phase), 1.0, 1.0], dtype=complex)


# ---------------------------------------------------------------------------
# serialization helpers (service/CLI wire format)


def matrix_to_wire(m: np.ndarray) -> list:
    """Complex matrix/vector as nested [re, im] pairs, row-major."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 1:
        return [[float(v.real), float(v.imag)] for v in arr]
    return [[[float(v.real), float(v.imag)] for v in row] for row in arr]


def matrix_from_wire(data: list) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError("wire format is nested [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
