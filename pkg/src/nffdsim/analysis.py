"""Entanglement and fidelity diagnostics for protocol outputs.

For a pure two-qubit state with amplitudes (a00, a01, a10, a11) the
concurrence is C = 2 |a00 a11 - a01 a10|, zero for product states and one for
maximally entangled ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_NORM_TOL = 1e-10


@dataclass
class TwoQubitPureState:
    """Normalized amplitudes on (|00>, |01>, |10>, |11>)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.amplitudes.shape != (4,):
            raise ValueError("expected 4 amplitudes")
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state not normalized (|psi| = {norm})")


def _amplitudes(state) -> np.ndarray:
    if isinstance(state, TwoQubitPureState):
        return state.amplitudes
    return TwoQubitPureState(np.asarray(state)).amplitudes


def concurrence(state) -> float:
    """C = 2 |a00 a11 - a01 a10| for a pure two-qubit state."""
    a = _amplitudes(state)
    c = 2.0 * abs(a[0] * a[3] - a[1] * a[2])
    return float(min(max(c, 0.0), 1.0))


def state_fidelity(state, target) -> float:
    """|<target|state>|^2 for normalized pure states of equal dimension."""
    s = np.asarray(state.amplitudes if hasattr(state, "amplitudes") else state, dtype=complex).reshape(-1)
    t = np.asarray(target.amplitudes if hasattr(target, "amplitudes") else target, dtype=complex).reshape(-1)
    if s.shape != t.shape:
        raise ValueError(f"dimension mismatch: {s.shape} vs {t.shape}")
    for v in (s, t):
        if abs(np.linalg.norm(v) - 1.0) > _NORM_TOL:
            raise ValueError("states must be normalized")
    f = abs(np.vdot(t, s)) ** 2
    return float(min(max(f, 0.0), 1.0))


def reduce_to_pair(amplitudes: np.ndarray, n: int, q_a: int, q_b: int, tol: float = 1e-9) -> TwoQubitPureState:
    """Reduced pure state of qubits (q_a, q_b) of an n-qubit pure state.

    Qubit 0 is the most significant bit of the amplitude index.  Valid only
    when the pair is unentangled with the rest; raises ValueError if the
    reduced density matrix is mixed beyond tol.
    """
    a = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if a.shape != (2**n,):
        raise ValueError("amplitude length does not match qubit count")
    if q_a == q_b or not (0 <= q_a < n and 0 <= q_b < n):
        raise ValueError("need two distinct qubit indices in range")
    tensor = a.reshape((2,) * n)
    m = np.moveaxis(tensor, (q_a, q_b), (0, 1)).reshape(4, -1)
    rho = m @ m.conj().T
    purity = float(np.trace(rho @ rho).real)
    if purity < 1.0 - tol:
        raise ValueError(f"pair is entangled with the rest (purity {purity:.6f})")
    evals, evecs = np.linalg.eigh(rho)
    vec = evecs[:, np.argmax(evals)]
    # fix the free phase: largest amplitude real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * np.exp(-1j * np.angle(vec[k]))
    return TwoQubitPureState(vec)
