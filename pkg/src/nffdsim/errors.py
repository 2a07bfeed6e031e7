"""Exception taxonomy shared across the simulator.

Three failure kinds matter to callers (the service maps them to HTTP statuses,
the CLI to exit codes): configuration problems, numerical failures, and
protocol/geometry violations.
"""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for all simulator-raised failures."""


class ConfigError(SimulationError):
    """Invalid configuration supplied by the caller."""


class QuadratureError(SimulationError):
    """Diffraction quadrature failed to converge within the node budget.

    Carries the best value computed and the achieved relative-change estimate.
    """

    def __init__(self, message: str, estimate: float, value: complex | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.value = value


class TrapMinimumNotFoundError(SimulationError):
    """No interior axial minimum found in the search window."""


class DegenerateLatticeError(SimulationError):
    """Component potential has no isolated minimum (argmin amplitude vanished)."""


class BranchTrackingError(SimulationError):
    """Minimum-tracking lost its branch (jump of half a lattice site or more)."""


class GeometryError(SimulationError):
    """Trap-array geometry cannot support the requested operation."""


class SchedulingError(SimulationError):
    """Requested transport or parallel batch is infeasible."""


class ProtocolError(SimulationError):
    """Two-qubit gate protocol violated; names the offending step."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


NUMERICAL_ERRORS = (
    QuadratureError,
    TrapMinimumNotFoundError,
    DegenerateLatticeError,
    BranchTrackingError,
)

PROTOCOL_ERRORS = (GeometryError, SchedulingError, ProtocolError)


def error_kind(exc: BaseException) -> str:
    """Classify an exception as 'config', 'numerical' or 'protocol'."""
    if isinstance(exc, NUMERICAL_ERRORS):
        return "numerical"
    if isinstance(exc, PROTOCOL_ERRORS):
        return "protocol"
    return "config"
