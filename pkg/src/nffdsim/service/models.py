"""Request/response schemas for the simulator service.

Unknown fields are rejected everywhere (extra="forbid") so config typos fail
loudly instead of silently running defaults.
"""

from __future__ import annotations

import math
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ---------------------------------------------------------------------------
# requests


class TrapScanRequest(StrictModel):
    radii: list[float] = Field(min_length=1)
    tol: float = 1e-8


class AxialProfileRequest(StrictModel):
    radius: float
    z_lo: float = 0.1
    z_hi: float = 6.0
    n: int = 300
    tol: float = 1e-8


class PotentialMapRequest(StrictModel):
    radius: float
    e0: float = 1.0
    gamma_e: float = 1.0
    detuning: float = -1.0
    r_min: float = -2.0
    r_max: float = 2.0
    n_r: int = Field(41, ge=1)
    z_min: float = 0.2
    z_max: float = 4.0
    n_z: int = Field(41, ge=1)
    tol: float = 1e-8


class TransportRequest(StrictModel):
    scheme: Literal["MANDEL", "RAMAN_BASIS"] = "RAMAN_BASIS"
    theta_start: float = 0.0
    theta_stop: float = math.pi / 2
    duration: float = 1.0
    n_samples: int = Field(129, ge=2)
    k_lat: float = 2.0 * math.pi
    x0_start: float = 0.0
    x1_start: float = 0.0


class LatticeSettings(StrictModel):
    depth: float = 1.0
    k_lat: float = 2.0 * math.pi
    scheme: Literal["MANDEL", "RAMAN_BASIS"] = "RAMAN_BASIS"


class ArraySettings(StrictModel):
    layout: Literal["square", "radial", "arbitrary"]
    pitch: Optional[float] = None
    rows: Optional[int] = None
    cols: Optional[int] = None
    arms: Optional[int] = None
    sites_per_arm: Optional[int] = None
    sites: Optional[list[tuple[float, float]]] = None
    orthogonal_lattices: bool = False
    aperture_radius: float = 1.0
    lattice: LatticeSettings = LatticeSettings()
    trap_on: Optional[list[bool]] = None
    screen_engaged: bool = True

    def to_config_dict(self) -> dict:
        cfg: dict[str, Any] = {
            "layout": self.layout,
            "aperture_radius": self.aperture_radius,
            "lattice": self.lattice.model_dump(),
            "screen_engaged": self.screen_engaged,
        }
        if self.layout == "square":
            cfg.update(rows=self.rows, cols=self.cols, pitch=self.pitch)
        elif self.layout == "radial":
            cfg.update(arms=self.arms, sites_per_arm=self.sites_per_arm, pitch=self.pitch)
        else:
            cfg.update(sites=self.sites, orthogonal_lattices=self.orthogonal_lattices)
        if self.trap_on is not None:
            cfg["trap_on"] = self.trap_on
        missing = [k for k, v in cfg.items() if v is None]
        if missing:
            from ..errors import ConfigError

            raise ConfigError(f"layout {self.layout!r} needs fields {missing}")
        return cfg


class ProtocolRunRequest(StrictModel):
    array: ArraySettings
    pairs: list[tuple[int, int]] = Field(min_length=1)
    u_int: float = math.pi
    t_hold: float = 1.0
    pre_hadamard: bool = True
    spectator_sites: list[int] = Field(default_factory=list)
    initial: Optional[str] = None  # bitstring over pair qubits then spectators


class ScheduleRequest(StrictModel):
    array: ArraySettings
    pairs: list[tuple[int, int]] = Field(min_length=1)


class SelftestRequest(StrictModel):
    seed: int = 0


# ---------------------------------------------------------------------------
# responses


class TrapScanRow(StrictModel):
    a: float
    z_min: float
    depth_over_u0: float


class TrapScanResponse(StrictModel):
    schema_version: int = 1
    rows: list[TrapScanRow]


class AxialProfileResponse(StrictModel):
    schema_version: int = 1
    z: list[float]
    u_over_u0: list[float]


class PotentialMapResponse(StrictModel):
    schema_version: int = 1
    r: list[float]
    z: list[float]
    u_over_u0: list[list[float]]


class TransportResponse(StrictModel):
    schema_version: int = 1
    t: list[float]
    theta: list[float]
    x0: list[float]
    x1: list[float]


class StateWire(StrictModel):
    amplitudes: list[tuple[float, float]]  # [re, im] pairs, qubit 0 most significant
    site_of: list[int]


class PairResult(StrictModel):
    pair: tuple[int, int]
    concurrence: float


class ProtocolRunResponse(StrictModel):
    schema_version: int = 1
    traces: list[dict]
    final_state: StateWire
    pair_results: list[PairResult]


class ScheduleResponse(StrictModel):
    schema_version: int = 1
    batches: list[list[tuple[int, int]]]


class SelftestCheck(StrictModel):
    name: str
    passed: bool
    detail: str = ""


class SelftestResponse(StrictModel):
    schema_version: int = 1
    checks: list[SelftestCheck]
    passed: int
    failed: int


class ErrorBody(StrictModel):
    kind: Literal["config", "numerical", "protocol"]
    message: str
