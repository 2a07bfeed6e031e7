"""FastAPI service exposing the simulator as request/response jobs."""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..analysis import concurrence, reduce_to_pair
from ..errors import ConfigError, SchedulingError, SimulationError, error_kind
from ..fields import (
    ApertureSpec,
    TrapLaserParams,
    axial_profile,
    locate_trap_minimum,
    potential_map,
)
from ..gates import CollisionParams
from ..machine import Register, run_parallel_gates, run_two_qubit_gate, schedule_parallel, trap_array_from_config
from ..selftest import run_selftest
from ..statedep import ThetaRamp, transport_trajectory, weight_scheme
from . import models

_STATUS = {"config": 422, "numerical": 500, "protocol": 409}


def create_app() -> FastAPI:
    app = FastAPI(title="nffdsim service", version=__version__)

    @app.exception_handler(SimulationError)
    async def _sim_error(request, exc: SimulationError):
        kind = error_kind(exc)
        return JSONResponse(status_code=_STATUS[kind], content={"kind": kind, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=422, content={"kind": "config", "message": str(exc)})

    @app.exception_handler(IndexError)
    async def _index_error(request, exc: IndexError):
        return JSONResponse(status_code=422, content={"kind": "config", "message": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/trap/scan", response_model=models.TrapScanResponse)
    def trap_scan(req: models.TrapScanRequest) -> models.TrapScanResponse:
        rows = []
        for a in req.radii:
            tm = locate_trap_minimum(ApertureSpec(radius=a), tol=req.tol)
            rows.append(models.TrapScanRow(a=a, z_min=tm.z_min, depth_over_u0=tm.depth))
        return models.TrapScanResponse(rows=rows)

    @app.post("/trap/axial-profile", response_model=models.AxialProfileResponse)
    def trap_axial_profile(req: models.AxialProfileRequest) -> models.AxialProfileResponse:
        prof = axial_profile(ApertureSpec(radius=req.radius), req.z_lo, req.z_hi, req.n, tol=req.tol)
        return models.AxialProfileResponse(z=prof.z.tolist(), u_over_u0=prof.u.tolist())

    @app.post("/trap/map", response_model=models.PotentialMapResponse)
    def trap_map(req: models.PotentialMapRequest) -> models.PotentialMapResponse:
        laser = TrapLaserParams(e0=req.e0, gamma_e=req.gamma_e, detuning=req.detuning)
        pm = potential_map(
            ApertureSpec(radius=req.radius),
            laser,
            np.linspace(req.r_min, req.r_max, req.n_r),
            np.linspace(req.z_min, req.z_max, req.n_z),
            tol=req.tol,
        )
        return models.PotentialMapResponse(
            r=pm.r.tolist(),
            z=pm.z.tolist(),
            u_over_u0=pm.values_over_u0.tolist(),
        )

    @app.post("/lattice/transport", response_model=models.TransportResponse)
    def lattice_transport(req: models.TransportRequest) -> models.TransportResponse:
        scheme = weight_scheme(req.scheme)
        ramp = ThetaRamp.linear(req.theta_start, req.theta_stop, req.duration, req.n_samples)
        traj0 = transport_trajectory(ramp, *scheme.weights_for(0), k=req.k_lat, x_start=req.x0_start)
        traj1 = transport_trajectory(ramp, *scheme.weights_for(1), k=req.k_lat, x_start=req.x1_start)
        return models.TransportResponse(
            t=ramp.t.tolist(),
            theta=ramp.theta.tolist(),
            x0=[x for _, x in traj0],
            x1=[x for _, x in traj1],
        )

    @app.post("/protocol/run", response_model=models.ProtocolRunResponse)
    def protocol_run(req: models.ProtocolRunRequest) -> models.ProtocolRunResponse:
        array = trap_array_from_config(req.array.to_config_dict())
        pair_sites = [s for pair in req.pairs for s in pair]
        if len(set(pair_sites)) != len(pair_sites):
            raise SchedulingError("requested pairs share sites")
        overlap = set(req.spectator_sites) & set(pair_sites)
        if overlap:
            raise ConfigError(f"spectator sites {sorted(overlap)} are gate sites")
        if len(set(req.spectator_sites)) != len(req.spectator_sites):
            raise ConfigError("duplicate spectator sites")
        site_of = tuple(pair_sites) + tuple(req.spectator_sites)
        n = len(site_of)
        if n > 20:
            raise ConfigError(f"register would need {n} qubits (max 20)")
        initial = req.initial if req.initial is not None else "0" * n
        if len(initial) != n or any(b not in "01" for b in initial):
            raise ConfigError(f"initial must be a length-{n} bitstring")
        reg = Register.from_bits(initial, site_of)
        cp = CollisionParams(u_int=req.u_int, t_hold=req.t_hold)
        qubit_pairs = [(2 * g, 2 * g + 1) for g in range(len(req.pairs))]
        if len(qubit_pairs) == 1:
            out, trace = run_two_qubit_gate(reg, array, 0, 1, cp, req.pre_hadamard)
            traces = [trace]
        else:
            out, traces = run_parallel_gates(reg, array, qubit_pairs, cp, req.pre_hadamard)
        pair_results = []
        for g, (qa, qb) in enumerate(qubit_pairs):
            red = reduce_to_pair(out.amplitudes, n, qa, qb)
            pair_results.append(
                models.PairResult(pair=tuple(req.pairs[g]), concurrence=concurrence(red))
            )
        final = models.StateWire(
            amplitudes=[(float(a.real), float(a.imag)) for a in out.amplitudes],
            site_of=list(out.site_of),
        )
        return models.ProtocolRunResponse(
            traces=[t.to_wire() for t in traces],
            final_state=final,
            pair_results=pair_results,
        )

    @app.post("/schedule/parallel", response_model=models.ScheduleResponse)
    def schedule(req: models.ScheduleRequest) -> models.ScheduleResponse:
        array = trap_array_from_config(req.array.to_config_dict())
        batches = schedule_parallel(array, [tuple(p) for p in req.pairs])
        return models.ScheduleResponse(batches=[[tuple(p) for p in b] for b in batches])

    @app.post("/selftest", response_model=models.SelftestResponse)
    def selftest(req: models.SelftestRequest) -> models.SelftestResponse:
        checks = run_selftest(seed=req.seed)
        passed = sum(1 for c in checks if c.passed)
        return models.SelftestResponse(
            checks=[
                models.SelftestCheck(name=c.name, passed=c.passed, detail=c.detail)
                for c in checks
            ],
            passed=passed,
            failed=len(checks) - passed,
        )

    return app
