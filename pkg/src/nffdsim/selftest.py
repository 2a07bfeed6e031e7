"""Built-in invariant battery: quick seeded checks over every module.

Smaller sample sizes than the full test suite, meant for an installed-system
smoke run (`nffdsim selftest`).  Deterministic for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import concurrence
from .errors import SchedulingError, SimulationError
from .fields import ApertureSpec, locate_trap_minimum, rs_amplitude_many
from .gates import CollisionParams, RamanParams, collision_output_state, effective_hamiltonian, evolve
from .machine import Register, TrapArray, run_parallel_gates, run_two_qubit_gate, schedule_parallel, _pair_geometry
from .statedep import RAMAN_BASIS, StateDepConfig, ThetaRamp, component_minimum, mirrored, transport_trajectory

K = 2.0 * math.pi


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _check(name, fn, results):
    try:
        detail = fn() or ""
        results.append(CheckResult(name, True, detail))
    except AssertionError as exc:
        results.append(CheckResult(name, False, str(exc)))
    except SimulationError as exc:
        results.append(CheckResult(name, False, f"{type(exc).__name__}: {exc}"))


def run_selftest(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []

    def quadrature_vs_closed_form():
        worst = 0.0
        for a in (1.0, 1.5, 2.0):
            z = np.linspace(0.3, 6.0, 10)
            pts = np.column_stack([np.zeros(10), np.zeros(10), z])
            amps, _ = rs_amplitude_many(pts, ApertureSpec(radius=a))
            big_r = np.sqrt(z**2 + a**2)
            exact = np.exp(1j * K * z) - (z / big_r) * np.exp(1j * K * big_r)
            worst = max(worst, float(np.max(np.abs(amps - exact) / np.abs(exact))))
        assert worst < 1e-6, f"on-axis relative error {worst:.2e}"
        return f"max rel err {worst:.2e}"

    def trap_minimum_window():
        tm = locate_trap_minimum(ApertureSpec(radius=1.0))
        assert 0.5 <= tm.z_min <= 1.6, f"z_min {tm.z_min}"
        assert tm.depth < 0
        return f"z_min {tm.z_min:.4f}"

    def argmin_vs_scan():
        for _ in range(20):
            theta = rng.uniform(-0.7, 0.7)
            w_plus = rng.uniform(0.2, 1.0)
            w_minus = rng.uniform(0.2, 1.0)
            if abs(w_plus - w_minus) < 0.05:
                w_plus += 0.1
            x_closed = component_minimum(theta, w_plus, w_minus, K)
            period = math.pi / K
            xs = np.linspace(-period / 2, period / 2, 20001)
            v = -w_plus * np.cos(K * xs - theta) ** 2 - w_minus * np.cos(K * xs + theta) ** 2
            x_scan = xs[np.argmin(v)]
            assert abs(x_closed - x_scan) <= 2 * (xs[1] - xs[0])

    def transport_round_trip():
        for _ in range(10):
            stop = rng.uniform(-1.4, 1.4)
            full = mirrored(ThetaRamp.linear(0.0, stop, 1.0, 129))
            traj = transport_trajectory(full, *RAMAN_BASIS.weights_for(0), k=K)
            assert abs(traj[-1][1]) < 1e-9

    def rabi_probability():
        for _ in range(20):
            omega0 = rng.uniform(0.5, 3.0)
            omega1 = rng.uniform(0.5, 3.0)
            delta = -rng.uniform(50.0, 300.0)
            e_split = -(omega1**2 - omega0**2) / (4.0 * delta)
            t = rng.uniform(0.0, 30.0)
            u = evolve(effective_hamiltonian(RamanParams(omega0, omega1, delta, e_split)), t)
            p1 = abs(u.matrix[1, 0]) ** 2
            assert abs(p1 - math.sin(omega0 * omega1 * t / (4 * delta)) ** 2) < 1e-9
            defect = np.max(np.abs(u.matrix.conj().T @ u.matrix - np.eye(2)))
            assert defect <= 1e-12

    def concurrence_law():
        for x in np.linspace(0.0, 2 * math.pi, 20):
            s = collision_output_state(CollisionParams(x, 1.0))
            assert abs(concurrence(s) - abs(math.sin(x / 2))) < 1e-9

    def protocol_trace_and_output():
        arr = TrapArray.square(2, 2, 1.0, StateDepConfig(k_lat=K))
        reg = Register.from_bits("00", site_of=(0, 1))
        out, trace = run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(math.pi, 1.0))
        trace.validate()
        expected = 0.5 * np.array([1.0, np.exp(-1j * math.pi), 1.0, 1.0])
        assert np.max(np.abs(out.amplitudes - expected)) < 1e-12
        assert abs(concurrence(out.amplitudes) - 1.0) < 1e-9

    def radial_exclusivity():
        arr = TrapArray.radial(4, 1, 1.0, StateDepConfig(k_lat=K))
        reg = Register.from_bits("0000", site_of=(0, 1, 2, 3))
        try:
            run_parallel_gates(reg, arr, [(0, 1), (2, 3)], CollisionParams(1.0, 1.0))
        except SchedulingError:
            return "rejected as required"
        raise AssertionError("two simultaneous radial pairs were not rejected")

    def schedule_conflict_free():
        arr = TrapArray.square(4, 4, 1.0, StateDepConfig(k_lat=K))
        for _ in range(10):
            sites = rng.permutation(16)
            pairs = [(int(sites[2 * i]), int(sites[2 * i + 1])) for i in range(5)]
            batches = schedule_parallel(arr, pairs)
            assert sorted(p for b in batches for p in b) == sorted(pairs)
            for batch in batches:
                seen = set()
                for (i, j) in batch:
                    keys = _pair_geometry(arr, i, j).keys
                    assert not (seen & keys), "conflicting pairs share a batch"
                    seen |= keys

    _check("quadrature_vs_closed_form", quadrature_vs_closed_form, results)
    _check("trap_minimum_window", trap_minimum_window, results)
    _check("argmin_vs_scan", argmin_vs_scan, results)
    _check("transport_round_trip", transport_round_trip, results)
    _check("rabi_probability", rabi_probability, results)
    _check("concurrence_law", concurrence_law, results)
    _check("protocol_trace_and_output", protocol_trace_and_output, results)
    _check("radial_exclusivity", radial_exclusivity, results)
    _check("schedule_conflict_free", schedule_conflict_free, results)
    return results
