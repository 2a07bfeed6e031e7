"""Machine-level tests: geometry, register algebra, the six-step protocol,
and parallel scheduling.

The protocol oracle is assembled independently: the expected register is
(CPhase on the pair) . (H (x) H on the pair) applied with plain numpy kron
and explicit bit indexing, never via the machine's own operators.
"""

import math

import numpy as np
import pytest

from nffdsim.errors import (
    ConfigError,
    GeometryError,
    ProtocolError,
    SchedulingError,
)
from nffdsim.gates import CollisionParams, hadamard
from nffdsim.machine import (
    LatticeRequirement,
    Register,
    TrapArray,
    adiabatic_check,
    apply_one_qubit,
    plan_gate,
    run_parallel_gates,
    run_two_qubit_gate,
    schedule_parallel,
    trap_array_from_config,
    validate_pair,
)
from nffdsim.statedep import MANDEL, RAMAN_BASIS, StateDepConfig

K = 2.0 * math.pi
PERIOD = math.pi / K  # 0.5


def square_array(rows=2, cols=2, pitch=1.0, scheme=RAMAN_BASIS):
    return TrapArray.square(rows, cols, pitch, StateDepConfig(scheme=scheme, k_lat=K))


def radial_array(arms=4, per_arm=2, pitch=1.0, scheme=RAMAN_BASIS):
    return TrapArray.radial(arms, per_arm, pitch, StateDepConfig(scheme=scheme, k_lat=K))


# ---------------------------------------------------------------------------
# arrays and configs


def test_square_positions_and_indexing():
    arr = square_array(2, 3, 1.0)
    assert arr.n_sites == 6
    np.testing.assert_allclose(arr.positions[0], [0.0, 0.0])
    np.testing.assert_allclose(arr.positions[2], [2.0, 0.0])
    np.testing.assert_allclose(arr.positions[3], [0.0, 1.0])


def test_radial_positions():
    arr = radial_array(4, 2, 1.0)
    assert arr.n_sites == 8
    np.testing.assert_allclose(arr.positions[0], [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(arr.positions[1], [2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(arr.positions[2], [0.0, 1.0], atol=1e-12)
    assert arr.arm_of(5) == 2


def test_pitch_must_sit_on_lattice():
    with pytest.raises(GeometryError):
        square_array(pitch=0.7)
    with pytest.raises(GeometryError):
        radial_array(pitch=1.2)
    square_array(pitch=1.5)  # 3 half-wavelength periods


def test_array_from_config_square():
    arr = trap_array_from_config(
        {
            "layout": "square",
            "rows": 3,
            "cols": 3,
            "pitch": 1.0,
            "aperture_radius": 1.5,
            "lattice": {"depth": 2.0, "k_lat": K, "scheme": "MANDEL"},
        }
    )
    assert arr.kind == "square"
    assert arr.lattice.scheme is MANDEL
    assert arr.aperture.radius == 1.5
    assert all(arr.trap_on)


def test_array_from_config_errors():
    with pytest.raises(ConfigError):
        trap_array_from_config({"layout": "hex"})
    with pytest.raises(ConfigError):
        trap_array_from_config({"layout": "square", "rows": 2, "cols": 2})
    with pytest.raises(ConfigError):
        trap_array_from_config(
            {"layout": "square", "rows": 2, "cols": 2, "pitch": 1.0, "trap_on": [True]}
        )
    with pytest.raises(ConfigError):
        trap_array_from_config([1, 2, 3])


# ---------------------------------------------------------------------------
# pair validation


def test_square_pair_classification():
    arr = square_array(2, 2, 1.0)
    assert validate_pair(arr, 0, 1) is LatticeRequirement.SINGLE_AXIS  # same row
    assert validate_pair(arr, 0, 2) is LatticeRequirement.SINGLE_AXIS  # same col
    assert validate_pair(arr, 0, 3) is LatticeRequirement.TWO_ORTHOGONAL


def test_radial_pair_classification():
    arr = radial_array(4, 2, 1.0)
    assert validate_pair(arr, 0, 1) is LatticeRequirement.SINGLE_AXIS  # same arm
    assert validate_pair(arr, 0, 2) is LatticeRequirement.RADIAL_CENTER
    assert validate_pair(arr, 1, 7) is LatticeRequirement.RADIAL_CENTER


def test_arbitrary_pair_needs_shared_line_or_flag():
    lat = StateDepConfig(k_lat=K)
    sites = [(0.0, 0.0), (1.5, 0.0), (0.0, 2.0), (1.0, 1.0)]
    arr = TrapArray.arbitrary(sites, lat, orthogonal_lattices=False)
    assert validate_pair(arr, 0, 1) is LatticeRequirement.SINGLE_AXIS
    assert validate_pair(arr, 0, 2) is LatticeRequirement.SINGLE_AXIS
    with pytest.raises(GeometryError):
        validate_pair(arr, 1, 2)
    arr2 = TrapArray.arbitrary(sites, lat, orthogonal_lattices=True)
    assert validate_pair(arr2, 1, 2) is LatticeRequirement.TWO_ORTHOGONAL


def test_validate_pair_rejects_degenerate_and_empty():
    arr = square_array()
    with pytest.raises(GeometryError):
        validate_pair(arr, 1, 1)
    arr.trap_on[2] = False
    with pytest.raises(GeometryError):
        validate_pair(arr, 0, 2)
    with pytest.raises(ValueError):
        validate_pair(arr, 0, 99)


# ---------------------------------------------------------------------------
# gate plans


def test_single_axis_plan_has_one_mirrored_leg():
    arr = square_array()
    plan = plan_gate(arr, 0, 1, CollisionParams(1.0, 1.0))
    assert plan.requirement is LatticeRequirement.SINGLE_AXIS
    assert list(plan.ramps) == ["axis"]
    assert plan.collision_point == (0.5, 0.0)
    ramp = plan.ramps["axis"]
    assert ramp.theta[0] == 0.0
    assert abs(ramp.theta[-1]) == pytest.approx(math.pi, abs=1e-12)


def test_two_orthogonal_plan_uses_both_lattices():
    arr = square_array()
    plan = plan_gate(arr, 0, 3, CollisionParams(1.0, 1.0))
    assert plan.requirement is LatticeRequirement.TWO_ORTHOGONAL
    assert list(plan.ramps) == ["x", "y"]
    assert plan.collision_point == (1.0, 0.0)


def test_radial_center_plan():
    arr = radial_array()
    plan = plan_gate(arr, 0, 2, CollisionParams(1.0, 1.0))
    assert plan.requirement is LatticeRequirement.RADIAL_CENTER
    assert list(plan.ramps) == ["arm_i", "arm_j"]
    assert plan.collision_point == (0.0, 0.0)


def test_plan_rejects_off_grid_arbitrary_sites():
    lat = StateDepConfig(k_lat=K)
    arr = TrapArray.arbitrary([(0.0, 0.0), (1.3, 0.0)], lat)
    with pytest.raises(GeometryError):
        plan_gate(arr, 0, 1, CollisionParams(1.0, 1.0))


# ---------------------------------------------------------------------------
# register


def test_register_from_bits_and_bit_order():
    reg = Register.from_bits("10", site_of=(0, 3))
    assert reg.n == 2
    assert reg.amplitudes[2] == 1.0  # qubit 0 is the most significant bit
    assert reg.qubit_at(3) == 1
    assert reg.qubit_at(1) is None


def test_register_validation():
    with pytest.raises(ValueError):
        Register(np.array([1.0, 0.0]), site_of=(0, 1))  # wrong length
    with pytest.raises(ValueError):
        Register(np.array([1.0, 1.0]), site_of=(0,))  # unnormalized
    with pytest.raises(ValueError):
        Register.from_bits("01", site_of=(2, 2))  # shared site
    with pytest.raises(ValueError):
        Register.from_bits("0" * 21)  # too many qubits


def test_apply_one_qubit_targets_correct_axis():
    x = hadamard() @ hadamard()  # identity, just to get the type
    from nffdsim.gates import TwoLevelUnitary

    flip = TwoLevelUnitary(np.array([[0.0, 1.0], [1.0, 0.0]]))
    reg = Register.from_bits("00")
    out = apply_one_qubit(reg, 0, flip)
    assert out.amplitudes[2] == 1.0  # |10>
    out2 = apply_one_qubit(reg, 1, flip)
    assert out2.amplitudes[1] == 1.0  # |01>
    with pytest.raises(IndexError):
        apply_one_qubit(reg, 5, flip)


def test_one_qubit_ops_on_different_qubits_commute():
    from nffdsim.gates import TwoLevelUnitary

    rng = np.random.default_rng(2)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(m)
    u = TwoLevelUnitary(q * (np.diag(r) / np.abs(np.diag(r))))
    h = hadamard()
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    reg = Register(amps / np.linalg.norm(amps), site_of=(0, 1, 2))
    a = apply_one_qubit(apply_one_qubit(reg, 0, u), 2, h)
    b = apply_one_qubit(apply_one_qubit(reg, 2, h), 0, u)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


# ---------------------------------------------------------------------------
# protocol


def independent_expected(bits, phase, pre_hadamard=True):
    """Protocol oracle on a 2-qubit register, built with raw kron algebra."""
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    state = np.zeros(4, dtype=complex)
    state[int(bits, 2)] = 1.0
    if pre_hadamard:
        state = np.kron(h, h) @ state
    return np.diag([1.0, np.exp(-1j * phase), 1.0, 1.0]) @ state


@pytest.mark.parametrize("scheme", [MANDEL, RAMAN_BASIS])
def test_protocol_output_matches_oracle(scheme):
    arr = square_array(scheme=scheme)
    reg = Register.from_bits("00", site_of=(0, 1))
    cp = CollisionParams(u_int=0.9, t_hold=1.3)
    out, trace = run_two_qubit_gate(reg, arr, 0, 1, cp)
    np.testing.assert_allclose(
        out.amplitudes, independent_expected("00", 0.9 * 1.3), atol=1e-14
    )
    trace.validate()


def test_protocol_without_hadamards_is_pure_phase():
    arr = square_array()
    cp = CollisionParams(u_int=math.pi, t_hold=1.0)
    for bits in ("00", "01", "10", "11"):
        reg = Register.from_bits(bits, site_of=(0, 3))
        out, _ = run_two_qubit_gate(reg, arr, 0, 1, cp, pre_hadamard=False)
        np.testing.assert_allclose(
            out.amplitudes, independent_expected(bits, math.pi, pre_hadamard=False),
            atol=1e-14,
        )


def test_zero_phase_protocol_undone_by_hadamards():
    arr = square_array()
    rng = np.random.default_rng(8)
    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    reg = Register(amps / np.linalg.norm(amps), site_of=(0, 2))
    out, _ = run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(3.0, 0.0))
    h = hadamard()
    restored = apply_one_qubit(apply_one_qubit(out, 0, h), 1, h)
    np.testing.assert_allclose(restored.amplitudes, reg.amplitudes, atol=1e-10)


def test_protocol_does_not_mutate_input():
    arr = square_array()
    reg = Register.from_bits("00", site_of=(0, 1))
    before = reg.amplitudes.copy()
    run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(1.0, 1.0))
    np.testing.assert_array_equal(reg.amplitudes, before)


def test_trace_has_six_ordered_steps_with_mirror_ramps():
    arr = square_array()
    reg = Register.from_bits("00", site_of=(0, 1))
    _, trace = run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(1.0, 2.0))
    assert [s.step for s in trace.steps] == [1, 2, 3, 4, 5, 6]
    fwd = trace.steps[3].params["ramps"]["axis"]
    rev = trace.steps[4].params["ramps"]["axis"]
    np.testing.assert_array_equal(rev.theta, fwd.theta[::-1])
    assert trace.steps[3].params["phase"] == pytest.approx(2.0)
    wire = trace.to_wire()
    assert len(wire["steps"]) == 6
    assert wire["steps"][3]["params"]["ramps"]["axis"]["t"][0] == 0.0


def test_spectators_untouched_even_in_superposition():
    arr = square_array(2, 2, 1.0)
    pair = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
    spectator = np.array([1.0, 1.0j]) / math.sqrt(2)
    full = np.kron(pair, spectator)
    reg = Register(full, site_of=(0, 3, 1))  # spectator at site 1
    out, _ = run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(math.pi, 1.0))

    def spectator_rho(amps):
        t = amps.reshape(2, 2, 2)
        return np.einsum("abi,abj->ij", t, t.conj())

    np.testing.assert_allclose(
        spectator_rho(out.amplitudes), spectator_rho(reg.amplitudes), atol=1e-10
    )


def test_protocol_precondition_errors_name_their_step():
    arr = square_array()
    reg = Register.from_bits("00", site_of=(0, 1))
    arr.trap_on[1] = False
    with pytest.raises(ProtocolError) as e2:
        run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(1.0, 1.0))
    assert e2.value.step == 2
    arr.trap_on[1] = True
    arr.screen_engaged = False
    with pytest.raises(ProtocolError) as e3:
        run_two_qubit_gate(reg, arr, 0, 1, CollisionParams(1.0, 1.0))
    assert e3.value.step == 3


def test_protocol_rejects_degenerate_qubits_and_bad_sites():
    arr = square_array()
    reg = Register.from_bits("00", site_of=(0, 1))
    with pytest.raises(GeometryError):
        run_two_qubit_gate(reg, arr, 0, 0, CollisionParams(1.0, 1.0))
    with pytest.raises(IndexError):
        run_two_qubit_gate(reg, arr, 0, 5, CollisionParams(1.0, 1.0))
    reg2 = Register.from_bits("00", site_of=(0, 9))
    with pytest.raises(ValueError):
        run_two_qubit_gate(reg2, arr, 0, 1, CollisionParams(1.0, 1.0))


# ---------------------------------------------------------------------------
# parallel execution and scheduling


def test_parallel_gates_on_disjoint_rows():
    arr = square_array(2, 2, 1.0)
    reg = Register.from_bits("0000", site_of=(0, 1, 2, 3))
    out, traces = run_parallel_gates(
        reg, arr, [(0, 1), (2, 3)], CollisionParams(math.pi, 1.0)
    )
    assert len(traces) == 2
    expected = np.kron(
        independent_expected("00", math.pi), independent_expected("00", math.pi)
    )
    np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)


def test_parallel_gates_reject_shared_line():
    arr = square_array(2, 3, 1.0)
    reg = Register.from_bits("0000", site_of=(0, 1, 2, 4))
    # (0,1) drives row 0; sites (2,4) differ in row and column, so that gate
    # drives the row of site 2, which is row 0 again
    with pytest.raises(SchedulingError):
        run_parallel_gates(reg, arr, [(0, 1), (2, 3)], CollisionParams(1.0, 1.0))
    # two column pairs on different columns coexist
    reg2 = Register.from_bits("0000", site_of=(0, 3, 1, 4))
    out, traces = run_parallel_gates(reg2, arr, [(0, 1), (2, 3)], CollisionParams(1.0, 1.0))
    assert len(traces) == 2


def test_radial_allows_only_one_simultaneous_pair():
    arr = radial_array(4, 2, 1.0)
    reg = Register.from_bits("0000", site_of=(0, 2, 4, 6))
    with pytest.raises(SchedulingError):
        run_parallel_gates(reg, arr, [(0, 1), (2, 3)], CollisionParams(1.0, 1.0))
    # a single pair runs fine
    out, traces = run_parallel_gates(reg, arr, [(0, 1)], CollisionParams(1.0, 1.0))
    assert len(traces) == 1


def test_schedule_parallel_separates_row_conflicts():
    arr = square_array(2, 3, 1.0)
    # both pairs on row 0 must land in different batches
    batches = schedule_parallel(arr, [(0, 1), (1, 2), (3, 4)])
    assert batches[0] == [(0, 1), (3, 4)] or batches[0] == [(0, 1)]
    flat = [p for b in batches for p in b]
    assert sorted(flat) == sorted([(0, 1), (1, 2), (3, 4)])
    for batch in batches:
        keys_seen = set()
        for (i, j) in batch:
            from nffdsim.machine import _pair_geometry

            keys = _pair_geometry(arr, i, j).keys
            assert not (keys_seen & keys)
            keys_seen |= keys


def test_schedule_parallel_radial_is_one_pair_per_batch():
    arr = radial_array(4, 2, 1.0)
    batches = schedule_parallel(arr, [(0, 2), (4, 6), (1, 3)])
    assert all(len(b) == 1 for b in batches)
    assert len(batches) == 3


def test_schedule_parallel_is_deterministic():
    arr = square_array(4, 4, 1.0)
    rng = np.random.default_rng(0)
    sites = rng.permutation(16)
    pairs = [(int(sites[2 * i]), int(sites[2 * i + 1])) for i in range(6)]
    assert schedule_parallel(arr, pairs) == schedule_parallel(arr, pairs)


# ---------------------------------------------------------------------------
# adiabaticity


def test_adiabatic_check():
    rep = adiabatic_check(trap_freq=100.0, ramp_time=1.0)
    assert rep.eta == pytest.approx(0.01)
    assert rep.adiabatic
    rep2 = adiabatic_check(trap_freq=2.0, ramp_time=1.0)
    assert not rep2.adiabatic
    assert adiabatic_check(2.0, 1.0, threshold=1.0).adiabatic
    with pytest.raises(ValueError):
        adiabatic_check(0.0, 1.0)
    with pytest.raises(ValueError):
        adiabatic_check(1.0, -2.0)
