"""Service endpoint tests via the in-process test client."""

import math

import numpy as np
import pytest
from starlette.testclient import TestClient

from nffdsim.service import create_app

K = 2.0 * math.pi


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


def square_payload(**overrides):
    cfg = {
        "layout": "square",
        "rows": 2,
        "cols": 2,
        "pitch": 1.0,
        "lattice": {"depth": 1.0, "k_lat": K, "scheme": "RAMAN_BASIS"},
    }
    cfg.update(overrides)
    return cfg


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_trap_scan_endpoint(client):
    r = client.post("/trap/scan", json={"radii": [1.0]})
    assert r.status_code == 200
    row = r.json()["rows"][0]
    assert 0.5 <= row["z_min"] <= 1.6
    assert row["depth_over_u0"] < 0


def test_trap_scan_rejects_small_radius(client):
    r = client.post("/trap/scan", json={"radii": [0.4]})
    assert r.status_code == 422
    assert r.json()["kind"] == "config"


def test_trap_scan_rejects_empty_and_unknown_fields(client):
    assert client.post("/trap/scan", json={"radii": []}).status_code == 422
    assert client.post("/trap/scan", json={"radii": [1.0], "bogus": 1}).status_code == 422


def test_axial_profile_endpoint(client):
    r = client.post(
        "/trap/axial-profile", json={"radius": 1.0, "z_lo": 0.3, "z_hi": 3.0, "n": 40}
    )
    assert r.status_code == 200
    body = r.json()
    assert len(body["z"]) == 40
    assert all(u <= 0 for u in body["u_over_u0"])


def test_potential_map_endpoint(client):
    r = client.post(
        "/trap/map",
        json={"radius": 1.0, "r_min": -1.0, "r_max": 1.0, "n_r": 5, "z_min": 0.5, "z_max": 1.5, "n_z": 4},
    )
    assert r.status_code == 200
    body = r.json()
    assert len(body["u_over_u0"]) == 5
    assert len(body["u_over_u0"][0]) == 4
    # mirror symmetry of the first and last r rows
    np.testing.assert_allclose(body["u_over_u0"][0], body["u_over_u0"][-1], rtol=1e-9)


def test_transport_endpoint_mirror_components(client):
    r = client.post(
        "/lattice/transport",
        json={"scheme": "RAMAN_BASIS", "theta_stop": 1.2, "n_samples": 129},
    )
    assert r.status_code == 200
    body = r.json()
    np.testing.assert_allclose(body["x0"], [-x for x in body["x1"]], atol=1e-9)


def test_transport_rejects_bad_start(client):
    r = client.post("/lattice/transport", json={"x0_start": 0.123})
    assert r.status_code == 422
    assert r.json()["kind"] == "config"


def test_protocol_run_single_pair(client):
    r = client.post(
        "/protocol/run",
        json={"array": square_payload(), "pairs": [[0, 1]], "u_int": math.pi, "t_hold": 1.0},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["pair_results"][0]["concurrence"] == pytest.approx(1.0, abs=1e-9)
    amps = [complex(re, im) for re, im in body["final_state"]["amplitudes"]]
    expected = 0.5 * np.array([1.0, np.exp(-1j * math.pi), 1.0, 1.0])
    np.testing.assert_allclose(amps, expected, atol=1e-12)
    steps = body["traces"][0]["steps"]
    assert [s["step"] for s in steps] == [1, 2, 3, 4, 5, 6]


def test_protocol_run_with_spectator(client):
    r = client.post(
        "/protocol/run",
        json={
            "array": square_payload(),
            "pairs": [[0, 3]],
            "spectator_sites": [1],
            "initial": "001",
        },
    )
    assert r.status_code == 200
    body = r.json()
    assert body["final_state"]["site_of"] == [0, 3, 1]


def test_protocol_run_radial_two_pairs_is_protocol_error(client):
    payload = {
        "array": {
            "layout": "radial",
            "arms": 4,
            "sites_per_arm": 1,
            "pitch": 1.0,
            "lattice": {"depth": 1.0, "k_lat": K, "scheme": "RAMAN_BASIS"},
        },
        "pairs": [[0, 1], [2, 3]],
    }
    r = client.post("/protocol/run", json=payload)
    assert r.status_code == 409
    assert r.json()["kind"] == "protocol"


def test_protocol_run_shared_site_rejected(client):
    r = client.post(
        "/protocol/run", json={"array": square_payload(), "pairs": [[0, 1], [1, 2]]}
    )
    assert r.status_code == 409


def test_protocol_run_bad_initial_is_config_error(client):
    r = client.post(
        "/protocol/run",
        json={"array": square_payload(), "pairs": [[0, 1]], "initial": "0"},
    )
    assert r.status_code == 422
    assert r.json()["kind"] == "config"


def test_protocol_run_bad_pitch_is_protocol_error(client):
    r = client.post(
        "/protocol/run",
        json={"array": square_payload(pitch=0.77), "pairs": [[0, 1]]},
    )
    # pitch off the lattice grid is a geometry violation
    assert r.status_code in (409, 422)
    assert r.json()["kind"] in ("protocol", "config")


def test_schedule_endpoint(client):
    r = client.post(
        "/schedule/parallel",
        json={"array": square_payload(rows=3, cols=3), "pairs": [[0, 1], [3, 4], [1, 2]]},
    )
    assert r.status_code == 200
    batches = r.json()["batches"]
    flat = [tuple(p) for b in batches for p in b]
    assert sorted(flat) == [(0, 1), (1, 2), (3, 4)]


def test_selftest_endpoint(client):
    r = client.post("/selftest", json={"seed": 0})
    assert r.status_code == 200
    body = r.json()
    assert body["failed"] == 0
    assert body["passed"] == len(body["checks"]) > 0
