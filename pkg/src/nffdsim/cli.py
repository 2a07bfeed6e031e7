"""Command-line client for the simulator service.

Every subcommand posts a JSON config to the service and writes the response
to disk (CSV or JSON).  By default the service runs in-process; --server
points the same commands at a remote instance.  Exit codes are a stable
contract: 0 success, 2 config error, 3 numerical failure, 4 protocol or
geometry violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

from .errors import ConfigError

_EXIT_BY_KIND = {"config": 2, "numerical": 3, "protocol": 4}
_EXIT_BY_STATUS = {422: 2, 500: 3, 409: 4}


def _fmt(x) -> str:
    return repr(float(x))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return cfg


def _make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    from .service import create_app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(args, endpoint: str, payload: dict):
    """POST to the service; on failure print the message and return exit code."""
    client = _make_client(args.server)
    try:
        resp = client.post(endpoint, json=payload)
    except Exception as exc:  # connection-level failure
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return None, 1
    finally:
        pass
    if resp.status_code == 200:
        return resp.json(), 0
    try:
        body = resp.json()
        kind = body.get("kind")
        message = body.get("message", body)
    except Exception:
        kind, message = None, resp.text
    code = _EXIT_BY_KIND.get(kind, _EXIT_BY_STATUS.get(resp.status_code, 1))
    print(f"error ({kind or resp.status_code}): {message}", file=sys.stderr)
    return None, code


def _out_path(args, stem: str, suffix: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(f"{stem}.{suffix}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_trap_scan(args) -> int:
    payload = _load_config(args.config)
    if args.tol is not None:
        payload["tol"] = args.tol
    body, code = _post(args, "/trap/scan", payload)
    if body is None:
        return code
    path = _out_path(args, "trap_scan", args.format)
    if args.format == "csv":
        rows = [
            [_fmt(r["a"]), _fmt(r["z_min"]), _fmt(r["depth_over_u0"])]
            for r in body["rows"]
        ]
        _atomic_write(path, _csv_text(["a", "z_min", "depth_over_u0"], rows))
    else:
        _atomic_write(path, _json_text(body))
    print(f"wrote {path}")
    return 0


def cmd_axial_profile(args) -> int:
    payload = _load_config(args.config)
    if args.tol is not None:
        payload["tol"] = args.tol
    body, code = _post(args, "/trap/axial-profile", payload)
    if body is None:
        return code
    path = _out_path(args, "axial_profile", args.format)
    if args.format == "csv":
        rows = [[_fmt(z), _fmt(u)] for z, u in zip(body["z"], body["u_over_u0"])]
        _atomic_write(path, _csv_text(["z", "u_over_u0"], rows))
    else:
        _atomic_write(path, _json_text(body))
    print(f"wrote {path}")
    return 0


def cmd_potential_map(args) -> int:
    payload = _load_config(args.config)
    if args.tol is not None:
        payload["tol"] = args.tol
    body, code = _post(args, "/trap/map", payload)
    if body is None:
        return code
    path = _out_path(args, "potential_map", args.format)
    if args.format == "csv":
        rows = []
        for i, r in enumerate(body["r"]):
            for j, z in enumerate(body["z"]):
                rows.append([_fmt(r), _fmt(z), _fmt(body["u_over_u0"][i][j])])
        _atomic_write(path, _csv_text(["r", "z", "u_over_u0"], rows))
    else:
        _atomic_write(path, _json_text(body))
    print(f"wrote {path}")
    return 0


def cmd_transport(args) -> int:
    payload = _load_config(args.config)
    body, code = _post(args, "/lattice/transport", payload)
    if body is None:
        return code
    path = _out_path(args, "transport", args.format)
    if args.format == "csv":
        rows = [
            [_fmt(t), _fmt(th), _fmt(x0), _fmt(x1)]
            for t, th, x0, x1 in zip(body["t"], body["theta"], body["x0"], body["x1"])
        ]
        _atomic_write(path, _csv_text(["t", "theta", "x0", "x1"], rows))
    else:
        _atomic_write(path, _json_text(body))
    print(f"wrote {path}")
    return 0


def cmd_protocol_run(args) -> int:
    payload = _load_config(args.config)
    body, code = _post(args, "/protocol/run", payload)
    if body is None:
        return code
    path = _out_path(args, "protocol_run", "json" if args.format == "json" else "csv")
    trace_doc = {"schema_version": body["schema_version"], "traces": body["traces"]}
    if args.format == "csv":
        rows = []
        for g, trace in enumerate(body["traces"]):
            for s in trace["steps"]:
                rows.append([str(g), str(s["step"]), s["description"], s["outcome"]])
        _atomic_write(path, _csv_text(["gate", "step", "description", "outcome"], rows))
    else:
        _atomic_write(path, _json_text(trace_doc))
    state_path = path.with_name(path.stem + ".state.json")
    state_doc = {
        "schema_version": body["schema_version"],
        "final_state": body["final_state"],
    }
    _atomic_write(state_path, _json_text(state_doc))
    for res in body["pair_results"]:
        print(f"concurrence {res['concurrence']:.6f}")
    print(f"wrote {path} and {state_path}")
    return 0


def cmd_schedule(args) -> int:
    payload = _load_config(args.config)
    body, code = _post(args, "/schedule/parallel", payload)
    if body is None:
        return code
    path = _out_path(args, "schedule", args.format)
    if args.format == "csv":
        rows = []
        for b, batch in enumerate(body["batches"]):
            for (i, j) in batch:
                rows.append([str(b), str(i), str(j)])
        _atomic_write(path, _csv_text(["batch", "site_i", "site_j"], rows))
    else:
        _atomic_write(path, _json_text(body))
    print(f"wrote {path}")
    return 0


def cmd_selftest(args) -> int:
    payload = _load_config(args.config)
    if args.seed is not None:
        payload["seed"] = args.seed
    body, code = _post(args, "/selftest", payload)
    if body is None:
        return code
    for check in body["checks"]:
        tag = "PASS" if check["passed"] else "FAIL"
        detail = f" {check['detail']}" if check["detail"] else ""
        print(f"{tag} {check['name']}{detail}")
    print(f"selftest: {body['passed']} passed, {body['failed']} failed")
    if args.out:
        _atomic_write(Path(args.out), _json_text(body))
    return 0 if body["failed"] == 0 else 3


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nffdsim",
        description="Diffraction-trap and collision-gate simulator client",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol", type=float, help="quadrature tolerance override")
        p.add_argument("--seed", type=int, help="seed for randomized checks")
        p.add_argument("--server", help="service URL (default: in-process)")
        p.set_defaults(fn=fn)
        return p

    add("trap-scan", cmd_trap_scan, "locate trap minima for a list of aperture radii")
    add("axial-profile", cmd_axial_profile, "on-axis potential profile behind one aperture")
    add("potential-map", cmd_potential_map, "potential on an (r, z) grid")
    add("transport", cmd_transport, "state-dependent transport trajectories for a ramp")
    add("protocol-run", cmd_protocol_run, "run the six-step collision gate protocol")
    add("schedule", cmd_schedule, "partition gate pairs into parallel batches")
    p_self = add("selftest", cmd_selftest, "run the built-in invariant battery")
    p_self.set_defaults(format="json")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
