"""Command-line client of the simulation service.

Subcommands mirror the service endpoints (`cases`, `reference`, `converge`,
`smile`, `paths`, `samplepaths`); by default requests run against an
in-process instance of the app, `--server URL` targets a remote one, and
`serve` starts the service under uvicorn.  Results are written as the fixed
CSV record schema.

Exit codes: 0 success, 1 configuration error, 2 numerical failure while
computing reference values.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx

from .experiments import write_records, write_sample_paths
from .service.schemas import RecordOut

PAPER_SCALE_PATHS = 2_000_000


class _CliError(Exception):
    """User-facing CLI failure with its process exit code."""

    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # in-process transport: same HTTP surface, no socket
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette testclient deprecation chatter
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _CliError(f"config file line is not key=value: {line!r}")
        key, val = line.split("=", 1)
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_experiment_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--case", type=int, help="built-in case id (1, 2 or 3)")
    sub.add_argument("--params", help="explicit v0,a,b,c[,rho[,s0]]")
    sub.add_argument("--schemes", default="ivi", help="comma list: ivi,ivi_simple,qe,euler")
    sub.add_argument("--quantities", default="variance_swap",
                     help="comma list: variance_swap,vol_swap,laplace,call")
    sub.add_argument("--steps", default="1", help="comma list of step counts")
    sub.add_argument("--paths", dest="n_paths", type=int, default=200_000, help="sample paths per cell")
    sub.add_argument("--paper-scale", action="store_true",
                     help=f"use {PAPER_SCALE_PATHS} paths irrespective of --paths")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--T", dest="horizon", type=float, default=1.0, help="maturity")
    sub.add_argument("--strikes", default="0.8,1.0,1.2", help="comma list of moneyness strikes")
    sub.add_argument("--laplace-q", dest="laplace_q", type=float, default=1.0)
    sub.add_argument("--independent-seeds", action="store_true",
                     help="decouple scheme streams instead of common random numbers")
    sub.add_argument("--threads", type=int, help="worker threads (default: IVISIM_THREADS or auto)")
    sub.add_argument("--out", help="output CSV path (default: stdout)")
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--server", help="base URL of a running service (default: in-process)")


def _experiment_body(args: argparse.Namespace) -> dict:
    body: dict = {
        "schemes": [s.strip() for s in args.schemes.split(",") if s.strip()],
        "quantities": [q.strip() for q in args.quantities.split(",") if q.strip()],
        "steps": _parse_int_list(args.steps),
        "n_paths": PAPER_SCALE_PATHS if args.paper_scale else args.n_paths,
        "seed": args.seed,
        "horizon": args.horizon,
        "strikes": _parse_float_list(args.strikes),
        "laplace_q": args.laplace_q,
        "matched_seeds": not args.independent_seeds,
        "threads": args.threads,
    }
    if args.params:
        vals = _parse_float_list(args.params)
        if len(vals) < 4 or len(vals) > 6:
            raise _CliError("--params expects v0,a,b,c[,rho[,s0]]")
        keys = ["v0", "a", "b", "c", "rho", "s0"]
        body["params"] = dict(zip(keys, vals))
    else:
        body["case"] = args.case
    return body


def _post(client, endpoint: str, body: dict) -> dict:
    resp = client.post(endpoint, json=body)
    if resp.status_code in (400, 422):
        detail = resp.json().get("detail", resp.text)
        raise _CliError(f"configuration error: {detail}")
    resp.raise_for_status()
    return resp.json()


def _emit_records(payload: dict, out: str | None) -> int:
    records = [RecordOut(**r).to_record() for r in payload["records"]]
    if out:
        write_records(records, payload["seed"], out)
        print(f"wrote {len(records)} records to {out}", file=sys.stderr)
    else:
        write_records(records, payload["seed"], sys.stdout)
    if payload["numeric_failures"]:
        print(f"{payload['numeric_failures']} reference value(s) failed", file=sys.stderr)
        return 2
    return 0


def _apply_config_file(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    file_vals = _load_config_file(args.config)
    parser_defaults = {
        "case": None, "params": None, "schemes": "ivi", "quantities": "variance_swap",
        "steps": "1", "n_paths": 200_000, "seed": 1, "horizon": 1.0,
        "strikes": "0.8,1.0,1.2", "laplace_q": 1.0, "threads": None, "out": None,
        "path_counts": "10000,50000,100000,200000", "n_sample_paths": 5,
    }
    casts = {"case": int, "n_paths": int, "seed": int, "horizon": float,
             "laplace_q": float, "threads": int, "n_sample_paths": int}
    for key, raw in file_vals.items():
        if key == "T":
            key = "horizon"
        if not hasattr(args, key):
            raise _CliError(f"unknown config key {key!r}")
        # flags explicitly set on the command line win over the file
        if getattr(args, key) == parser_defaults.get(key, None):
            setattr(args, key, casts.get(key, str)(raw))


def main(argv: list[str] | None = None) -> int:
    try:
        return _run_command(argv)
    except _CliError as exc:
        print(exc, file=sys.stderr)
        return exc.code


def _run_command(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="ivisim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("cases", help="print the built-in parameter cases").add_argument(
        "--server", help="base URL of a running service"
    )

    for name, description in (
        ("reference", "analytics-only reference values"),
        ("converge", "error-vs-steps sweep against analytical references"),
        ("smile", "implied-volatility slice with per-strike errors"),
    ):
        p = sub.add_parser(name, help=description)
        _add_experiment_args(p)

    p_paths = sub.add_parser("paths", help="call-price stability sweep over path counts")
    _add_experiment_args(p_paths)
    p_paths.add_argument("--path-counts", dest="path_counts",
                         default="10000,50000,100000,200000", help="comma list of path counts")
    p_paths.set_defaults(steps="50", quantities="call")

    p_sp = sub.add_parser("samplepaths", help="export a few full sample paths")
    _add_experiment_args(p_sp)
    p_sp.add_argument("--n-sample-paths", dest="n_sample_paths", type=int, default=5)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    if args.command == "cases":
        with _client(args.server) as client:
            resp = client.get("/cases")
            resp.raise_for_status()
            for case in resp.json():
                print(
                    f"case {case['case']}: v0={case['v0']:g} a={case['a']:g} b={case['b']:g} "
                    f"c={case['c']:g} rho={case['rho']:g} s0={case['s0']:g}"
                )
        return 0

    _apply_config_file(args)
    if args.params is None and args.case is None:
        print("configuration error: provide --case or --params", file=sys.stderr)
        return 1

    body = _experiment_body(args)
    endpoint = {"reference": "/reference", "converge": "/converge", "smile": "/smile",
                "paths": "/paths", "samplepaths": "/samplepaths"}[args.command]
    if args.command == "paths":
        body["path_counts"] = _parse_int_list(args.path_counts)
    if args.command == "samplepaths":
        body["n_sample_paths"] = args.n_sample_paths

    with _client(args.server) as client:
        payload = _post(client, endpoint, body)

    if args.command == "samplepaths":
        rows = [
            (r["scheme"], r["case"], r["path"], r["t"], r["v"], r["u_cum"], r["z_cum"])
            for r in payload["rows"]
        ]
        if args.out:
            write_sample_paths(rows, payload["seed"], args.out)
            print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
        else:
            write_sample_paths(rows, payload["seed"], sys.stdout)
        return 0

    return _emit_records(payload, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
