"""expcli: thin command-line client for the aggregation service.

Subcommands build HTTP requests against the FastAPI app.  By default they
talk to an in-process instance (no server needed); pass ``--server URL`` to
target a running one, or use ``expcli serve`` to start it.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .experiment import ExperimentReport, emit_report


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        # This starlette release warns about its own in-process test client;
        # the replacement transport it suggests is not packaged yet.
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _fail_on_error(response: httpx.Response) -> dict:
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        sys.exit(f"error: {detail}")
    return response.json()


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        sys.exit(f"error: cannot read {path}: {exc}")
    except ValueError as exc:
        sys.exit(f"error: {path} is not valid JSON: {exc}")


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_json(args.config)
    base_dir = Path(args.config).parent
    population = config.get("population")
    if population is None:
        sys.exit("error: config is missing 'population'")
    if isinstance(population, str):
        pop_path = Path(population)
        if not pop_path.is_absolute():
            pop_path = base_dir / pop_path
        population = _load_json(str(pop_path))

    request = {
        "population": population,
        "dataset_size": args.dataset_size or config.get("dataset_size", 2048),
        "seeds": list(args.seed) if args.seed else config.get("seeds", [0]),
        "prompt_id": config.get("prompt_id", "prompt-0"),
    }
    methods = args.methods.split(",") if args.methods else config.get("methods")
    if methods:
        request["methods"] = methods
    for key in ("prompt_text", "spo", "btl"):
        if key in config:
            request[key] = config[key]

    with _client(args.server) as client:
        data = _fail_on_error(client.post("/experiments/run", json=request))

    out_dir = args.out or config.get("output_dir")
    if out_dir:
        report = ExperimentReport.from_dict(data)
        manifest = emit_report(report, out_dir)
        for name, digest in manifest:
            print(f"{digest}  {Path(out_dir) / name}")
    else:
        json.dump(data, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def _cmd_compare_iia(args: argparse.Namespace) -> int:
    request = {
        "small": _load_json(args.small),
        "large": _load_json(args.large),
        "shared": args.shared.split(","),
    }
    with _client(args.server) as client:
        data = _fail_on_error(client.post("/experiments/compare-iia", json=request))
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    request = {"profile": _load_json(args.profile)}
    with _client(args.server) as client:
        data = _fail_on_error(client.post("/solve", json=request))
    json.dump(data, sys.stdout, indent=2, sort_keys=True)
    print()
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("maxlot.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expcli",
        description="Run preference-aggregation experiments and solve margin games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a config file")
    run.add_argument("--config", required=True, help="experiment config JSON")
    run.add_argument(
        "--seed", type=int, action="append", help="seed to run (repeatable; overrides config)"
    )
    run.add_argument("--out", help="directory for report.json, counts, traces, manifest")
    run.add_argument("--methods", help="comma-separated methods (overrides config)")
    run.add_argument("--dataset-size", type=int, help="records to sample per seed")
    run.add_argument("--server", help="base URL of a running service")
    run.set_defaults(func=_cmd_run)

    cmp_p = sub.add_parser("compare-iia", help="compare two reports on shared alternatives")
    cmp_p.add_argument("--small", required=True, help="report.json of the smaller menu")
    cmp_p.add_argument("--large", required=True, help="report.json of the larger menu")
    cmp_p.add_argument("--shared", required=True, help="comma-separated shared labels")
    cmp_p.add_argument("--server", help="base URL of a running service")
    cmp_p.set_defaults(func=_cmd_compare_iia)

    solve = sub.add_parser("solve", help="exact maximal lottery of a population file")
    solve.add_argument("--profile", required=True, help="population profile JSON")
    solve.add_argument("--server", help="base URL of a running service")
    solve.set_defaults(func=_cmd_solve)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
