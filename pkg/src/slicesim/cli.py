"""Command-line client for the slicesim service.

Requests go to an in-process copy of the app unless ``--url`` points at a
running server (start one with ``slicesim serve``).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .report import write_tables
from .scenario import bundled_path


def _client(url: str | None):
    if url:
        return httpx.Client(base_url=url, timeout=None)
    import warnings

    from .service import app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    return TestClient(app)


def _scenario_body(spec: str) -> dict:
    p = Path(spec)
    if p.exists():
        return {"scenario": p.read_text()}
    if bundled_path(spec) is not None:
        return {"scenario_name": spec}
    raise SystemExit(f"error: scenario file not found: {spec}")


def _post(client, route, body):
    resp = client.post(route, json=body)
    if resp.status_code != 200:
        try:
            detail = resp.json()
            msg = detail.get("detail", detail)
        except ValueError:
            msg = resp.text
        raise SystemExit(f"error: {msg}")
    return resp


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text)


def cmd_simulate(args, client):
    body = _scenario_body(args.scenario) | {"algo": args.algo, "seed": args.seed}
    text = _post(client, "/simulate", body).text
    _write(args.out, text)
    if args.csv_dir:
        files = _post(client, "/plot-data", {"reports": [json.loads(text)]}).json()["files"]
        write_tables(files, args.csv_dir)
    report = json.loads(text)
    print(f"{report['algo']} seed={report['seed']} completed={report['total_completed']}", file=sys.stderr)


def cmd_compare(args, client):
    body = _scenario_body(args.scenario) | {
        "algos": args.algos, "seeds": args.seeds, "include_runs": bool(args.out_dir)}
    data = _post(client, "/compare", body).json()
    print(data["table"])
    for name, pct in sorted(data["summary"]["ratios"].items()):
        if name.startswith(args.algos[0] + "/"):
            print(f"{name}: {pct:+.1f}%")
    if args.out_dir:
        out = Path(args.out_dir)
        write_tables(data["plot_data"], out)
        (out / "summary.json").write_text(json.dumps(data["summary"], indent=1, sort_keys=True))
        for key, rep in data["runs"].items():
            algo, seed = key.split("/")
            run_dir = out / f"{algo.replace('#', '_')}_seed{seed}"
            files = _post(client, "/plot-data", {"reports": [rep]}).json()["files"]
            write_tables(files, run_dir)


def cmd_oracle(args, client):
    if Path(args.instance).exists():
        text = Path(args.instance).read_text()
    elif bundled_path(args.instance) is not None:
        text = bundled_path(args.instance).read_text()
    else:
        raise SystemExit(f"error: instance file not found: {args.instance}")
    data = _post(client, "/oracle", {"instance": text, "max_ues": args.max_ues,
                                     "max_upfs": args.max_upfs}).json()
    print("X* =")
    for row in data["matrix"]:
        print("  " + " ".join(str(v) for v in row))
    print("UE -> UPF: " + ", ".join(f"{i + 1}->{j}" for i, j in enumerate(data["choices"])))
    print(f"F* = {data['value']:.12g}")


def cmd_emit_plots(args, client):
    data = json.loads(Path(args.input).read_text())
    reports = list(data["runs"].values()) if "runs" in data else [data]
    files = _post(client, "/plot-data", {"reports": reports}).json()["files"]
    for p in write_tables(files, args.out):
        print(p)


def cmd_serve(args, client=None):
    import uvicorn

    uvicorn.run("slicesim.service:app", host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicesim", description=__doc__.splitlines()[0])
    parser.add_argument("--url", help="base URL of a running slicesim server")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one algorithm on a scenario")
    p.add_argument("--scenario", required=True, help="scenario file or bundled name")
    p.add_argument("--algo", default="dansm", choices=["dansm", "mga", "ffd", "bfd"])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default="-", help="report JSON path (default stdout)")
    p.add_argument("--csv-dir", help="also write plot CSVs here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="run several algorithms over shared seeds")
    p.add_argument("--scenario", required=True)
    p.add_argument("--algos", nargs="+", default=["dansm", "mga", "ffd", "bfd"],
                   choices=["dansm", "mga", "ffd", "bfd"])
    p.add_argument("--seeds", nargs="+", type=int, default=[1])
    p.add_argument("--out-dir", help="write summary.json, merged and per-run CSVs")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle", help="exact optimum of a small static instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--max-ues", type=int, default=8)
    p.add_argument("--max-upfs", type=int, default=6)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("emit-plots", help="write plot CSVs from a report or compare output")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_emit_plots)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        cmd_serve(args)
        return 0
    with _client(args.url) as client:
        args.func(args, client)
    return 0


if __name__ == "__main__":
    sys.exit(main())
