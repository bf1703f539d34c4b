"""Command-line client for the task runner.

    sigmaflow <task> --config <path> [--out <dir>] [--seed <u64>] [--tag <name>]
    sigmaflow serve [--host H] [--port P]

Exit codes: 0 all checks passed, 1 some check failed, 2 configuration error.
Tasks run in-process by default; --server posts the run to a running service
instead.
"""

import argparse
import json
import sys
import urllib.request

from .config import ConfigError, RunConfig, parse_config
from .tasks import TASKS, run_task


def _build_parser():
    parser = argparse.ArgumentParser(prog="sigmaflow")
    sub = parser.add_subparsers(dest="command", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} suite")
        p.add_argument("--config", help="JSON config file (defaults apply if omitted)")
        p.add_argument("--out", help="output root (default: $SIGMAFLOW_OUT or ./out)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--tag", help="run directory name (default: config digest)")
        p.add_argument("--server", help="POST the run to a sigmaflow service URL")
    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _remote_run(server, task, cfg, seed, tag):
    payload = {"config": cfg.model_dump()}
    if seed is not None:
        payload["seed"] = seed
    if tag is not None:
        payload["tag"] = tag
    req = urllib.request.Request(
        f"{server.rstrip('/')}/tasks/{task}",
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req) as resp:
        return json.loads(resp.read().decode())["report"]


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "serve":
        import uvicorn

        uvicorn.run("sigmaflow.service:app", host=args.host, port=args.port)
        return 0

    try:
        cfg = parse_config(args.config) if args.config else RunConfig()
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2

    if args.server:
        report = _remote_run(args.server, args.command, cfg, args.seed, args.tag)
        passed = report["passed"]
        checks = report["checks"]
    else:
        report_obj, run_dir = run_task(cfg, args.command, out_dir=args.out,
                                       seed=args.seed, tag=args.tag)
        print(f"run directory: {run_dir}")
        passed = report_obj.passed
        checks = [row.model_dump() for row in report_obj.checks]

    for row in checks:
        status = "PASS" if row["passed"] else "FAIL"
        tol = row["tolerance"]
        bound = f" (tol {tol:g})" if tol is not None else ""
        print(f"[{status}] {row['check']}: {row['value']:.3e}{bound}")
        if row.get("error"):
            print(f"        error: {row['error']}")
    print("all checks passed" if passed else "some checks FAILED")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
