"""Command-line entry point: ``diagmod run`` and ``diagmod explain``.

Exit codes: 0 every verdict passed, 1 some verdict failed, 2 input error,
3 an oracle disagreed with the engine.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .errors import DiagmodError, OracleDisagreement
from .manifest import Manifest, Workspace, load
from .tasks import DEFAULT_RESOLUTION_LENGTH, DEFAULT_TRUNCATION_BOUND, Settings, run_task

REPORT_SCHEMA = "diagmod-report/1"
EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_ORACLE = 0, 1, 2, 3


def _settings(args: argparse.Namespace) -> Settings:
    return Settings(resolution_length=args.resolution_length, truncation_bound=args.truncation_bound,
                    oracle=args.oracle)


def _timed(ws: Workspace, task: dict, settings: Settings):
    t0 = time.perf_counter()
    try:
        out = run_task(ws, task, settings)
    except DiagmodError as exc:
        out = exc
    return out, time.perf_counter() - t0


def run_manifest(manifest: Manifest, settings: Settings, *, only: str | None = None,
                 timing: bool = False, jobs: int = 1) -> tuple[dict, int, dict]:
    """Run tasks and assemble the report in declaration order.

    Returns ``(report, exit code, traces)``.  Manifest-level errors propagate;
    the first task error (in declaration order) ends the report and is
    recorded against that task's id.  With ``jobs > 1`` tasks run on a
    thread pool over the already-built, read-only workspace.
    """
    ws = Workspace(manifest)
    tasks = [manifest.task(only)] if only is not None else manifest.tasks
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda t: _timed(ws, t, settings), tasks))
    else:
        outcomes = []
        for task in tasks:
            outcomes.append(_timed(ws, task, settings))
            if isinstance(outcomes[-1][0], DiagmodError):
                break
    entries, traces, code = [], {}, EXIT_PASS
    for task, (out, seconds) in zip(tasks, outcomes):
        entry = {"id": task["id"], "op": task["op"]}
        if isinstance(out, OracleDisagreement):
            entry.update(status="oracle-disagreement", error=str(out))
            entries.append(entry)
            code = EXIT_ORACLE
            break
        if isinstance(out, DiagmodError):
            entry.update(status="error", error=f"{type(out).__name__}: {out}")
            entries.append(entry)
            code = EXIT_INPUT
            break
        if out.verdict is None:
            status = "info"
        else:
            status = "pass" if out.verdict else "fail"
            if not out.verdict:
                code = max(code, EXIT_FAIL)
        entry.update(status=status, verdict=out.verdict, result=out.result)
        if timing:
            entry["seconds"] = round(seconds, 4)
        entries.append(entry)
        traces[task["id"]] = out.trace
    report = {
        "schema": REPORT_SCHEMA,
        "engine": __version__,
        "settings": {"resolution_length": settings.resolution_length,
                     "truncation_bound": settings.truncation_bound, "oracle": settings.oracle},
        "validated_diagrams": sorted(ws.validation),
        "tasks": entries,
        "exit_code": code,
    }
    return report, code, traces


def _summary(entry: dict) -> str:
    if "error" in entry:
        return entry["error"]
    res = entry.get("result", {})
    for key in ("homology", "tor", "cokernel", "holim", "values"):
        if key in res:
            return f"{key}={json.dumps(res[key], sort_keys=True)}"
    return ""


def format_text(report: dict) -> str:
    lines = []
    for e in report["tasks"]:
        lines.append(f"[{e['status'].upper():>4}] {e['id']} ({e['op']}) {_summary(e)}".rstrip())
    passed = sum(e["status"] in ("pass", "info") for e in report["tasks"])
    lines.append(f"{passed}/{len(report['tasks'])} tasks ok, exit code {report['exit_code']}")
    return "\n".join(lines)


def _error(exc: Exception) -> int:
    print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_INPUT


def cmd_run(args: argparse.Namespace) -> int:
    try:
        manifest = load(args.manifest)
        report, code, _ = run_manifest(manifest, _settings(args), timing=args.timing, jobs=args.jobs)
    except OracleDisagreement as exc:
        print(f"oracle disagreement: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except DiagmodError as exc:
        return _error(exc)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(format_text(report))
    return code


def cmd_explain(args: argparse.Namespace) -> int:
    try:
        manifest = load(args.manifest)
        report, code, traces = run_manifest(manifest, _settings(args), only=args.task_id)
    except OracleDisagreement as exc:
        print(f"oracle disagreement: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except DiagmodError as exc:
        return _error(exc)
    task = manifest.task(args.task_id)
    entry = report["tasks"][0]
    print(f"task {task['id']}: op {task['op']}")
    print(f"args: {json.dumps(task['args'], sort_keys=True)}")
    if task["options"]:
        print(f"options: {json.dumps(task['options'], sort_keys=True)}")
    print(f"status: {entry['status']}")
    if "error" in entry:
        print(entry["error"])
    for line in traces.get(task["id"], []):
        print(line)
    if "result" in entry:
        print("result:")
        print(json.dumps(entry["result"], indent=2, sort_keys=True))
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diagmod", description="Exact checks for module diagrams over rings Z[S^-1]/(n).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("manifest", help="YAML manifest path")
        p.add_argument("--oracle", action="store_true", help="run the brute-force truncation oracle next to fracture checks")
        p.add_argument("--resolution-length", type=int, default=DEFAULT_RESOLUTION_LENGTH, metavar="N",
                       help="free resolution length for derived checks (default %(default)s)")
        p.add_argument("--truncation-bound", type=int, default=DEFAULT_TRUNCATION_BOUND, metavar="B",
                       help="denominator bound for the truncation oracle (default %(default)s)")

    run = sub.add_parser("run", help="run every task in declaration order")
    common(run)
    run.add_argument("--json", action="store_true", help="print the JSON report")
    run.add_argument("--timing", action="store_true", help="add per-task wall time (makes the report nondeterministic)")
    run.add_argument("--jobs", type=int, default=1, metavar="J", help="run tasks on J threads; the report is unchanged")
    run.set_defaults(func=cmd_run)

    explain = sub.add_parser("explain", help="show the computation behind one task")
    common(explain)
    explain.add_argument("task_id", help="id of the task to explain")
    explain.set_defaults(func=cmd_explain)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.resolution_length < 1 or args.truncation_bound < 1:
        print("error: --resolution-length and --truncation-bound must be positive", file=sys.stderr)
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
