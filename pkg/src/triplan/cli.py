"""Command line entry points: plan one session, benchmark a query directory,
generate a synthetic dataset, or serve the session API."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .csp import InvalidQuery, StructuredQuery, query_from_dict
from .datagen import generate_dataset
from .domains import domains_from_sandbox
from .constraints import build_constraints
from .csp import CspInstance, variable_set
from .metrics import aggregate, failure_breakdown, render_report, score_plan
from .orchestrator import (
    OrchestratorConfig,
    TurnInput,
    patch_from_dict,
    run_session,
)
from .sandbox import MissingFile, SchemaError, load_dataset


def _config(args: argparse.Namespace) -> OrchestratorConfig:
    return OrchestratorConfig(k=args.k, l=args.l, tool_budget=args.tool_budget)


def _load_turns(path: Path) -> list[TurnInput]:
    data = json.loads(path.read_text())
    if isinstance(data, dict) and "turns" in data:
        turns: list[TurnInput] = []
        for item in data["turns"]:
            if "patches" in item:
                turns.append([patch_from_dict(p) for p in item["patches"]])
            else:
                turns.append(query_from_dict(item.get("query", item)))
        return turns
    return [query_from_dict(data)]


def _ground_instance(sb, q: StructuredQuery) -> CspInstance:
    domains = domains_from_sandbox(sb)
    return CspInstance(variable_set(q), domains, build_constraints(q, domains), q)


def cmd_plan(args: argparse.Namespace) -> int:
    sb = load_dataset(args.data)
    turns = _load_turns(Path(args.query))
    trajectory = run_session(sb, turns, _config(args))
    result = trajectory.final_result
    print(json.dumps(result.plan, indent=2))
    print(f"verdict: {result.verdict}", file=sys.stdout)
    if result.violations:
        for line in result.violations:
            print(line)
    if args.trace:
        for line in result.trace:
            print(line, file=sys.stderr)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    sb = load_dataset(args.data)
    files = sorted(Path(args.queries).glob("*.json"))
    if not files:
        print(f"no query files in {args.queries}", file=sys.stderr)
        return 2
    outcomes = []
    for path in files:
        turns = _load_turns(path)
        trajectory = run_session(sb, turns, _config(args))
        final_q = trajectory.queries[-1]
        outcomes.append(score_plan(trajectory.final_plan, _ground_instance(sb, final_q)))
    print(render_report(aggregate(outcomes)))
    if args.breakdown:
        for cid, count in sorted(failure_breakdown(outcomes).items()):
            print(f"{cid}: {count}")
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    manifest = generate_dataset(args.seed, args.cities, args.out)
    print(json.dumps(manifest, indent=2))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(load_dataset(args.data), state_dir=args.state_dir,
                     ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="triplan",
                                     description="constraint-aware travel planning")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_loop_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--k", type=int, default=3, help="max check steps per search step")
        p.add_argument("--l", type=int, default=10, help="max interleaved search steps")
        p.add_argument("--tool-budget", type=int, default=120)

    p_plan = sub.add_parser("plan", help="run one session from a query file")
    p_plan.add_argument("--query", required=True)
    p_plan.add_argument("--data", required=True)
    p_plan.add_argument("--trace", action="store_true")
    add_loop_args(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_bench = sub.add_parser("bench", help="score a directory of query files")
    p_bench.add_argument("--queries", required=True)
    p_bench.add_argument("--data", required=True)
    p_bench.add_argument("--breakdown", action="store_true")
    add_loop_args(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_gen = sub.add_parser("gen", help="emit a synthetic dataset")
    p_gen.add_argument("--seed", type=int, default=7)
    p_gen.add_argument("--cities", type=int, default=6)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_serve = sub.add_parser("serve", help="start the session service")
    p_serve.add_argument("--data", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--state-dir", default=None)
    p_serve.add_argument("--ui", default=None,
                         help="directory with the built frontend (served at /ui)")
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MissingFile, SchemaError, InvalidQuery, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
