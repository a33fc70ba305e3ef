"""Operator command line: validate scenarios, run headless simulations,
solve routing instances, replay recorded logs and serve the gateway.

Exit codes: 0 ok, 1 input error, 2 run failure, 3 infeasible instance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .gridworld.scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .messaging.discovery import NAMESERVER_NICKNAME, Nameserver, NdsStore
from .orders import roster_from_scenario
from .showcase import showcase_dict
from .solver import (
    BASELINE,
    COLLABORATIVE,
    Infeasible,
    Instance,
    InstanceTooLarge,
    solve_exact,
    solve_heuristic,
)
from .twin.engine import EngineSettings, RunEngine
from .twin.records import fold_frames
from .twin.store import RunStore, StoreError, read_frame_log

OK = 0
INPUT_ERROR = 1
RUN_FAILED = 2
INFEASIBLE = 3


def _load(scenario_arg: str) -> Scenario:
    if scenario_arg == "showcase":
        return parse_scenario(showcase_dict())
    return load_scenario(scenario_arg)


def _route_text(route: list[int]) -> str:
    return "->".join(str(marker) for marker in route)


def _plan_rows(plan_pre: dict, plan_post: dict) -> list[dict]:
    rows = []
    for truck in sorted(plan_post["tours"]):
        before = plan_pre["tours"][truck]
        after = plan_post["tours"][truck]
        rows.append(
            {
                "truck": truck,
                "route_before": before["route"],
                "route_after": after["route"],
                "blocks_before": before["blocks"],
                "blocks_after": after["blocks"],
            }
        )
    return rows


def _print_plan_table(rows: list[dict], pre_total: int, post_total: int, out=None) -> None:
    out = out if out is not None else sys.stdout
    print("truck | route before collaboration | route after collaboration | reduction", file=out)
    for row in rows:
        print(
            f"{row['truck']} | {_route_text(row['route_before'])} | "
            f"{_route_text(row['route_after'])} | "
            f"from {row['blocks_before']} to {row['blocks_after']} blocks",
            file=out,
        )
    relative = (pre_total - post_total) / pre_total if pre_total else 0.0
    print(
        f"total | {pre_total} blocks | {post_total} blocks | {relative:.1%} reduction",
        file=out,
    )


# -- run ------------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR

    # the launch sequence: gateway store, naming directory, nameserver,
    # then agent registration with every active non-truck agent ahead of
    # the trucks; the engine runs the world to completion afterwards
    runs_dir = Path(args.runs_dir) if args.runs_dir else None
    store = RunStore(runs_dir=runs_dir)
    nds = NdsStore(runs_dir / "nds.json" if runs_dir else None)
    nameserver = Nameserver()
    nds.put(NAMESERVER_NICKNAME, "local:nameserver")
    roster = roster_from_scenario(scenario)
    for spec in [s for s in roster if s.kind != "truck"] + [s for s in roster if s.kind == "truck"]:
        nameserver.register(spec.alias, f"local:{spec.alias}")

    digest = scenario.digest()
    run_id = f"run-{digest[:8]}-s{args.seed}"
    settings = EngineSettings(
        seed=args.seed,
        tick_delay_s=(1.0 / args.speed) if args.speed else 0.0,
        max_ticks=args.max_ticks,
    )
    try:
        store.create_run(scenario, run_id=run_id, seed=args.seed)
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    engine = RunEngine(scenario, store, run_id, settings)
    summary = engine.run()

    result = {
        "run_id": run_id,
        "status": summary["status"],
        "ticks": summary["ended_tick"],
        "reduction": summary["reduction"],
        "rows": _plan_rows(summary["plan_pre"], summary["plan_post"])
        if summary["plan_pre"] and summary["plan_post"]
        else [],
        "error": summary["error"],
    }
    if args.format == "json":
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        print(f"run {run_id}: {result['status']} after {result['ticks']} ticks")
        if result["rows"]:
            _print_plan_table(
                result["rows"],
                summary["reduction"]["pre_total"] if summary["reduction"] else 0,
                summary["reduction"]["post_total"] if summary["reduction"] else 0,
            )
        if runs_dir:
            print(f"logs: {runs_dir / run_id}")
        if result["error"]:
            print(f"error: {result['error']}", file=sys.stderr)
    return OK if summary["status"] == "completed" else RUN_FAILED


# -- solve ----------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    solver = solve_exact if args.exact else solve_heuristic
    try:
        plan_pre = solver(Instance.from_scenario(scenario, BASELINE))
        plan_post = solver(Instance.from_scenario(scenario, COLLABORATIVE))
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return INFEASIBLE
    except InstanceTooLarge as exc:
        print(f"error: {exc} (drop --exact to use the heuristic)", file=sys.stderr)
        return INPUT_ERROR

    from .twin.records import plan_view

    pre_view, post_view = plan_view(plan_pre), plan_view(plan_post)
    result = {
        "method": "exact" if args.exact else "heuristic",
        "pre_total": plan_pre.total_blocks,
        "post_total": plan_post.total_blocks,
        "relative_reduction": (
            (plan_pre.total_blocks - plan_post.total_blocks) / plan_pre.total_blocks
            if plan_pre.total_blocks
            else 0.0
        ),
        "rows": _plan_rows(pre_view, post_view),
    }
    if args.format == "json":
        print(json.dumps(result, indent=2, sort_keys=True))
    else:
        _print_plan_table(result["rows"], result["pre_total"], result["post_total"])
    return OK


# -- replay ---------------------------------------------------------------------


def cmd_replay(args: argparse.Namespace) -> int:
    log_path = Path(args.log)
    if log_path.is_dir():
        events_path = log_path / "events.ndjson"
        summary_path = log_path / "run.json"
    else:
        events_path = log_path
        summary_path = log_path.parent / "run.json"
    if not events_path.exists():
        print(f"error: no event log at {events_path}", file=sys.stderr)
        return INPUT_ERROR
    if not summary_path.exists():
        print(f"error: no run.json next to {events_path}", file=sys.stderr)
        return INPUT_ERROR
    try:
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
        scenario = parse_scenario(summary["scenario"])
    except (json.JSONDecodeError, KeyError, ScenarioError) as exc:
        print(f"error: bad run.json: {exc}", file=sys.stderr)
        return INPUT_ERROR
    try:
        frames = read_frame_log(events_path)
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    snapshot = fold_frames(scenario, frames)
    if args.format == "json":
        print(json.dumps(snapshot, indent=2, sort_keys=True))
    else:
        print(f"replayed {len(frames)} frames to tick {snapshot['tick']} ({snapshot['status']})")
        for alias, truck in snapshot["trucks"].items():
            print(f"{alias} | at {truck['at']} | {truck['phase']} | cargo {truck['cargo']}")
        print(f"deliveries: {len(snapshot['deliveries'])}")
        if snapshot["reduction"]:
            red = snapshot["reduction"]
            print(f"distance: from {red['pre_total']} to {red['post_total']} blocks")
    return OK


# -- validate / serve --------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        scenario = _load(args.scenario)
    except ScenarioError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return INPUT_ERROR
    print(f"ok: {len(scenario.depots)} depots, {len(scenario.customers)} customers, "
          f"digest {scenario.digest()[:12]}")
    return OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .twin.api import build_app

    runs_dir = Path(args.runs_dir) if args.runs_dir else None
    store = RunStore(runs_dir=runs_dir)
    nds = NdsStore(runs_dir / "nds.json" if runs_dir else None)
    frontend = Path(args.frontend) if args.frontend else None
    app = build_app(store=store, nds_store=nds, frontend_dir=frontend)
    host, _, port = args.address.rpartition(":")
    if not host or not port.isdigit():
        print(f"error: --address must be host:port, got {args.address!r}", file=sys.stderr)
        return INPUT_ERROR
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfleet",
        description="carrier-collaboration testbed: simulate, solve, replay, serve",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario headless to completion")
    run.add_argument("--scenario", required=True, help="scenario file or builtin name")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--speed", type=float, default=0.0, help="ticks per second, 0 = flat out")
    run.add_argument("--runs-dir", default="runs")
    run.add_argument("--max-ticks", type=int, default=10_000)
    run.add_argument("--format", choices=("table", "json"), default="table")
    run.set_defaults(func=cmd_run)

    solve = sub.add_parser("solve", help="solve the routing instance of a scenario")
    solve.add_argument("--scenario", required=True)
    method = solve.add_mutually_exclusive_group()
    method.add_argument("--exact", action="store_true", default=True)
    method.add_argument("--heuristic", dest="exact", action="store_false")
    solve.add_argument("--format", choices=("table", "json"), default="table")
    solve.set_defaults(func=cmd_solve)

    replay = sub.add_parser("replay", help="rebuild the final snapshot from a run log")
    replay.add_argument("--log", required=True, help="run directory or events.ndjson file")
    replay.add_argument("--format", choices=("table", "json"), default="table")
    replay.set_defaults(func=cmd_replay)

    validate = sub.add_parser("validate", help="check a scenario file")
    validate.add_argument("--scenario", required=True)
    validate.set_defaults(func=cmd_validate)

    serve = sub.add_parser("serve", help="serve the gateway API and dashboard")
    serve.add_argument("--address", default="127.0.0.1:8000")
    serve.add_argument("--runs-dir", default="runs")
    serve.add_argument("--frontend", default=None, help="directory of built dashboard assets")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
