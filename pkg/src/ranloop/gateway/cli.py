"""Command-line entry points: headless runs and the live gateway."""

from __future__ import annotations

import argparse
import importlib.resources
import json
import statistics
import sys
from pathlib import Path

from .plots import export_plots
from .scenario import ScenarioError, load_scenario, run_scenario


def default_config_dict() -> dict:
    ref = importlib.resources.files("ranloop") / "configs" / "default_scenario.json"
    return json.loads(ref.read_text(encoding="utf-8"))


def _load(args) -> dict:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = default_config_dict()
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "reasoner", None):
        raw.setdefault("agents", {})["reasoner"] = args.reasoner
    if getattr(args, "compress", None) is not None:
        raw["time_compression"] = args.compress
    return raw


def _summary_lines(result) -> list[str]:
    lines = []
    for phase in result.phases:
        t0, t1 = phase["start_s"], phase["end_s"]
        slices = result.series["throughput_bps"]
        tail = {
            sid: statistics.fmean([v for t, v in pts if t1 - 30 < t <= t1] or [0.0])
            for sid, pts in slices.items()
        }
        rates = ", ".join(f"slice {sid}: {bps / 1e6:.1f} Mbit/s" for sid, bps in sorted(tail.items()))
        latency = result.intent_latency_cycles.get(phase["intent_id"])
        lines.append(
            f"{phase['name']} [{t0:g}-{t1:g} s]  tail {rates}"
            + (f"  intent-to-effect {latency} cycles" if latency is not None else "")
        )
    lines.append(f"violations: {len(result.violations)}")
    return lines


def cmd_run(args) -> int:
    try:
        config = load_scenario(_load(args))
    except ScenarioError as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    result = run_scenario(config, out)
    if args.plots:
        export_plots(result, out / "plots")
    for line in _summary_lines(result):
        print(line)
    print(f"result written to {out / 'result.json'}")
    return 0


def cmd_export(args) -> int:
    from ..datalake.replay import export_csv
    from ..datalake.store import DataLake

    lake = DataLake(args.lake)
    rows = export_csv(lake, args.out)
    print(f"{rows} rows written to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServeRuntime, make_app

    try:
        config = load_scenario(_load(args))
    except ScenarioError as exc:
        print(f"config rejected: {exc}", file=sys.stderr)
        return 2
    host, _, port = args.listen.partition(":")
    static = args.ui if args.ui and Path(args.ui).is_dir() else None
    runtime = ServeRuntime(config, args.out)
    app = make_app(runtime, static_dir=static)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ranloop",
        description="Intent-driven closed-loop control of a simulated 5G uplink.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario headlessly")
    run_p.add_argument("--config", help="scenario JSON (defaults to the packaged three-phase run)")
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--seed", type=int, help="override the scenario seed")
    run_p.add_argument("--reasoner", choices=["rule", "llm"], help="decision backend")
    run_p.add_argument("--compress", type=float, help="override time compression")
    run_p.add_argument("--plots", action="store_true", help="also render plot panels")
    run_p.set_defaults(func=cmd_run)

    export_p = sub.add_parser("export", help="derive the per-UE KPI CSV from a data lake")
    export_p.add_argument("--lake", required=True, help="lake directory (NDJSON segments)")
    export_p.add_argument("--out", default="kpis.csv", help="destination CSV file")
    export_p.set_defaults(func=cmd_export)

    serve_p = sub.add_parser("serve", help="serve the live gateway")
    serve_p.add_argument("--config", help="scenario JSON (defaults to the packaged three-phase run)")
    serve_p.add_argument("--out", default="out-serve", help="output directory")
    serve_p.add_argument("--listen", default="127.0.0.1:8000", help="host:port")
    serve_p.add_argument("--seed", type=int, help="override the scenario seed")
    serve_p.add_argument("--reasoner", choices=["rule", "llm"], help="decision backend")
    serve_p.add_argument("--compress", type=float, help="override time compression")
    serve_p.add_argument("--ui", help="static console directory to serve at /")
    serve_p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
