"""Command-line front end: scenario generation, single runs, batches.

Subcommands:
  generate   write a config, fire zone, and fleet snapshot for a seed
  run        execute one scenario (distributed, central, or both)
  batch      run a seeded batch of both methods and aggregate

Config files are plain "key = value" text; '#' starts a comment. The
COALSIM_SEED environment variable overrides --seed wherever a seed is
accepted. Exit codes: 0 ok, 1 config or runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .engine import (
    SCHEMA_VERSION,
    ScenarioConfig,
    execute_central,
    fleet_json,
    prepare_scenario,
    run_batch,
    run_scenario,
)
from .geometry import generate_fire_zone

_INT_KEYS = {
    "n_followers", "n_leaders", "sectors", "rng_seed", "zone_complexity",
    "max_rounds", "placement_max_iterations",
}
_FLOAT_KEYS = {"field_side", "coalition_radius", "mission_time", "speed", "big_l", "comm_range"}
_TUPLE_KEYS = {"battery_range", "resource_demand", "property_floor", "region_priorities"}
_BOOL_KEYS = {"boundary_feasible"}

PRESETS: Dict[str, Tuple[ScenarioConfig, Optional[int], int]] = {
    # name -> (config, runs, default seed)
    "paper-fig3": (
        ScenarioConfig(
            field_side=10_000.0, n_followers=20, n_leaders=3, sectors=3,
        ),
        None,
        7,
    ),
    # Batch comparison setup. Speed, coalition radius, and comm range are
    # free parameters here; these values keep most runs fully staffed under
    # the tight 10-20 min batteries so the two methods stay comparable.
    "paper-fig4": (
        ScenarioConfig(
            field_side=10_000.0, n_followers=15, n_leaders=3, sectors=2,
            battery_range=(10.0, 20.0), mission_time=15.0,
            speed=4000.0, coalition_radius=3500.0, comm_range=10_000.0,
        ),
        100,
        1,
    ),
}


def format_config(cfg: ScenarioConfig, runs: Optional[int] = None) -> str:
    lines = ["# scenario configuration"]
    lines.append(f"field_side = {cfg.field_side!r}")
    lines.append(f"n_followers = {cfg.n_followers}")
    lines.append(f"n_leaders = {cfg.n_leaders}")
    lines.append(f"sectors = {cfg.sectors}")
    lines.append(f"coalition_radius = {cfg.coalition_radius!r}")
    lines.append(f"mission_time = {cfg.mission_time!r}")
    lines.append(f"battery_range = {cfg.battery_range[0]!r}, {cfg.battery_range[1]!r}")
    lines.append(f"speed = {cfg.speed!r}")
    lines.append(f"rng_seed = {cfg.rng_seed}")
    lines.append(f"boundary_feasible = {'true' if cfg.boundary_feasible else 'false'}")
    lines.append(f"big_l = {cfg.big_l!r}")
    lines.append(f"resource_demand = {', '.join(repr(v) for v in cfg.resource_demand)}")
    lines.append(f"property_floor = {', '.join(repr(v) for v in cfg.property_floor)}")
    if cfg.comm_range is not None:
        lines.append(f"comm_range = {cfg.comm_range!r}")
    if cfg.region_priorities is not None:
        lines.append(f"region_priorities = {', '.join(repr(v) for v in cfg.region_priorities)}")
    if cfg.failure_schedule:
        pairs = ", ".join(f"{t!r}:{u}" for t, u in cfg.failure_schedule)
        lines.append(f"failure_schedule = {pairs}")
    lines.append(f"zone_complexity = {cfg.zone_complexity}")
    lines.append(f"max_rounds = {cfg.max_rounds}")
    lines.append(f"placement_max_iterations = {cfg.placement_max_iterations}")
    if runs is not None:
        lines.append(f"runs = {runs}")
    return "\n".join(lines) + "\n"


def parse_config_text(text: str) -> Tuple[ScenarioConfig, Optional[int]]:
    fields: Dict[str, object] = {}
    runs: Optional[int] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "runs":
            runs = int(value)
        elif key in _INT_KEYS:
            fields[key] = int(value)
        elif key in _FLOAT_KEYS:
            fields[key] = float(value)
        elif key in _BOOL_KEYS:
            if value.lower() not in ("true", "false"):
                raise ValueError(f"config line {lineno}: {key} must be true or false")
            fields[key] = value.lower() == "true"
        elif key in _TUPLE_KEYS:
            fields[key] = tuple(float(v) for v in value.split(","))
        elif key == "failure_schedule":
            events = []
            for pair in value.split(","):
                t, _, uid = pair.strip().partition(":")
                events.append((float(t), int(uid)))
            fields[key] = tuple(events)
        else:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
    return ScenarioConfig(**fields), runs


def load_config(path: str) -> Tuple[ScenarioConfig, Optional[int]]:
    return parse_config_text(Path(path).read_text())


def _json_bytes(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _resolve_seed(args: argparse.Namespace) -> Optional[int]:
    env = os.environ.get("COALSIM_SEED")
    if env is not None:
        return int(env)
    return args.seed


def _config_for(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Shared --config/--preset/--seed resolution for run and batch."""
    if args.config:
        cfg, runs = load_config(args.config)
    elif args.preset:
        if args.preset not in PRESETS:
            parser.error(f"unknown preset {args.preset!r}")
        cfg, runs, default_seed = PRESETS[args.preset]
        cfg = replace(cfg, rng_seed=default_seed)
    else:
        parser.error("either --config or --preset is required")
    seed = _resolve_seed(args)
    if seed is not None:
        cfg = replace(cfg, rng_seed=seed)
    return cfg, runs


def cmd_generate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.preset:
        if args.preset not in PRESETS:
            parser.error(f"unknown preset {args.preset!r}")
        cfg, runs, default_seed = PRESETS[args.preset]
        cfg = replace(cfg, rng_seed=default_seed)
    else:
        cfg, runs = ScenarioConfig(), None
        if _resolve_seed(args) is None:
            parser.error("--seed is required without a preset")
    seed = _resolve_seed(args)
    if seed is not None:
        cfg = replace(cfg, rng_seed=seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scenario.cfg").write_text(format_config(cfg, runs))
    zone = generate_fire_zone(cfg.field_side, cfg.rng_seed, cfg.zone_complexity)
    zone_doc = {"schema_version": SCHEMA_VERSION, "zone": zone.to_json_dict()}
    (out / "zone.json").write_text(_json_bytes(zone_doc))
    (out / "fleet.json").write_text(_json_bytes(fleet_json(cfg)))
    print(f"wrote scenario.cfg, zone.json, fleet.json to {out}")
    return 0


def _central_result_doc(cfg: ScenarioConfig, outcome) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.rng_seed,
        "method": "central",
        "assignment": {
            str(fid): {"coalition": ci, "sector": sec}
            for fid, (ci, sec) in sorted(outcome.assignment.items())
        },
        "position_distance": {
            str(p): d for p, d in sorted(outcome.position_distance.items())
        },
        "total_distance_m": math.fsum(outcome.position_distance.values()),
        "total_value": outcome.total_value,
        "complete": outcome.complete,
    }


def _print_coalition_table(res) -> None:
    print("coalition  member  sector  distance_m       value")
    for ci, c in enumerate(res.coalitions):
        for m in sorted(c.members):
            sec = c.sector_map.get(m)
            p = ci * res.cfg.sectors + sec if sec is not None else None
            d = res.position_distance.get(p, float("nan")) if p is not None else float("nan")
            print(f"{c.leader_id:>9}  {m:>6}  {sec!s:>6}  {d:>10.1f}  {c.value:>10.4f}")


def cmd_run(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg, _runs = _config_for(args, parser)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    methods = ("distributed", "central") if args.method == "both" else (args.method,)
    totals: Dict[str, float] = {}

    if "distributed" in methods:
        res = run_scenario(cfg)
        (out / "result_distributed.json").write_text(_json_bytes(res.to_json_dict()))
        with open(out / "events_distributed.jsonl", "w") as sink:
            for event in res.events:
                sink.write(json.dumps(event, sort_keys=True) + "\n")
        totals["distributed"] = res.total_distance
        _print_coalition_table(res)
        print(f"distributed: total distance {res.total_distance:.1f} m, "
              f"total value {res.total_value:.4f}, "
              f"{'all complete' if res.all_complete else 'incomplete'}")

    if "central" in methods:
        prep = prepare_scenario(cfg)
        outcome = execute_central(cfg, prep)
        (out / "result_central.json").write_text(_json_bytes(_central_result_doc(cfg, outcome)))
        totals["central"] = math.fsum(outcome.position_distance.values())
        print(f"central: total distance {totals['central']:.1f} m, "
              f"total value {outcome.total_value:.4f}, "
              f"{'complete' if outcome.complete else 'incomplete'}")

    if len(totals) == 2 and totals["central"] > 0.0:
        gap = (totals["distributed"] - totals["central"]) / totals["central"]
        print(f"comparison: relative distance gap {gap:+.4f}")
    return 0


def cmd_batch(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    cfg, cfg_runs = _config_for(args, parser)
    runs = args.runs if args.runs is not None else cfg_runs
    if runs is None:
        parser.error("--runs is required (config carries no runs entry)")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    metrics = run_batch(cfg, runs, parallel=args.parallel)
    with open(out / "batch_rows.csv", "w", newline="") as sink:
        metrics.write_csv(sink)
    (out / "batch_summary.json").write_text(_json_bytes(metrics.to_json_dict()))

    if args.emit_plot_data:
        lines = ["position,distributed,central"]
        for p in range(metrics.n_positions):
            d = metrics.avg_position_distance["distributed"][p]
            c = metrics.avg_position_distance["central"][p]
            lines.append(f"{p},{'' if d is None else d!r},{'' if c is None else c!r}")
        (out / "plot_data.csv").write_text("\n".join(lines) + "\n")

    davg = metrics.mean_total_value["distributed"]
    cavg = metrics.mean_total_value["central"]
    print(f"batch: {runs} runs, {metrics.n_comparable_runs} fully staffed by both methods")
    print(f"mean total value: distributed {davg:.4f}, central {cavg:.4f}")
    print(f"mean relative distance gap: {metrics.mean_relative_gap:+.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coalsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write config, zone, and fleet files")
    gen.add_argument("--preset", help="paper-fig3 or paper-fig4")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", default=".")

    run_p = sub.add_parser("run", help="execute one scenario")
    run_p.add_argument("--config", help="key-value scenario config file")
    run_p.add_argument("--preset", help="paper-fig3 or paper-fig4")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--method", choices=("distributed", "central", "both"),
                       default="distributed")
    run_p.add_argument("--out", default=".")

    batch_p = sub.add_parser("batch", help="run a seeded batch of both methods")
    batch_p.add_argument("--config", help="key-value scenario config file")
    batch_p.add_argument("--preset", help="paper-fig3 or paper-fig4")
    batch_p.add_argument("--seed", type=int, default=None)
    batch_p.add_argument("--runs", type=int, default=None)
    batch_p.add_argument("--parallel", type=int, default=1)
    batch_p.add_argument("--out", default=".")
    batch_p.add_argument("--emit-plot-data", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"generate": cmd_generate, "run": cmd_run, "batch": cmd_batch}
    try:
        return handlers[args.command](args, parser)
    except (ValueError, OSError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
