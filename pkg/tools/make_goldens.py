"""Regenerate the frozen fixtures under tests/golden/.

Each golden is produced by one deterministic run and constraint-audited
here before being written. Regenerate only when an intentional behavior
change invalidates the frozen bytes, and re-review the diffs.

Usage: python3 tools/make_goldens.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from coalsim.engine import LEADER_ID_BASE, ScenarioConfig, generate_fleet, run_scenario
from coalsim.geometry import Disc, distance, sector_anchors

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"


def audit(res, cfg) -> None:
    assert len(res.coalitions) == cfg.n_leaders
    seen = set()
    for c in res.coalitions:
        assert len(set(c.members)) == len(c.members)
        assert not (seen & set(c.members))
        seen |= set(c.members)
        if c.complete:
            assert sorted(c.sector_map.values()) == list(range(cfg.sectors))
    _, fresh = generate_fleet(cfg)
    batteries = {f.id: f.remaining_flight_time for f in fresh}
    for m, travel in res.member_travel.items():
        assert travel["distance_m"] >= 0.0
        assert batteries[m] - travel["time_min"] - cfg.mission_time >= -1e-9
    ticks = [e["tick"] for e in res.events]
    assert ticks == sorted(ticks)
    for e in res.events:
        assert not (
            isinstance(e["from"], int) and isinstance(e["to"], int)
            and e["from"] >= LEADER_ID_BASE and e["to"] >= LEADER_ID_BASE
        ), "leader-to-leader traffic in a golden log"


def write_events(path: Path, events) -> None:
    with open(path, "w") as sink:
        for event in events:
            sink.write(json.dumps(event, sort_keys=True) + "\n")


def failure_cfg(schedule=()) -> ScenarioConfig:
    return ScenarioConfig(
        n_followers=10, n_leaders=2, sectors=2, rng_seed=8,
        battery_range=(40.0, 60.0), mission_time=10.0,
        speed=2000.0, coalition_radius=1500.0, comm_range=15_000.0,
        failure_schedule=schedule,
    )


def main() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)

    # Reference single run: defaults, seed 7.
    cfg = ScenarioConfig(rng_seed=7)
    res = run_scenario(cfg)
    audit(res, cfg)
    assert res.all_complete, "seed-7 reference run must fully staff"
    (GOLDEN_DIR / "scenario_seed7.json").write_text(
        json.dumps(res.to_json_dict(), sort_keys=True, indent=2) + "\n"
    )
    print(f"scenario_seed7.json: {len(res.events)} events, "
          f"total distance {res.total_distance:.1f} m")

    # Member failure: member 1 of the first coalition dies mid-mission and
    # a standby takes over its sector.
    clean = run_scenario(failure_cfg())
    victim = sorted(clean.coalitions[0].members)[0]
    cfg_m = failure_cfg(schedule=((4.0, victim),))
    res_m = run_scenario(cfg_m)
    audit(res_m, cfg_m)
    repaired = res_m.coalitions[0]
    assert victim not in repaired.members and repaired.complete
    write_events(GOLDEN_DIR / "member_failure_events.jsonl", res_m.events)
    print(f"member_failure_events.jsonl: victim {victim}, {len(res_m.events)} events")

    # Leader failure: the second leader dies; the member with the longest
    # remaining battery takes over and its sector is refilled.
    cfg_l = failure_cfg(schedule=((6.0, LEADER_ID_BASE + 1),))
    res_l = run_scenario(cfg_l)
    audit(res_l, cfg_l)
    promoted = res_l.coalitions[1]
    assert promoted.leader_id < LEADER_ID_BASE and promoted.degraded
    write_events(GOLDEN_DIR / "leader_failure_events.jsonl", res_l.events)
    print(f"leader_failure_events.jsonl: promoted {promoted.leader_id}, "
          f"{len(res_l.events)} events")


if __name__ == "__main__":
    main()
