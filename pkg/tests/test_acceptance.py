"""Acceptance gate: one test per shipped claim, each a single pass/fail line.

Oracles here are deliberately self-contained re-implementations (factorial
enumerations, direct formula checks) so a regression in the library cannot
hide inside a shared helper.
"""

from __future__ import annotations

import itertools
import json
import math
import pathlib
import random
import time
import warnings
from dataclasses import replace

import pytest

from coalsim.central import central_min_distance_assignment
from coalsim.cli import PRESETS, format_config, main
from coalsim.engine import (
    LEADER_ID_BASE,
    ScenarioConfig,
    _execute_distributed_light,
    execute_central,
    prepare_scenario,
    run_batch,
    run_scenario,
)
from coalsim.geometry import Disc, Point2D, coverage_fraction, distance, generate_fire_zone
from coalsim.model import (
    CoalitionRequirement,
    IdentityVector,
    UavAgent,
    coalition_value,
    gamma,
)
from coalsim.placement import PlacementConfig, place_leaders
from coalsim.protocol import NegotiationLeader, Transport, assign_sectors, run_negotiation

GOLDEN = pathlib.Path(__file__).parent / "golden"
BIG = 1.0e9


@pytest.fixture(autouse=True)
def _no_ambient_seed(monkeypatch):
    monkeypatch.delenv("COALSIM_SEED", raising=False)


# ---------------------------------------------------------------------------
# 1. Batch comparison reproduction
# ---------------------------------------------------------------------------


def test_criterion_1_batch_comparison_reproduction():
    cfg, runs, seed = PRESETS["paper-fig4"]
    cfg = replace(cfg, rng_seed=seed)
    started = time.monotonic()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        metrics = run_batch(cfg, runs)
    elapsed = time.monotonic() - started

    dist = metrics.avg_position_distance["distributed"]
    cent = metrics.avg_position_distance["central"]
    assert metrics.n_comparable_runs > 0
    for p, (d, c) in enumerate(zip(dist, cent)):
        assert d is not None and c is not None
        assert c <= d + 1e-9, f"central loses at sector position {p}: {c} > {d}"
    assert 0.0 <= metrics.mean_relative_gap <= 0.25
    assert elapsed < 120.0, f"batch took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# 2. Central dominance on total value
# ---------------------------------------------------------------------------


def test_criterion_2_central_value_dominance_200_seeds():
    rng = random.Random(424242)
    shapes = [(2, 2), (2, 2), (2, 2), (2, 3), (2, 3), (3, 2), (3, 2), (2, 4), (3, 3)]
    for trial in range(200):
        c_count, s_count = shapes[rng.randrange(len(shapes))]
        cfg = ScenarioConfig(
            n_followers=c_count * s_count + rng.randint(2, 3),
            n_leaders=c_count,
            sectors=s_count,
            rng_seed=50_000 + trial,
            battery_range=(40.0, 70.0),
            mission_time=10.0,
            speed=2000.0,
            coalition_radius=1500.0,
            comm_range=15_000.0,
            resource_demand=(15.0 * s_count,),
        )
        prep = prepare_scenario(cfg)
        dist = _execute_distributed_light(cfg, prep)
        cent = execute_central(cfg, prep, mode="exhaustive")
        full = c_count * s_count
        assert len(dist["position_distance"]) == full, f"seed {cfg.rng_seed} not staffed"
        assert cent.complete, f"seed {cfg.rng_seed} central incomplete"
        assert cent.total_value >= dist["total_value"] - 1e-9, (
            f"seed {cfg.rng_seed}: central {cent.total_value} < "
            f"distributed {dist['total_value']}"
        )


# ---------------------------------------------------------------------------
# 3. Sector assignment equals the factorial oracle
# ---------------------------------------------------------------------------


def test_criterion_3_sector_assignment_optimal_500_instances():
    rng = random.Random(7331)
    for _ in range(500):
        s_count = rng.randint(2, 5)
        members = [
            (mid, Point2D(rng.uniform(0, 5000), rng.uniform(0, 5000)))
            for mid in rng.sample(range(100), s_count)
        ]
        anchors = [
            Point2D(rng.uniform(0, 5000), rng.uniform(0, 5000)) for _ in range(s_count)
        ]
        speeds = {mid: rng.uniform(100.0, 900.0) for mid, _ in members}

        got = assign_sectors(members, anchors, speeds)

        best_perm, best_cost = None, math.inf
        for perm in itertools.permutations(range(s_count)):
            cost = math.fsum(
                distance(pos, anchors[perm[i]]) / speeds[mid]
                for i, (mid, pos) in enumerate(members)
            )
            if cost < best_cost:  # strict: lexicographically first tie wins
                best_perm, best_cost = perm, cost
        expected = {mid: best_perm[i] for i, (mid, _) in enumerate(members)}

        got_cost = math.fsum(
            distance(pos, anchors[got[mid]]) / speeds[mid] for mid, pos in members
        )
        assert abs(got_cost - best_cost) <= 1e-9
        assert got == expected


# ---------------------------------------------------------------------------
# 4. Min-distance solver equals permutation enumeration
# ---------------------------------------------------------------------------


def test_criterion_4_assignment_solver_200_instances():
    rng = random.Random(6502)
    for _ in range(200):
        p = rng.randint(2, 7)
        n = p + rng.randint(0, 2)
        followers = [
            UavAgent(
                id=i,
                position=Point2D(rng.uniform(0, 4000), rng.uniform(0, 4000)),
                identity=IdentityVector(properties=(1.0,), resources=(rng.uniform(5, 50),)),
                remaining_flight_time=1.0e6,
                speed=300.0,
            )
            for i in range(n)
        ]
        anchors = [Point2D(rng.uniform(0, 4000), rng.uniform(0, 4000)) for _ in range(p)]

        result = central_min_distance_assignment(followers, anchors)

        best = math.inf
        for chosen in itertools.permutations(range(n), p):
            cost = math.fsum(
                distance(followers[f].position, anchors[k]) for k, f in enumerate(chosen)
            )
            best = min(best, cost)
        assert result.complete
        assert abs(result.total_distance - best) <= 1e-9


# ---------------------------------------------------------------------------
# 5. Value formula unit suite
# ---------------------------------------------------------------------------


def test_criterion_5_value_formula_suite():
    # deficit pins to the big penalty, surplus is the negated ratio
    assert gamma(0.5, BIG) == -BIG
    assert gamma(2.0, BIG) == -2.0
    # the boundary flag flips exactly the ratio-1 case
    assert gamma(1.0, BIG, boundary_feasible=True) == -1.0
    assert gamma(1.0, BIG, boundary_feasible=False) == -BIG
    assert gamma(1.0 + 1e-9, BIG, boundary_feasible=False) == pytest.approx(-1.0)

    def ident(r):
        return IdentityVector(properties=(1.0,), resources=(r,))

    req = CoalitionRequirement(properties_floor=(1.0,), resources_total=(10.0,))
    members = [ident(6.0), ident(6.0)]
    v = coalition_value([m for m in members], req, BIG, True)
    assert v == pytest.approx(-1.2)

    # permutation invariance, exact
    perm = coalition_value(list(reversed(members)), req, BIG, True)
    assert perm == v

    # ratio scaling invariance
    req2 = CoalitionRequirement(properties_floor=(1.0,), resources_total=(20.0,))
    doubled = [ident(12.0), ident(12.0)]
    assert coalition_value(doubled, req2, BIG, True) == pytest.approx(v)

    # insufficiency dominates at the big-penalty bound
    poor = [ident(1.0), ident(2.0)]
    assert coalition_value(poor, req, BIG, True) <= -BIG


# ---------------------------------------------------------------------------
# 6. Protocol safety under contention
# ---------------------------------------------------------------------------


def test_criterion_6_protocol_safety_100_negotiations():
    rng = random.Random(90210)
    for trial in range(100):
        c_count = rng.choice([2, 3])
        s_count = rng.choice([1, 2, 3])
        while c_count * s_count > 9:
            s_count -= 1
        n = c_count * s_count + rng.randint(0, 2)  # contention: N within 2

        followers = []
        for i in range(n):
            prop = 1.0 if rng.random() < 0.8 else 0.0
            followers.append(
                UavAgent(
                    id=i,
                    position=Point2D(rng.uniform(0, 2000), rng.uniform(0, 2000)),
                    identity=IdentityVector(
                        properties=(prop,), resources=(rng.uniform(5.0, 15.0),)
                    ),
                    remaining_flight_time=1.0e6,
                    speed=500.0,
                )
            )
        leaders = [
            NegotiationLeader(
                id=100 + c,
                center=Point2D(rng.uniform(0, 2000), rng.uniform(0, 2000)),
                radius=rng.uniform(300.0, 800.0),
                requirement=CoalitionRequirement(
                    properties_floor=(1.0,), resources_total=(5.0 * s_count,)
                ),
                s_count=s_count,
                priority=rng.choice([1.0, 2.0]),
                mission_time=15.0,
            )
            for c in range(c_count)
        ]
        transport = Transport()
        coalitions = run_negotiation(leaders, followers, transport, max_rounds=30)

        committed = [m for c in coalitions for m in c.members]
        assert len(committed) == len(set(committed)), f"trial {trial}: double commit"

        leader_ids = {ld.id for ld in leaders}
        for e in transport.events:
            if isinstance(e["from"], int) and isinstance(e["to"], int):
                assert not (e["from"] in leader_ids and e["to"] in leader_ids), (
                    f"trial {trial}: leader-to-leader message"
                )

        by_id = {f.id: f for f in followers}
        for c, ld in zip(coalitions, leaders):  # return order follows input order
            if not c.complete:
                continue
            assert len(c.members) == s_count
            for m in c.members:
                props = by_id[m].identity.properties
                assert all(
                    p >= f for p, f in zip(props, ld.requirement.properties_floor)
                )
            if c.value > -BIG:
                pooled = math.fsum(by_id[m].identity.resources[0] for m in c.members)
                assert pooled >= ld.requirement.resources_total[0] - 1e-9


# ---------------------------------------------------------------------------
# 7. Failure handling against frozen logs
# ---------------------------------------------------------------------------


def _failure_cfg(schedule=()):
    return ScenarioConfig(
        n_followers=10, n_leaders=2, sectors=2, rng_seed=8,
        battery_range=(40.0, 60.0), mission_time=10.0,
        speed=2000.0, coalition_radius=1500.0, comm_range=15_000.0,
        failure_schedule=schedule,
    )


def _event_bytes(events) -> str:
    return "".join(json.dumps(e, sort_keys=True) + "\n" for e in events)


def test_criterion_7_failure_scenarios_match_golden_logs():
    clean = run_scenario(_failure_cfg())
    victim = sorted(clean.coalitions[0].members)[0]

    res_m = run_scenario(_failure_cfg(schedule=((4.0, victim),)))
    repaired = res_m.coalitions[0]
    assert victim not in repaired.members
    assert repaired.complete, "vacated sector must be refilled"
    vacated = clean.coalitions[0].sector_map[victim]
    newcomer = (set(repaired.members) - set(clean.coalitions[0].members)).pop()
    assert repaired.sector_map[newcomer] == vacated
    assert _event_bytes(res_m.events) == (GOLDEN / "member_failure_events.jsonl").read_text()

    res_l = run_scenario(_failure_cfg(schedule=((6.0, LEADER_ID_BASE + 1),)))
    promoted = res_l.coalitions[1]
    assert promoted.leader_id < LEADER_ID_BASE, "a member must take over"
    # the promoted member is the one with the longest post-drain battery;
    # recompute that from a fresh fleet rather than trusting the run
    from coalsim.engine import generate_fleet

    _, fresh = generate_fleet(_failure_cfg())
    batteries = {f.id: f.remaining_flight_time for f in fresh}
    mission = _failure_cfg().mission_time
    remaining = {
        m: batteries[m] - clean.member_travel[m]["time_min"] - mission
        for m in clean.coalitions[1].members
    }
    assert promoted.leader_id == sorted(remaining, key=lambda m: (-remaining[m], m))[0]
    assert _event_bytes(res_l.events) == (GOLDEN / "leader_failure_events.jsonl").read_text()


# ---------------------------------------------------------------------------
# 8. Byte-identical CLI outputs
# ---------------------------------------------------------------------------


def test_criterion_8_cli_determinism(tmp_path, capsys):
    cfg = ScenarioConfig(
        n_followers=10, n_leaders=2, sectors=2, rng_seed=17,
        battery_range=(40.0, 60.0), mission_time=10.0,
        speed=2000.0, coalition_radius=1500.0, comm_range=15_000.0,
    )
    path = tmp_path / "scenario.cfg"
    path.write_text(format_config(cfg, runs=4))

    run_a, run_b = tmp_path / "run_a", tmp_path / "run_b"
    assert main(["run", "--config", str(path), "--method", "both", "--out", str(run_a)]) == 0
    assert main(["run", "--config", str(path), "--method", "both", "--out", str(run_b)]) == 0
    for name in ("result_distributed.json", "events_distributed.jsonl", "result_central.json"):
        assert (run_a / name).read_bytes() == (run_b / name).read_bytes(), name

    ser, par = tmp_path / "serial", tmp_path / "parallel"
    assert main(["batch", "--config", str(path), "--parallel", "1", "--out", str(ser)]) == 0
    assert main(["batch", "--config", str(path), "--parallel", "4", "--out", str(par)]) == 0
    for name in ("batch_rows.csv", "batch_summary.json"):
        assert (ser / name).read_bytes() == (par / name).read_bytes(), name


# ---------------------------------------------------------------------------
# 9. Greedy placement guarantees
# ---------------------------------------------------------------------------


def _score_tuple(entry):
    cov, sep = entry
    return (cov, math.inf if sep is None else sep)


def test_criterion_9_placement_monotone_and_golden_coverage():
    import io

    cfg = PlacementConfig(coalition_radius=1500.0, step_size=100.0)
    for seed in (42, 3, 11, 27):
        zone = generate_fire_zone(10_000.0, seed)
        sink = io.StringIO()
        finals = place_leaders(zone, [zone.centroid] * 3, cfg, trace=sink)
        for line in sink.getvalue().splitlines():
            entry = json.loads(line)
            assert _score_tuple(entry["score"]) >= _score_tuple(entry["stay_score"]), (
                f"seed {seed}: move {entry} lost score"
            )
        if seed == 42:
            for center in finals:
                cov = coverage_fraction(Disc(center, cfg.coalition_radius), zone)
                assert cov >= 0.8
