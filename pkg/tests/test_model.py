"""Tests for identity vectors, requirement aggregation, the penalty curve,
coalition value, and battery feasibility."""

from __future__ import annotations

import math
import random

import pytest

from coalsim.geometry import Point2D
from coalsim.model import (
    DEFAULT_BIG_L,
    Coalition,
    CoalitionRequirement,
    IdentityVector,
    Task,
    UavAgent,
    agent_from_json_dict,
    agent_to_json_dict,
    aggregate_requirements,
    coalition_value,
    feasible_for_mission,
    fleet_from_json_dict,
    fleet_to_json_dict,
    gamma,
    satisfies_properties,
)

BIG = 1.0e9


def iv(resources, properties=(1.0,)):
    return IdentityVector(properties=tuple(properties), resources=tuple(resources))


def req(resources, floors=(0.0,)):
    return CoalitionRequirement(properties_floor=tuple(floors), resources_total=tuple(resources))


def value_oracle(pools, demands, big_l=BIG):
    """Independent scalar evaluation of the value sum, default boundary."""
    total = 0.0
    for pooled, demanded in zip(pools, demands):
        if demanded == 0:
            continue
        x = pooled / demanded
        total += -x if x >= 1 else -big_l
    return total


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------


def test_gamma_insufficient_is_big_penalty_in_both_modes():
    assert gamma(0.5, BIG, boundary_feasible=True) == -BIG
    assert gamma(0.5, BIG, boundary_feasible=False) == -BIG


def test_gamma_overspend_is_negated_ratio():
    assert gamma(2.0, BIG, boundary_feasible=True) == -2.0
    assert gamma(2.0, BIG, boundary_feasible=False) == -2.0


def test_gamma_boundary_flips_exactly_at_one():
    assert gamma(1.0, BIG, boundary_feasible=True) == -1.0
    assert gamma(1.0, BIG, boundary_feasible=False) == -BIG
    # Just below and just above 1 the modes agree again.
    eps = 1e-12
    assert gamma(1.0 - eps, BIG, True) == -BIG
    assert gamma(1.0 - eps, BIG, False) == -BIG
    assert gamma(1.0 + eps, BIG, True) == -(1.0 + eps)
    assert gamma(1.0 + eps, BIG, False) == -(1.0 + eps)


def test_gamma_non_increasing_above_one():
    xs = [1.0 + k * 0.37 for k in range(50)]
    vals = [gamma(x, BIG, True) for x in xs]
    for a, b in zip(vals, vals[1:]):
        assert b <= a


def test_gamma_at_most_minus_one_when_feasible():
    for x in (1.0, 1.001, 3.0, 17.5, 1e6):
        assert gamma(x, BIG, True) <= -1.0


def test_gamma_validation():
    with pytest.raises(ValueError):
        gamma(-0.1, BIG)
    with pytest.raises(ValueError):
        gamma(1.0, 0.0)
    with pytest.raises(ValueError):
        gamma(1.0, -5.0)


# ---------------------------------------------------------------------------
# coalition_value
# ---------------------------------------------------------------------------


def test_value_single_resource_overspend():
    members = [iv([6.0]), iv([6.0])]
    assert coalition_value(members, req([10.0]), BIG) == pytest.approx(-1.2)


def test_value_single_resource_insufficient():
    members = [iv([4.0]), iv([4.0])]
    assert coalition_value(members, req([10.0]), BIG) == -BIG


def test_value_two_resources_hand_case():
    members = [iv([12.0, 2.0]), iv([8.0, 3.0])]
    got = coalition_value(members, req([10.0, 5.0]), BIG)
    assert got == pytest.approx(-3.0)
    assert got == pytest.approx(value_oracle([20.0, 5.0], [10.0, 5.0]))


def test_value_zero_requirement_dimension_is_skipped():
    members = [iv([6.0, 123.0]), iv([6.0, 456.0])]
    assert coalition_value(members, req([10.0, 0.0]), BIG) == pytest.approx(-1.2)


def test_value_non_consumable_pool_counts_as_available():
    members = [iv([math.inf]), iv([0.0])]
    assert coalition_value(members, req([1.0]), BIG) == -1.0


def test_value_infinite_demand_without_carrier_is_penalized():
    members = [iv([5.0]), iv([5.0])]
    assert coalition_value(members, req([math.inf]), BIG) == -BIG


def test_value_permutation_invariant():
    rng = random.Random(31)
    for _ in range(20):
        members = [iv([rng.uniform(0, 10), rng.uniform(0, 10)]) for _ in range(4)]
        demand = req([rng.uniform(1, 20), rng.uniform(1, 20)])
        base = coalition_value(members, demand, BIG)
        shuffled = members[:]
        rng.shuffle(shuffled)
        assert coalition_value(shuffled, demand, BIG) == base


def test_value_zero_resource_member_is_neutral():
    rng = random.Random(32)
    for _ in range(20):
        members = [iv([rng.uniform(0, 10)]) for _ in range(3)]
        demand = req([rng.uniform(1, 20)])
        base = coalition_value(members, demand, BIG)
        assert coalition_value(members + [iv([0.0])], demand, BIG) == base


def test_value_ratio_invariance_under_scaling():
    rng = random.Random(33)
    for _ in range(20):
        amounts = [rng.uniform(1, 10) for _ in range(3)]
        demanded = rng.uniform(1, 12)
        scale = rng.uniform(0.1, 50)
        a = coalition_value([iv([v]) for v in amounts], req([demanded]), BIG)
        b = coalition_value([iv([v * scale]) for v in amounts], req([demanded * scale]), BIG)
        assert a == pytest.approx(b)


def test_value_any_shortfall_dominates():
    members = [iv([1.0, 100.0])]
    assert coalition_value(members, req([10.0, 5.0]), BIG) <= -BIG


def test_value_validation():
    with pytest.raises(ValueError):
        coalition_value([], req([10.0]), BIG)
    with pytest.raises(ValueError):
        coalition_value([iv([1.0, 2.0])], req([10.0]), BIG)


def test_value_agrees_with_oracle_on_random_cases():
    rng = random.Random(34)
    for _ in range(100):
        n_dim = rng.randint(1, 3)
        members = [iv([rng.uniform(0, 8) for _ in range(n_dim)]) for _ in range(rng.randint(1, 5))]
        demands = [rng.choice([0.0, rng.uniform(1, 15)]) for _ in range(n_dim)]
        pools = [sum(m.resources[l] for m in members) for l in range(n_dim)]
        got = coalition_value(members, req(demands), BIG)
        assert got == pytest.approx(value_oracle(pools, demands))


# ---------------------------------------------------------------------------
# requirements and property floors
# ---------------------------------------------------------------------------


def test_aggregate_floor_is_elementwise_max():
    tasks = [
        Task(0, (1.0, 2.0), (5.0,), Point2D(0, 0)),
        Task(1, (3.0, 1.0), (7.0,), Point2D(1, 1)),
    ]
    agg = aggregate_requirements(tasks)
    assert agg.properties_floor == (3.0, 2.0)
    assert agg.resources_total == (12.0,)


def test_aggregate_single_task_is_identity():
    t = Task(0, (2.0,), (4.0, 1.0), Point2D(0, 0))
    agg = aggregate_requirements([t])
    assert agg.properties_floor == t.required_properties
    assert agg.resources_total == t.required_resources


def test_aggregate_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        aggregate_requirements([])
    tasks = [
        Task(0, (1.0,), (5.0,), Point2D(0, 0)),
        Task(1, (1.0, 2.0), (5.0,), Point2D(0, 0)),
    ]
    with pytest.raises(ValueError):
        aggregate_requirements(tasks)


def test_satisfies_properties_cases():
    floor = CoalitionRequirement(properties_floor=(1.0, 2.0), resources_total=(1.0,))
    assert satisfies_properties(iv([0.0], properties=(2.0, 2.0)), floor)
    assert not satisfies_properties(iv([0.0], properties=(2.0, 1.0)), floor)
    vacuous = CoalitionRequirement(properties_floor=(0.0, 0.0), resources_total=(1.0,))
    assert satisfies_properties(iv([0.0], properties=(0.0, 0.0)), vacuous)
    with pytest.raises(ValueError):
        satisfies_properties(iv([0.0], properties=(1.0,)), floor)


# ---------------------------------------------------------------------------
# mission feasibility
# ---------------------------------------------------------------------------


def agent(x=0.0, y=0.0, flight=20.0, speed=100.0, uid=0):
    return UavAgent(
        id=uid,
        position=Point2D(x, y),
        identity=iv([flight]),
        remaining_flight_time=flight,
        speed=speed,
    )


def test_feasible_when_battery_covers_travel_plus_mission():
    # 400 m at 100 m/min is 4 minutes of travel.
    a = agent(flight=20.0, speed=100.0)
    assert feasible_for_mission(a, Point2D(400.0, 0.0), 15.0)


def test_infeasible_when_battery_falls_short():
    a = agent(flight=18.0, speed=100.0)
    assert not feasible_for_mission(a, Point2D(400.0, 0.0), 15.0)


def test_feasibility_boundary_is_inclusive():
    a = agent(flight=15.0)
    assert feasible_for_mission(a, Point2D(0.0, 0.0), 15.0)


def test_dead_agent_is_never_feasible():
    a = agent(flight=100.0)
    a.alive = False
    assert not feasible_for_mission(a, Point2D(0.0, 0.0), 1.0)


# ---------------------------------------------------------------------------
# type validation and serialization
# ---------------------------------------------------------------------------


def test_identity_vector_validation():
    with pytest.raises(ValueError):
        IdentityVector(properties=(-1.0,), resources=(1.0,))
    with pytest.raises(ValueError):
        IdentityVector(properties=(math.inf,), resources=(1.0,))
    with pytest.raises(ValueError):
        IdentityVector(properties=(1.0,), resources=(-2.0,))
    # Non-consumable marker is allowed.
    IdentityVector(properties=(1.0,), resources=(math.inf,))


def test_agent_validation():
    with pytest.raises(ValueError):
        agent(flight=-1.0)
    with pytest.raises(ValueError):
        agent(speed=0.0)


def test_requirement_rejects_negative_entries():
    with pytest.raises(ValueError):
        CoalitionRequirement(properties_floor=(-1.0,), resources_total=(1.0,))
    with pytest.raises(ValueError):
        CoalitionRequirement(properties_floor=(1.0,), resources_total=(-1.0,))


def test_coalition_completeness():
    c = Coalition(
        leader_id=100,
        center=Point2D(0, 0),
        s_count=2,
        requirement=req([0.0]),
    )
    assert not c.complete
    c.members = [1, 2]
    assert c.complete
    c.dissolved = True
    assert not c.complete


def test_agent_json_round_trip():
    a = UavAgent(
        id=7,
        position=Point2D(12.5, -3.0),
        identity=IdentityVector(properties=(1.0, 2.0), resources=(18.25, math.inf)),
        remaining_flight_time=18.25,
        speed=250.0,
    )
    back = agent_from_json_dict(agent_to_json_dict(a))
    assert back == a
    # Non-consumable entries survive as null in the wire format.
    assert agent_to_json_dict(a)["resources"][1] is None


def test_fleet_json_round_trip():
    leaders = [agent(uid=100, x=1.0), agent(uid=101, x=2.0)]
    followers = [agent(uid=0), agent(uid=1, y=5.0)]
    data = fleet_to_json_dict(leaders, followers)
    assert data["schema_version"] == 1
    back_leaders, back_followers = fleet_from_json_dict(data)
    assert back_leaders == leaders
    assert back_followers == followers
