"""Centralized baseline.

A planner with global knowledge assigns followers to every coalition sector
position at once. Two modes: exhaustive search over member partitions
(maximizing total coalition value, desk-scale only) and a polynomial
min-total-distance assignment for the battery-only reduction, where value
maximization collapses to distance minimization.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import Point2D, distance
from .model import (
    DEFAULT_BIG_L,
    CoalitionRequirement,
    UavAgent,
    coalition_value,
    feasible_for_mission,
    satisfies_properties,
)
from .protocol import assign_sectors

MAX_CENTRAL_POSITIONS = 12
MAX_CENTRAL_ENUMERATION = 5_000_000

# Finite stand-in for "cannot serve this position" in the cost matrix.
_INFEASIBLE_COST = 1.0e15


class CoalitionSlot(NamedTuple):
    """One coalition as the central planner sees it."""

    center: Point2D
    requirement: CoalitionRequirement
    anchors: Tuple[Point2D, ...]


@dataclass(frozen=True)
class CentralResult:
    assignment: Dict[int, Tuple[int, int]]  # follower id -> (coalition, sector)
    total_value: float
    complete: bool


@dataclass(frozen=True)
class MinDistanceResult:
    assignment: Dict[int, int]  # follower id -> position index
    total_distance: float
    complete: bool


def _qualifies(
    agent: UavAgent,
    slot: CoalitionSlot,
    mission_time: float,
    comm_range: float,
) -> bool:
    return (
        agent.alive
        and satisfies_properties(agent.identity, slot.requirement)
        and feasible_for_mission(agent, slot.center, mission_time)
        and distance(agent.position, slot.center) <= comm_range
    )


def central_optimal_assignment(
    followers: Sequence[UavAgent],
    coalitions: Sequence[Tuple[Point2D, CoalitionRequirement, Sequence[Point2D]]],
    big_l: float = DEFAULT_BIG_L,
    *,
    mission_time: float = 15.0,
    comm_range: float = math.inf,
    boundary_feasible: bool = True,
) -> CentralResult:
    """Enumerate every split of the feasible followers into per-coalition
    member sets (then sector permutations) and keep the best.

    Ranking: most positions filled, then highest total value, then smallest
    total member-to-anchor distance, then the lexicographically smallest
    flat member-id tuple. Followers face the same property, battery, and
    range filters the distributed protocol applies.
    """
    slots = [CoalitionSlot(c, r, tuple(a)) for c, r, a in coalitions]
    n_positions = sum(len(s.anchors) for s in slots)
    if n_positions > MAX_CENTRAL_POSITIONS:
        raise ValueError(
            f"{n_positions} positions exceeds the exhaustive cap of "
            f"{MAX_CENTRAL_POSITIONS}; use central_min_distance_assignment"
        )

    agents = {f.id: f for f in sorted(followers, key=lambda f: f.id)}
    feasible: List[List[int]] = [
        [fid for fid, f in agents.items() if _qualifies(f, slot, mission_time, comm_range)]
        for slot in slots
    ]

    # Upper bound on DFS leaves, accounting for earlier coalitions
    # consuming members from the shared pool.
    bound = 1
    consumed = 0
    for slot, pool in zip(slots, feasible):
        avail = min(len(pool), max(0, len(agents) - consumed))
        take = min(len(slot.anchors), avail)
        bound *= math.comb(avail, take)
        consumed += take
    if bound > MAX_CENTRAL_ENUMERATION:
        raise ValueError(
            f"about {bound} member partitions to enumerate exceeds the cap of "
            f"{MAX_CENTRAL_ENUMERATION}; use central_min_distance_assignment"
        )

    # Value and tie-break cost depend only on (coalition, subset); memoize
    # across DFS branches.
    score_memo: Dict[Tuple[int, Tuple[int, ...]], Tuple[float, float, Dict[int, int]]] = {}

    def subset_score(ci: int, ids: Tuple[int, ...]) -> Tuple[float, float, Dict[int, int]]:
        hit = score_memo.get((ci, ids))
        if hit is not None:
            return hit
        slot = slots[ci]
        value = coalition_value(
            [agents[fid].identity for fid in ids],
            slot.requirement,
            big_l,
            boundary_feasible,
        )
        anchors = list(slot.anchors[: len(ids)])
        sectors = assign_sectors(
            [(fid, agents[fid].position) for fid in ids],
            anchors,
            {fid: agents[fid].speed for fid in ids},
        )
        cost = math.fsum(
            distance(agents[fid].position, slot.anchors[sec]) for fid, sec in sectors.items()
        )
        result = (value, cost, sectors)
        score_memo[(ci, ids)] = result
        return result

    best_key: Optional[Tuple] = None
    best_subsets: List[Tuple[int, ...]] = []

    def dfs(ci: int, used: frozenset, filled: int, value_acc: float, cost_acc: float,
            ids_acc: Tuple[int, ...], chosen: List[Tuple[int, ...]]) -> None:
        nonlocal best_key, best_subsets
        if ci == len(slots):
            key = (-filled, -value_acc, cost_acc, ids_acc)
            if best_key is None or key < best_key:
                best_key = key
                best_subsets = list(chosen)
            return
        avail = [fid for fid in feasible[ci] if fid not in used]
        take = min(len(slots[ci].anchors), len(avail))
        if take == 0:
            dfs(ci + 1, used, filled, value_acc, cost_acc, ids_acc, chosen + [()])
            return
        for subset in itertools.combinations(avail, take):
            value, cost, _ = subset_score(ci, subset)
            dfs(
                ci + 1,
                used | set(subset),
                filled + take,
                value_acc + value,
                cost_acc + cost,
                ids_acc + subset,
                chosen + [subset],
            )

    dfs(0, frozenset(), 0, 0.0, 0.0, (), [])

    assignment: Dict[int, Tuple[int, int]] = {}
    total_value = 0.0
    filled = 0
    for ci, subset in enumerate(best_subsets):
        if not subset:
            continue
        value, _, sectors = subset_score(ci, subset)
        total_value += value
        filled += len(subset)
        for fid, sec in sectors.items():
            assignment[fid] = (ci, sec)
    return CentralResult(
        assignment=assignment,
        total_value=total_value,
        complete=(filled == n_positions),
    )


def central_min_distance_assignment(
    followers: Sequence[UavAgent],
    anchors: Sequence[Point2D],
    *,
    anchor_centers: Optional[Sequence[Point2D]] = None,
    anchor_requirements: Optional[Sequence[CoalitionRequirement]] = None,
    mission_time: float = 15.0,
    comm_range: float = math.inf,
) -> MinDistanceResult:
    """Optimal follower-to-position matching minimizing total distance.

    Battery-only scenarios reduce value maximization to exactly this
    problem, and the rectangular assignment solver keeps it polynomial where
    the exhaustive mode would blow up. Per-position feasibility (property
    floor, battery, range against the owning coalition's center) masks out
    forbidden pairs.
    """
    agents = sorted(followers, key=lambda f: f.id)
    n, p = len(agents), len(anchors)
    if p == 0:
        return MinDistanceResult(assignment={}, total_distance=0.0, complete=True)
    if anchor_centers is not None and len(anchor_centers) != p:
        raise ValueError("anchor_centers length must match anchors")
    if anchor_requirements is not None and len(anchor_requirements) != p:
        raise ValueError("anchor_requirements length must match anchors")

    cost = np.full((n, p), _INFEASIBLE_COST, dtype=np.float64)
    for i, f in enumerate(agents):
        if not f.alive:
            continue
        for j, anchor in enumerate(anchors):
            gate_center = anchor_centers[j] if anchor_centers is not None else anchor
            if anchor_requirements is not None and not satisfies_properties(
                f.identity, anchor_requirements[j]
            ):
                continue
            if not feasible_for_mission(f, gate_center, mission_time):
                continue
            if distance(f.position, gate_center) > comm_range:
                continue
            cost[i, j] = distance(f.position, anchor)

    rows, cols = linear_sum_assignment(cost)
    assignment: Dict[int, int] = {}
    total = 0.0
    for r, c in zip(rows.tolist(), cols.tolist()):
        if cost[r, c] >= _INFEASIBLE_COST:
            continue
        assignment[agents[r].id] = c
        total += float(cost[r, c])
    return MinDistanceResult(
        assignment=assignment,
        total_distance=total,
        complete=(len(assignment) == p),
    )
