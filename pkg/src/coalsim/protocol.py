"""The distributed recruitment protocol.

Leaders broadcast proposals, qualified followers volunteer, leaders pick the
best subset for their open slots and bid sector anchors, and each follower
accepts at most one bid. The loop repeats over synchronous rounds until every
coalition is full or nothing can change. Everything is deterministic: agents
are visited in id order and no randomness enters the protocol.

Also here: sector assignment by exhaustive permutation search and the two
failure paths (member replacement, leader promotion).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, TextIO, Tuple

from .geometry import Disc, Point2D, distance, sector_anchors
from .model import (
    DEFAULT_BIG_L,
    Coalition,
    CoalitionRequirement,
    IdentityVector,
    UavAgent,
    coalition_value,
    feasible_for_mission,
    satisfies_properties,
)

# Exhaustive subset selection stays tractable at desk scale only; refuse
# anything past C(25, 5) candidate subsets.
MAX_SELECTION_SUBSETS = math.comb(25, 5)

MAX_SECTOR_COUNT = 8


# ---------------------------------------------------------------------------
# Messages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Proposal:
    leader_id: int
    center: Point2D
    properties_floor: Tuple[float, ...]
    mission_time: float
    priority: float


@dataclass(frozen=True)
class VolunteerResponse:
    follower_id: int
    identity: IdentityVector
    position: Point2D
    remaining_flight_time: float


@dataclass(frozen=True)
class Bid:
    leader_id: int
    follower_id: int
    anchor: Point2D
    sector: int


@dataclass(frozen=True)
class BidReply:
    follower_id: int
    leader_id: int
    accept: bool


def _encode_point(p: Point2D) -> List[float]:
    return [p.x, p.y]


def _encode_resources(resources: Tuple[float, ...]) -> List[Optional[float]]:
    return [None if math.isinf(r) else r for r in resources]


def _payload(msg: object) -> dict:
    if isinstance(msg, Proposal):
        return {
            "leader": msg.leader_id,
            "center": _encode_point(msg.center),
            "properties_floor": list(msg.properties_floor),
            "mission_time": msg.mission_time,
            "priority": msg.priority,
        }
    if isinstance(msg, VolunteerResponse):
        return {
            "follower": msg.follower_id,
            "properties": list(msg.identity.properties),
            "resources": _encode_resources(msg.identity.resources),
            "position": _encode_point(msg.position),
            "remaining_flight_time": msg.remaining_flight_time,
        }
    if isinstance(msg, Bid):
        return {
            "leader": msg.leader_id,
            "follower": msg.follower_id,
            "anchor": _encode_point(msg.anchor),
            "sector": msg.sector,
        }
    if isinstance(msg, BidReply):
        return {
            "follower": msg.follower_id,
            "leader": msg.leader_id,
            "accept": msg.accept,
        }
    raise TypeError(f"unknown message type: {type(msg).__name__}")


# ---------------------------------------------------------------------------
# Transport
# ---------------------------------------------------------------------------


class Transport:
    """Reliable, in-order delivery with a structured event log.

    Every send is stamped with a per-sender monotone sequence number and
    appended to the event log as {tick, round, from, to, kind, payload}.
    State transitions share the log, with phases in the from/to slots.
    """

    def __init__(self, sink: Optional[TextIO] = None):
        self._queues: Dict[int, List[object]] = {}
        self._next_seq: Dict[int, int] = {}
        self._tick = 0
        self.round = 0
        self.events: List[dict] = []
        self._sink = sink

    def send(self, sender: int, recipient: int, msg: object) -> None:
        seq = self._next_seq.get(sender, 0)
        self._next_seq[sender] = seq + 1
        self._queues.setdefault(recipient, []).append(msg)
        payload = _payload(msg)
        payload["seq"] = seq
        self._record(sender, recipient, type(msg).__name__, payload)

    def deliver(self, recipient: int) -> List[object]:
        return self._queues.pop(recipient, [])

    def log_transition(self, agent_id: int, role: str, old_phase: str, new_phase: str) -> None:
        self._record(old_phase, new_phase, "Transition", {"agent": agent_id, "role": role})

    def _record(self, frm, to, kind: str, payload: dict) -> None:
        self._tick += 1
        event = {
            "tick": self._tick,
            "round": self.round,
            "from": frm,
            "to": to,
            "kind": kind,
            "payload": payload,
        }
        self.events.append(event)
        if self._sink is not None:
            import json

            self._sink.write(json.dumps(event, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Agent state
# ---------------------------------------------------------------------------

LEADER_PHASES = ("Broadcasting", "Collecting", "Selecting", "Bidding", "Complete", "Failed")
FOLLOWER_PHASES = ("Idle", "Volunteered", "Committed")


@dataclass
class LeaderState:
    phase: str = "Broadcasting"
    candidate_pool: Dict[int, VolunteerResponse] = field(default_factory=dict)
    pending_bids: Dict[int, int] = field(default_factory=dict)  # follower id -> sector
    members: List[int] = field(default_factory=list)


@dataclass
class FollowerState:
    phase: str = "Idle"
    bids: List[Bid] = field(default_factory=list)
    committed_leader: Optional[int] = None
    accepted_round: Optional[int] = None


@dataclass(frozen=True)
class NegotiationLeader:
    """Everything a leader brings to the table: where its disc sits, how many
    followers it needs, and what it demands of them."""

    id: int
    center: Point2D
    radius: float
    requirement: CoalitionRequirement
    s_count: int
    priority: float = 1.0
    mission_time: float = 15.0


# ---------------------------------------------------------------------------
# Follower-side operations
# ---------------------------------------------------------------------------


def follower_handle_proposal(
    state: FollowerState,
    msg: Proposal,
    agent: UavAgent,
    mission_time: float,
    comm_range: float = math.inf,
) -> Optional[VolunteerResponse]:
    """Volunteer iff qualified: alive and uncommitted, meets the property
    floor, battery covers travel plus mission, and the leader is in range.
    Anything else is silent non-response."""
    if not agent.alive or state.phase == "Committed":
        return None
    floor = CoalitionRequirement(
        properties_floor=msg.properties_floor, resources_total=()
    )
    if not satisfies_properties(agent.identity, floor):
        return None
    if not feasible_for_mission(agent, msg.center, mission_time):
        return None
    if distance(agent.position, msg.center) > comm_range:
        return None
    return VolunteerResponse(
        follower_id=agent.id,
        identity=agent.identity,
        position=agent.position,
        remaining_flight_time=agent.remaining_flight_time,
    )


def follower_choose_bid(
    state: FollowerState,
    bids: Sequence[Bid],
    agent: UavAgent,
    region_priorities: Mapping[int, float],
) -> List[BidReply]:
    """Reply to every bid, accepting exactly one: highest region priority,
    then nearest sector anchor, then lowest leader id. A committed follower
    rejects everything."""
    if not bids:
        return []
    accept_id: Optional[int] = None
    if state.phase != "Committed":
        best = min(
            bids,
            key=lambda b: (
                -region_priorities.get(b.leader_id, 1.0),
                distance(agent.position, b.anchor),
                b.leader_id,
            ),
        )
        accept_id = best.leader_id
    return [
        BidReply(
            follower_id=agent.id,
            leader_id=b.leader_id,
            accept=(b.leader_id == accept_id),
        )
        for b in bids
    ]


# ---------------------------------------------------------------------------
# Leader-side selection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SelectionResult:
    ids: Tuple[int, ...]
    value: float
    under_resourced: bool
    shortfall: int


def leader_select_members(
    candidates: Sequence[VolunteerResponse],
    req: CoalitionRequirement,
    s_needed: int,
    center: Point2D,
    big_l: float = DEFAULT_BIG_L,
    *,
    prior_members: Sequence[IdentityVector] = (),
    boundary_feasible: bool = True,
) -> SelectionResult:
    """Exhaustively score every size-s_needed subset of the candidate pool
    (pooled together with any already-recruited members) and keep the best.

    Ranking: value, then smaller total candidate-to-center distance, then
    the lexicographically smallest id set. When the pool is smaller than the
    open slot count, the whole pool is taken and the shortfall reported.
    When even the best subset is value-infeasible it is still returned, with
    the under_resourced flag raised.
    """
    if s_needed < 0:
        raise ValueError(f"s_needed must be >= 0, got {s_needed}")
    if s_needed == 0:
        return SelectionResult(ids=(), value=0.0, under_resourced=False, shortfall=0)

    pool = sorted(candidates, key=lambda c: c.follower_id)
    ids_seen = [c.follower_id for c in pool]
    if len(set(ids_seen)) != len(ids_seen):
        raise ValueError("duplicate follower ids in candidate pool")

    take = min(s_needed, len(pool))
    shortfall = s_needed - take
    if take == 0:
        return SelectionResult(ids=(), value=0.0, under_resourced=True, shortfall=shortfall)
    if math.comb(len(pool), take) > MAX_SELECTION_SUBSETS:
        raise ValueError(
            f"selection over C({len(pool)}, {take}) subsets exceeds the desk-scale cap"
        )

    prior = list(prior_members)
    best_key = None
    best_ids: Tuple[int, ...] = ()
    best_value = 0.0
    for subset in itertools.combinations(pool, take):
        identities = prior + [c.identity for c in subset]
        value = coalition_value(identities, req, big_l, boundary_feasible)
        total_dist = math.fsum(distance(c.position, center) for c in subset)
        ids = tuple(c.follower_id for c in subset)
        key = (-value, total_dist, ids)
        if best_key is None or key < best_key:
            best_key = key
            best_ids = ids
            best_value = value
    return SelectionResult(
        ids=best_ids,
        value=best_value,
        under_resourced=(best_value <= -big_l),
        shortfall=shortfall,
    )


# ---------------------------------------------------------------------------
# Sector assignment
# ---------------------------------------------------------------------------


def assign_sectors(
    members: Sequence[Tuple[int, Point2D]],
    anchors: Sequence[Point2D],
    speeds: Mapping[int, float],
) -> Dict[int, int]:
    """Brute-force the cheapest member-to-sector matching: total flight time
    over all S! permutations, ties to the lexicographically smallest
    permutation (in the given member order)."""
    if len(members) != len(anchors):
        raise ValueError(
            f"member/anchor length mismatch: {len(members)} vs {len(anchors)}"
        )
    s = len(members)
    if s > MAX_SECTOR_COUNT:
        raise ValueError(f"sector count {s} exceeds the cap of {MAX_SECTOR_COUNT}")
    if s == 0:
        return {}
    best_perm: Optional[Tuple[int, ...]] = None
    best_cost = math.inf
    for perm in itertools.permutations(range(s)):
        cost = math.fsum(
            distance(members[i][1], anchors[perm[i]]) / speeds[members[i][0]]
            for i in range(s)
        )
        if cost < best_cost:
            best_cost = cost
            best_perm = perm
    assert best_perm is not None
    return {members[i][0]: best_perm[i] for i in range(s)}


# ---------------------------------------------------------------------------
# The negotiation loop
# ---------------------------------------------------------------------------


def run_negotiation(
    leaders: Sequence[NegotiationLeader],
    followers: Sequence[UavAgent],
    transport: Transport,
    max_rounds: int,
    comm_range: float = math.inf,
    big_l: float = DEFAULT_BIG_L,
    boundary_feasible: bool = True,
) -> List[Coalition]:
    """Synchronous rounds of broadcast / volunteer / select-bid / reply /
    lock until every coalition is complete, progress stalls, or max_rounds
    runs out. Incomplete coalitions come back flagged with their shortfall.
    """
    if max_rounds < 1:
        raise ValueError(f"max_rounds must be >= 1, got {max_rounds}")
    leaders = list(leaders)
    leader_ids = [ld.id for ld in leaders]
    if len(set(leader_ids)) != len(leader_ids):
        raise ValueError("duplicate leader ids")
    ordered = sorted(leaders, key=lambda ld: ld.id)

    followers = sorted(followers, key=lambda f: f.id)
    agents = {f.id: f for f in followers}
    priorities = {ld.id: ld.priority for ld in leaders}

    lstates: Dict[int, LeaderState] = {ld.id: LeaderState() for ld in leaders}
    fstates: Dict[int, FollowerState] = {f.id: FollowerState() for f in followers}
    coalitions: Dict[int, Coalition] = {
        ld.id: Coalition(
            leader_id=ld.id,
            center=ld.center,
            s_count=ld.s_count,
            requirement=ld.requirement,
        )
        for ld in leaders
    }
    member_pos: Dict[int, Dict[int, Point2D]] = {ld.id: {} for ld in leaders}

    def set_leader_phase(ld_id: int, phase: str) -> None:
        st = lstates[ld_id]
        if st.phase != phase:
            transport.log_transition(ld_id, "leader", st.phase, phase)
            st.phase = phase

    def set_follower_phase(f_id: int, phase: str) -> None:
        st = fstates[f_id]
        if st.phase != phase:
            transport.log_transition(f_id, "follower", st.phase, phase)
            st.phase = phase

    for rnd in range(max_rounds):
        transport.round = rnd
        incomplete = [ld for ld in ordered if len(lstates[ld.id].members) < ld.s_count]
        if not incomplete:
            break

        # A follower that accepted but was never locked (its leader vanished
        # mid-round) gives up after one full round and becomes recruitable.
        for f in followers:
            st = fstates[f.id]
            if (
                st.phase == "Committed"
                and st.committed_leader is not None
                and f.id not in lstates.get(st.committed_leader, LeaderState()).members
                and st.accepted_round is not None
                and rnd - st.accepted_round >= 1
            ):
                st.committed_leader = None
                st.accepted_round = None
                set_follower_phase(f.id, "Idle")

        # (1) Broadcast: each incomplete leader proposes to every living
        # follower inside its communication range.
        for ld in incomplete:
            set_leader_phase(ld.id, "Broadcasting")
            prop = Proposal(
                leader_id=ld.id,
                center=ld.center,
                properties_floor=ld.requirement.properties_floor,
                mission_time=ld.mission_time,
                priority=ld.priority,
            )
            for f in followers:
                if f.alive and distance(f.position, ld.center) <= comm_range:
                    transport.send(ld.id, f.id, prop)

        # (2) Volunteer: qualified followers answer each proposal they hold.
        for f in followers:
            st = fstates[f.id]
            proposals = transport.deliver(f.id)
            responded = False
            for prop in proposals:
                resp = follower_handle_proposal(
                    st, prop, f, prop.mission_time, comm_range=comm_range
                )
                if resp is not None:
                    transport.send(f.id, prop.leader_id, resp)
                    responded = True
            if responded and st.phase == "Idle":
                set_follower_phase(f.id, "Volunteered")

        # (3) Select and bid: leaders refresh their pools from this round's
        # volunteers and bid tentative sector anchors for their open slots.
        for ld in incomplete:
            lst = lstates[ld.id]
            set_leader_phase(ld.id, "Collecting")
            lst.candidate_pool = {
                r.follower_id: r for r in transport.deliver(ld.id)
            }
            set_leader_phase(ld.id, "Selecting")
            lst.pending_bids = {}
            if not lst.candidate_pool:
                continue
            coalition = coalitions[ld.id]
            s_needed = ld.s_count - len(lst.members)
            prior = [agents[m].identity for m in lst.members]
            selection = leader_select_members(
                list(lst.candidate_pool.values()),
                ld.requirement,
                s_needed,
                ld.center,
                big_l,
                prior_members=prior,
                boundary_feasible=boundary_feasible,
            )
            if not selection.ids:
                continue
            all_anchors = sector_anchors(Disc(ld.center, ld.radius), ld.s_count)
            open_sectors = sorted(
                set(range(ld.s_count)) - set(coalition.sector_map.values())
            )
            chosen = sorted(selection.ids)
            slots = open_sectors[: len(chosen)]
            tentative = assign_sectors(
                [(fid, lst.candidate_pool[fid].position) for fid in chosen],
                [all_anchors[s] for s in slots],
                {fid: agents[fid].speed for fid in chosen},
            )
            set_leader_phase(ld.id, "Bidding")
            for fid in chosen:
                sector = slots[tentative[fid]]
                lst.pending_bids[fid] = sector
                transport.send(
                    ld.id,
                    fid,
                    Bid(leader_id=ld.id, follower_id=fid, anchor=all_anchors[sector], sector=sector),
                )

        # (4) Reply: each follower accepts at most one of this round's bids.
        for f in followers:
            bids = [m for m in transport.deliver(f.id) if isinstance(m, Bid)]
            if not bids:
                continue
            st = fstates[f.id]
            replies = follower_choose_bid(st, bids, f, priorities)
            for reply in replies:
                transport.send(f.id, reply.leader_id, reply)
                if reply.accept:
                    st.committed_leader = reply.leader_id
                    st.accepted_round = rnd
                    set_follower_phase(f.id, "Committed")

        # (5) Lock: leaders absorb accepted followers; full coalitions fix
        # their final sector assignment over all members at once.
        progress = False
        for ld in incomplete:
            lst = lstates[ld.id]
            replies = [m for m in transport.deliver(ld.id) if isinstance(m, BidReply)]
            accepts = sorted(
                (r for r in replies if r.accept), key=lambda r: r.follower_id
            )
            refusals = [r for r in replies if not r.accept]
            coalition = coalitions[ld.id]
            for r in accepts:
                lst.members.append(r.follower_id)
                coalition.members.append(r.follower_id)
                coalition.sector_map[r.follower_id] = lst.pending_bids[r.follower_id]
                member_pos[ld.id][r.follower_id] = lst.candidate_pool[r.follower_id].position
                progress = True
            if len(lst.members) == ld.s_count:
                all_anchors = sector_anchors(Disc(ld.center, ld.radius), ld.s_count)
                pairs = [(m, member_pos[ld.id][m]) for m in sorted(lst.members)]
                coalition.sector_map = assign_sectors(
                    pairs,
                    all_anchors,
                    {m: agents[m].speed for m in lst.members},
                )
                coalition.value = coalition_value(
                    [agents[m].identity for m in lst.members],
                    ld.requirement,
                    big_l,
                    boundary_feasible,
                )
                coalition.under_resourced = coalition.value <= -big_l
                set_leader_phase(ld.id, "Complete")
            elif refusals and lst.phase == "Bidding":
                set_leader_phase(ld.id, "Selecting")
        if not progress:
            break

    # Flag whatever is still short.
    for ld in ordered:
        lst = lstates[ld.id]
        coalition = coalitions[ld.id]
        if len(lst.members) < ld.s_count:
            coalition.shortfall = ld.s_count - len(lst.members)
            if lst.members:
                coalition.value = coalition_value(
                    [agents[m].identity for m in lst.members],
                    ld.requirement,
                    big_l,
                    boundary_feasible,
                )
                coalition.under_resourced = coalition.value <= -big_l
            else:
                coalition.value = 0.0
                coalition.under_resourced = True
            set_leader_phase(ld.id, "Failed")
    return [coalitions[ld.id] for ld in leaders]


# ---------------------------------------------------------------------------
# Failure handling
# ---------------------------------------------------------------------------


def handle_member_failure(
    coalition: Coalition,
    failed_id: int,
    standby_pool: Sequence[UavAgent],
    transport: Transport,
    *,
    mission_time: float,
    agents: Mapping[int, UavAgent],
    comm_range: float = math.inf,
    big_l: float = DEFAULT_BIG_L,
    boundary_feasible: bool = True,
    sector_anchor: Optional[Point2D] = None,
) -> Coalition:
    """Drop the failed member and recruit the best qualified standby into the
    vacated sector. An empty qualified pool leaves the coalition degraded."""
    if failed_id not in coalition.members:
        raise ValueError(f"follower {failed_id} is not a member of this coalition")
    vacated = coalition.sector_map.pop(failed_id, None)
    coalition.members.remove(failed_id)

    prop = Proposal(
        leader_id=coalition.leader_id,
        center=coalition.center,
        properties_floor=coalition.requirement.properties_floor,
        mission_time=mission_time,
        priority=1.0,
    )
    responses: List[VolunteerResponse] = []
    for standby in sorted(standby_pool, key=lambda a: a.id):
        if not standby.alive or distance(standby.position, coalition.center) > comm_range:
            continue
        transport.send(coalition.leader_id, standby.id, prop)
        state = FollowerState()
        resp = follower_handle_proposal(state, prop, standby, mission_time, comm_range)
        if resp is not None:
            transport.send(standby.id, coalition.leader_id, resp)
            responses.append(resp)

    if not responses:
        coalition.degraded = True
        return coalition

    prior = [agents[m].identity for m in coalition.members]
    selection = leader_select_members(
        responses,
        coalition.requirement,
        1,
        coalition.center,
        big_l,
        prior_members=prior,
        boundary_feasible=boundary_feasible,
    )
    winner = selection.ids[0]
    anchor = sector_anchor if sector_anchor is not None else coalition.center
    sector = vacated if vacated is not None else 0
    transport.send(
        coalition.leader_id,
        winner,
        Bid(leader_id=coalition.leader_id, follower_id=winner, anchor=anchor, sector=sector),
    )
    transport.send(
        winner,
        coalition.leader_id,
        BidReply(follower_id=winner, leader_id=coalition.leader_id, accept=True),
    )
    coalition.members.append(winner)
    coalition.sector_map[winner] = sector
    coalition.degraded = False
    return coalition


def handle_leader_failure(
    coalition: Coalition,
    *,
    agents: Mapping[int, UavAgent],
) -> Coalition:
    """Promote the living member with the longest battery (tie: lowest id)
    to leader. Its sector goes vacant, to be refilled by the member-failure
    path; with no living members the coalition dissolves."""
    living = [m for m in coalition.members if agents[m].alive]
    if not living:
        coalition.dissolved = True
        return coalition
    promoted = sorted(living, key=lambda m: (-agents[m].remaining_flight_time, m))[0]
    coalition.members.remove(promoted)
    coalition.sector_map.pop(promoted, None)
    coalition.leader_id = promoted
    coalition.degraded = True
    return coalition
