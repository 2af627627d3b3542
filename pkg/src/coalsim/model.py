"""UAV identity vectors, task and coalition requirements, and the coalition
value machinery: the property/resource constraints, the over-spend penalty,
and battery-based mission feasibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .geometry import Point2D, distance

# Finite stand-in for the "large number" that penalizes under-resourced
# coalitions; kept finite so values stay comparable.
DEFAULT_BIG_L = 1.0e9


@dataclass(frozen=True)
class IdentityVector:
    """A UAV's advertised capabilities.

    ``properties`` are graded capability entries (all finite, >= 0).
    ``resources`` are pooled contributions (>= 0); a non-consumable resource
    is represented as ``math.inf``, consumable entries are finite.
    """

    properties: Tuple[float, ...]
    resources: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "properties", tuple(float(p) for p in self.properties))
        object.__setattr__(self, "resources", tuple(float(r) for r in self.resources))
        for p in self.properties:
            if not (p >= 0.0 and math.isfinite(p)):
                raise ValueError(f"property entries must be finite and >= 0, got {p}")
        for r in self.resources:
            if not r >= 0.0:
                raise ValueError(f"resource entries must be >= 0, got {r}")


@dataclass
class UavAgent:
    """A follower/observer UAV: position, identity, battery and speed."""

    id: int
    position: Point2D
    identity: IdentityVector
    remaining_flight_time: float  # minutes
    speed: float  # meters per minute
    alive: bool = True

    def __post_init__(self) -> None:
        if self.remaining_flight_time < 0.0:
            raise ValueError(f"remaining flight time must be >= 0, got {self.remaining_flight_time}")
        if not self.speed > 0.0:
            raise ValueError(f"speed must be positive, got {self.speed}")


@dataclass(frozen=True)
class Task:
    """A sensing task inside a coalition's region, with its property floor
    and resource demand."""

    id: int
    required_properties: Tuple[float, ...]
    required_resources: Tuple[float, ...]
    location: Point2D

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "required_properties", tuple(float(p) for p in self.required_properties)
        )
        object.__setattr__(
            self, "required_resources", tuple(float(r) for r in self.required_resources)
        )
        for p in self.required_properties:
            if not (p >= 0.0 and math.isfinite(p)):
                raise ValueError(f"required properties must be finite and >= 0, got {p}")
        for r in self.required_resources:
            # An infinite demand marks "needs the non-consumable resource".
            if not r >= 0.0:
                raise ValueError(f"required resources must be >= 0, got {r}")


@dataclass(frozen=True)
class CoalitionRequirement:
    """Aggregated demand a coalition must satisfy: an element-wise property
    floor every member must meet, and a resource total the members must
    collectively provide."""

    properties_floor: Tuple[float, ...]
    resources_total: Tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "properties_floor", tuple(float(p) for p in self.properties_floor)
        )
        object.__setattr__(
            self, "resources_total", tuple(float(r) for r in self.resources_total)
        )
        for v in (*self.properties_floor, *self.resources_total):
            if v < 0.0:
                raise ValueError(f"requirement entries must be >= 0, got {v}")


@dataclass
class Coalition:
    """One leader plus up to ``s_count`` recruited observers covering a disc."""

    leader_id: int
    center: Point2D
    s_count: int
    requirement: CoalitionRequirement
    members: List[int] = field(default_factory=list)
    sector_map: Dict[int, int] = field(default_factory=dict)
    value: float = 0.0
    under_resourced: bool = False
    shortfall: int = 0
    degraded: bool = False
    dissolved: bool = False

    @property
    def complete(self) -> bool:
        return not self.dissolved and len(self.members) == self.s_count


def aggregate_requirements(tasks: Sequence[Task]) -> CoalitionRequirement:
    """Fold a region's tasks into one coalition requirement: the element-wise
    maximum of the property floors and the element-wise sum of the resource
    demands."""
    if not tasks:
        raise ValueError("cannot aggregate an empty task list")
    n_p = len(tasks[0].required_properties)
    n_r = len(tasks[0].required_resources)
    for t in tasks:
        if len(t.required_properties) != n_p or len(t.required_resources) != n_r:
            raise ValueError("tasks have mismatched requirement dimensions")
    floor = tuple(max(t.required_properties[j] for t in tasks) for j in range(n_p))
    total = tuple(math.fsum(t.required_resources[j] for t in tasks) for j in range(n_r))
    return CoalitionRequirement(properties_floor=floor, resources_total=total)


def satisfies_properties(candidate: IdentityVector, req: CoalitionRequirement) -> bool:
    """True iff every property entry of the candidate meets the floor."""
    if len(candidate.properties) != len(req.properties_floor):
        raise ValueError(
            f"property dimension mismatch: candidate has {len(candidate.properties)}, "
            f"requirement has {len(req.properties_floor)}"
        )
    return all(p >= floor for p, floor in zip(candidate.properties, req.properties_floor))


def gamma(x: float, big_l: float = DEFAULT_BIG_L, boundary_feasible: bool = True) -> float:
    """Penalty on a pooled-to-required resource ratio.

    Insufficient pooling earns -big_l; anything at or beyond sufficiency is
    charged its own over-spend, -x. With boundary_feasible (the default),
    exact sufficiency x == 1 counts as feasible and scores -1; without it,
    x == 1 falls in the -big_l branch.
    """
    if x < 0.0:
        raise ValueError(f"ratio must be >= 0, got {x}")
    if not big_l > 0.0:
        raise ValueError(f"big_l must be positive, got {big_l}")
    if boundary_feasible:
        return -x if x >= 1.0 else -big_l
    return -x if x > 1.0 else -big_l


def coalition_value(
    members: Sequence[IdentityVector],
    req: CoalitionRequirement,
    big_l: float = DEFAULT_BIG_L,
    boundary_feasible: bool = True,
) -> float:
    """Value of a member set: the sum over resource dimensions of the penalty
    on (pooled resources / required resources).

    Dimensions with a zero requirement contribute nothing. Non-consumable
    dimensions (infinite pool or infinite demand) become a boolean
    availability check: -1 when some member carries the marker, -big_l when
    the demand is infinite and nobody does.
    """
    if not members:
        raise ValueError("coalition value needs at least one member")
    n_r = len(req.resources_total)
    for m in members:
        if len(m.resources) != n_r:
            raise ValueError(
                f"resource dimension mismatch: member has {len(m.resources)}, "
                f"requirement has {n_r}"
            )
    total = 0.0
    for l in range(n_r):
        required = req.resources_total[l]
        if required == 0.0:
            continue
        # fsum: pooled totals must not depend on member order.
        pooled = math.fsum(m.resources[l] for m in members)
        if math.isinf(pooled):
            total += -1.0
        elif math.isinf(required):
            total += -big_l
        else:
            total += gamma(pooled / required, big_l, boundary_feasible)
    return total


def feasible_for_mission(agent: UavAgent, target: Point2D, mission_time: float) -> bool:
    """True iff the agent's battery covers the flight to the target plus the
    mission itself (boundary inclusive). Dead agents are never feasible."""
    if not agent.alive:
        return False
    travel_minutes = distance(agent.position, target) / agent.speed
    return agent.remaining_flight_time >= travel_minutes + mission_time


def _encode_resource(r: float) -> Optional[float]:
    # JSON has no portable infinity; a null entry marks a non-consumable.
    return None if math.isinf(r) else r


def agent_to_json_dict(agent: UavAgent) -> dict:
    return {
        "id": agent.id,
        "position": [agent.position.x, agent.position.y],
        "properties": list(agent.identity.properties),
        "resources": [_encode_resource(r) for r in agent.identity.resources],
        "flight_time_min": agent.remaining_flight_time,
        "speed_m_per_min": agent.speed,
    }


def agent_from_json_dict(data: dict) -> UavAgent:
    resources = tuple(math.inf if r is None else float(r) for r in data["resources"])
    return UavAgent(
        id=int(data["id"]),
        position=Point2D(float(data["position"][0]), float(data["position"][1])),
        identity=IdentityVector(
            properties=tuple(float(p) for p in data["properties"]),
            resources=resources,
        ),
        remaining_flight_time=float(data["flight_time_min"]),
        speed=float(data["speed_m_per_min"]),
    )


def fleet_to_json_dict(leaders: Sequence[UavAgent], followers: Sequence[UavAgent]) -> dict:
    return {
        "schema_version": 1,
        "leaders": [agent_to_json_dict(a) for a in leaders],
        "followers": [agent_to_json_dict(a) for a in followers],
    }


def fleet_from_json_dict(data: dict) -> Tuple[List[UavAgent], List[UavAgent]]:
    leaders = [agent_from_json_dict(d) for d in data["leaders"]]
    followers = [agent_from_json_dict(d) for d in data["followers"]]
    return leaders, followers
