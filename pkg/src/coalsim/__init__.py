"""Deterministic simulator for leader-led UAV coalition formation over a
wildfire zone: greedy leader placement, a volunteer/bid recruitment protocol,
and a centralized optimal baseline for comparison."""

from .central import (
    CentralResult,
    CoalitionSlot,
    MinDistanceResult,
    central_min_distance_assignment,
    central_optimal_assignment,
)
from .engine import (
    BatchMetrics,
    CentralOutcome,
    LEADER_ID_BASE,
    PreparedScenario,
    ScenarioConfig,
    ScenarioResult,
    execute_central,
    generate_fleet,
    prepare_scenario,
    run_batch,
    run_scenario,
)
from .geometry import (
    Disc,
    FireZone,
    Point2D,
    coverage_fraction,
    distance,
    generate_fire_zone,
    sector_anchors,
)
from .model import (
    DEFAULT_BIG_L,
    Coalition,
    CoalitionRequirement,
    IdentityVector,
    Task,
    UavAgent,
    aggregate_requirements,
    coalition_value,
    feasible_for_mission,
    gamma,
    satisfies_properties,
)
from .placement import PlacementConfig, place_leaders
from .protocol import (
    NegotiationLeader,
    Transport,
    assign_sectors,
    handle_leader_failure,
    handle_member_failure,
    run_negotiation,
)

__version__ = "0.1.0"

__all__ = [
    "Disc",
    "FireZone",
    "Point2D",
    "coverage_fraction",
    "distance",
    "generate_fire_zone",
    "sector_anchors",
    "DEFAULT_BIG_L",
    "Coalition",
    "CoalitionRequirement",
    "IdentityVector",
    "Task",
    "UavAgent",
    "aggregate_requirements",
    "coalition_value",
    "feasible_for_mission",
    "gamma",
    "satisfies_properties",
    "PlacementConfig",
    "place_leaders",
    "NegotiationLeader",
    "Transport",
    "assign_sectors",
    "run_negotiation",
    "handle_member_failure",
    "handle_leader_failure",
    "CoalitionSlot",
    "CentralResult",
    "MinDistanceResult",
    "central_optimal_assignment",
    "central_min_distance_assignment",
    "LEADER_ID_BASE",
    "ScenarioConfig",
    "PreparedScenario",
    "ScenarioResult",
    "CentralOutcome",
    "BatchMetrics",
    "generate_fleet",
    "prepare_scenario",
    "run_scenario",
    "execute_central",
    "run_batch",
    "__version__",
]
