"""Greedy leader placement.

Each leader keeps a sensing disc; leaders take turns trying one-step compass
moves, preferring coverage of the fire zone up to a threshold and breaking
ties by staying far from the other leaders. Round-robin, deterministic, no
randomness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from .geometry import Disc, FireZone, Point2D, coverage_fraction, distance

# Candidate order doubles as the tie-break: stay first, then compass moves.
_MOVE_NAMES_8 = ("stay", "N", "NE", "E", "SE", "S", "SW", "W", "NW")
_MOVE_OFFSETS = {
    "stay": (0, 0),
    "N": (0, 1),
    "NE": (1, 1),
    "E": (1, 0),
    "SE": (1, -1),
    "S": (0, -1),
    "SW": (-1, -1),
    "W": (-1, 0),
    "NW": (-1, 1),
}
_MOVE_NAMES_4 = ("stay", "N", "E", "S", "W")


@dataclass(frozen=True)
class PlacementConfig:
    coalition_radius: float  # meters
    step_size: float  # meters
    coverage_threshold: float = 0.8
    max_iterations: int = 200
    candidate_moves: int = 8

    def __post_init__(self) -> None:
        if not self.coalition_radius > 0.0:
            raise ValueError(f"coalition_radius must be positive, got {self.coalition_radius}")
        if not self.step_size > 0.0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if not 0.0 < self.coverage_threshold <= 1.0:
            raise ValueError(
                f"coverage_threshold must be in (0, 1], got {self.coverage_threshold}"
            )
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.candidate_moves not in (4, 8):
            raise ValueError(f"candidate_moves must be 4 or 8, got {self.candidate_moves}")


def placement_objective(
    center: Point2D,
    others: Sequence[Point2D],
    zone: FireZone,
    cfg: PlacementConfig,
) -> Tuple[float, float]:
    """Score a candidate center: coverage clamped at the threshold, then the
    distance to the nearest other leader (infinite when alone). Compared
    lexicographically, coverage first."""
    cov = coverage_fraction(Disc(center, cfg.coalition_radius), zone)
    coverage_component = min(cov, cfg.coverage_threshold)
    if others:
        separation_component = min(distance(center, o) for o in others)
    else:
        separation_component = math.inf
    return coverage_component, separation_component


def _score(
    pos: Point2D,
    others: Sequence[Point2D],
    cfg: PlacementConfig,
    cov_at: Callable[[Point2D], float],
) -> Tuple[float, float]:
    coverage_component = min(cov_at(pos), cfg.coverage_threshold)
    if others:
        separation_component = min(distance(pos, o) for o in others)
    else:
        separation_component = math.inf
    return coverage_component, separation_component


def _score_json(score: Tuple[float, float]) -> List[Optional[float]]:
    # JSON has no infinity; a lone leader's separation is emitted as null.
    return [score[0], None if math.isinf(score[1]) else score[1]]


def place_leaders(
    zone: FireZone,
    leader_starts: Sequence[Point2D],
    cfg: PlacementConfig,
    trace: Optional[TextIO] = None,
) -> List[Point2D]:
    """Run the round-robin greedy until a full round passes with nobody
    moving, or max_iterations rounds elapse. Returns the final centers in
    leader order."""
    if len(leader_starts) < 1:
        raise ValueError("need at least one leader")
    side = zone.field_side
    for p in leader_starts:
        if not (0.0 <= p.x <= side and 0.0 <= p.y <= side):
            raise ValueError(f"leader start {p} outside the field")

    move_names = _MOVE_NAMES_8 if cfg.candidate_moves == 8 else _MOVE_NAMES_4
    step = cfg.step_size
    positions: List[Point2D] = list(leader_starts)

    # Coverage depends only on the candidate point; cache across the whole
    # run since round-robin revisits the same spots constantly.
    cov_cache: Dict[Tuple[float, float], float] = {}

    def cov_at(p: Point2D) -> float:
        key = (p.x, p.y)
        hit = cov_cache.get(key)
        if hit is None:
            hit = coverage_fraction(Disc(p, cfg.coalition_radius), zone)
            cov_cache[key] = hit
        return hit

    def clamp(v: float) -> float:
        return min(max(v, 0.0), side)

    for rnd in range(cfg.max_iterations):
        moved = False
        for i in range(len(positions)):
            others = positions[:i] + positions[i + 1 :]
            best_name = "stay"
            best_pos = positions[i]
            stay_score = _score(best_pos, others, cfg, cov_at)
            best_score = stay_score
            for name in move_names[1:]:
                dx, dy = _MOVE_OFFSETS[name]
                cand = Point2D(
                    clamp(positions[i].x + dx * step),
                    clamp(positions[i].y + dy * step),
                )
                score = _score(cand, others, cfg, cov_at)
                if score > best_score:
                    best_name, best_pos, best_score = name, cand, score
            if best_name != "stay":
                positions[i] = best_pos
                moved = True
            if trace is not None:
                trace.write(
                    json.dumps(
                        {
                            "round": rnd,
                            "leader": i,
                            "move": best_name,
                            "score": _score_json(best_score),
                            "stay_score": _score_json(stay_score),
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        if not moved:
            break

    return [Point2D(clamp(p.x), clamp(p.y)) for p in positions]
