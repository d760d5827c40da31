"""Scenario constructors: situation assignments to initial worlds.

Constructors are registered by name so configs and traces can reference
them. Each takes the merged parameter map (scenario params, swarm geometry,
then the situation assignment, later entries winning) and a substream for
any randomized placement.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Mapping

from .errors import UnknownScenario
from .rng import Substream
from .world import AgentBody, AgentKind, ObjectOfInterest, Rect, WorldState

ScenarioConstructor = Callable[
    [Mapping[str, Any], Substream], tuple[WorldState, dict[str, AgentBody]]
]

_SCENARIOS: dict[str, ScenarioConstructor] = {}


def register_scenario(name: str) -> Callable[[ScenarioConstructor], ScenarioConstructor]:
    def deco(fn: ScenarioConstructor) -> ScenarioConstructor:
        _SCENARIOS[name] = fn
        return fn

    return deco


def scenario_names() -> list[str]:
    return sorted(_SCENARIOS)


def build_scenario(
    name: str, params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    try:
        fn = _SCENARIOS[name]
    except KeyError:
        raise UnknownScenario(name) from None
    return fn(params, rng)


def _get(params: Mapping[str, Any], key: str, default):
    value = params.get(key, default)
    return value if value is not None else default


def _robot_ring(
    params: Mapping[str, Any], center: tuple[float, float]
) -> dict[str, AgentBody]:
    """Place robots on rings around the operator, one separation apart."""
    n = int(_get(params, "n_robots", 12))
    spacing = float(_get(params, "separation_distance", 1.5))
    sense = float(_get(params, "robot_sense_radius", 2.5))
    comm = float(_get(params, "comm_radius", 4.0))
    speed = float(_get(params, "robot_max_speed", 0.5))
    bodies: dict[str, AgentBody] = {}
    placed = 0
    ring = 1
    while placed < n:
        radius = ring * spacing
        slots = max(1, int(2 * math.pi * radius / spacing))
        for k in range(slots):
            if placed >= n:
                break
            angle = 2 * math.pi * k / slots
            bodies[f"robot_{placed:02d}"] = AgentBody(
                id=f"robot_{placed:02d}",
                kind=AgentKind.ROBOT,
                position=(center[0] + radius * math.cos(angle), center[1] + radius * math.sin(angle)),
                heading=angle,
                max_speed=speed,
                sense_radius=sense,
                comm_radius=comm,
            )
            placed += 1
        ring += 1
    return bodies


@register_scenario("target_search")
def target_search(
    params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    """One object of interest at (bearing, distance) from the central operator.

    Situation variables: bearing (radians) and distance (meters) of the
    target. The operator starts at the arena center with the robot ring
    around it.
    """
    size = float(_get(params, "arena", 30.0))
    center = (size / 2.0, size / 2.0)
    bearing = float(params["bearing"])
    distance = float(params["distance"])
    target = (
        min(max(center[0] + distance * math.cos(bearing), 0.0), size),
        min(max(center[1] + distance * math.sin(bearing), 0.0), size),
    )
    world = WorldState(
        time=0,
        arena=Rect(0.0, 0.0, size, size),
        objects=(ObjectOfInterest(target, float(_get(params, "target_strength", 1.0))),),
        env_params={"sensor_noise_sigma": float(_get(params, "sensor_noise_sigma", 0.0))},
    )
    bodies = _robot_ring(params, center)
    bodies["human"] = AgentBody(
        id="human",
        kind=AgentKind.HUMAN,
        position=center,
        max_speed=float(_get(params, "human_max_speed", 0.35)),
        sense_radius=float(_get(params, "human_sense_radius", 1.5)),
        comm_radius=float(_get(params, "comm_radius", 4.0)),
    )
    return world, bodies


@register_scenario("decoy_search")
def decoy_search(
    params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    """Target search with a regime variable controlling swarm usefulness.

    regime < 0.5: the target emits at full strength and there is no decoy,
    so the fusion web leads straight to it. regime >= 0.5: the target goes
    dark (invisible to robot sensing) and a full-strength decoy shines from
    the mirrored bearing, so trusting the web misleads the operator. The
    first object is always the true target for goal metrics.
    """
    size = float(_get(params, "arena", 30.0))
    center = (size / 2.0, size / 2.0)
    bearing = float(params["bearing"])
    distance = float(params["distance"])
    regime = float(params["regime"])
    bad = regime >= 0.5

    def place(theta: float) -> tuple[float, float]:
        return (
            min(max(center[0] + distance * math.cos(theta), 0.0), size),
            min(max(center[1] + distance * math.sin(theta), 0.0), size),
        )

    objects = [ObjectOfInterest(place(bearing), 0.0 if bad else 1.0)]
    if bad:
        objects.append(ObjectOfInterest(place(bearing + math.pi), 1.0))
    world = WorldState(
        time=0,
        arena=Rect(0.0, 0.0, size, size),
        objects=tuple(objects),
        env_params={"sensor_noise_sigma": float(_get(params, "sensor_noise_sigma", 0.0))},
    )
    bodies = _robot_ring(params, center)
    bodies["human"] = AgentBody(
        id="human",
        kind=AgentKind.HUMAN,
        position=center,
        max_speed=float(_get(params, "human_max_speed", 0.35)),
        sense_radius=float(_get(params, "human_sense_radius", 1.5)),
        comm_radius=float(_get(params, "comm_radius", 4.0)),
    )
    return world, bodies


@register_scenario("grid_walk")
def grid_walk(
    params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    """Tiny lattice world: one robot walking a (k x k) grid toward a marked cell."""
    k = int(_get(params, "grid", 3))
    world = WorldState(
        time=0,
        arena=Rect(0.0, 0.0, float(k - 1), float(k - 1)),
        objects=(
            ObjectOfInterest(
                (float(_get(params, "goal_x", k - 1)), float(_get(params, "goal_y", k - 1))), 1.0
            ),
        ),
    )
    bodies = {
        "walker": AgentBody(
            id="walker",
            kind=AgentKind.ROBOT,
            position=(float(_get(params, "start_x", 0)), float(_get(params, "start_y", 0))),
            max_speed=1.0,
            sense_radius=0.75,
        )
    }
    return world, bodies


@register_scenario("open_field")
def open_field(
    params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    """Single agent in an empty arena; stub scenarios for estimator checks."""
    size = float(_get(params, "arena", 10.0))
    world = WorldState(time=0, arena=Rect(0.0, 0.0, size, size))
    bodies = {
        "human": AgentBody(
            id="human",
            kind=AgentKind.HUMAN,
            position=(float(_get(params, "start_x", 0.0)), float(_get(params, "start_y", 0.0))),
            max_speed=1.0,
        )
    }
    return world, bodies


@register_scenario("scatter")
def scatter(
    params: Mapping[str, Any], rng: Substream
) -> tuple[WorldState, dict[str, AgentBody]]:
    """Robots at uniform random positions with the operator at the center.

    Used by posture dynamics checks; objects optional via target_* params.
    """
    size = float(_get(params, "arena", 20.0))
    n = int(_get(params, "n_robots", 12))
    center = (size / 2.0, size / 2.0)
    objects = ()
    if "target_x" in params:
        objects = (
            ObjectOfInterest(
                (float(params["target_x"]), float(params["target_y"])),
                float(_get(params, "target_strength", 1.0)),
            ),
        )
    world = WorldState(
        time=0,
        arena=Rect(0.0, 0.0, size, size),
        objects=objects,
        env_params={"sensor_noise_sigma": float(_get(params, "sensor_noise_sigma", 0.0))},
    )
    bodies: dict[str, AgentBody] = {
        "human": AgentBody(
            id="human",
            kind=AgentKind.HUMAN,
            position=center,
            max_speed=float(_get(params, "human_max_speed", 0.35)),
            sense_radius=float(_get(params, "human_sense_radius", 1.5)),
            comm_radius=float(_get(params, "comm_radius", 4.0)),
        )
    }
    if _get(params, "cluster", False):
        bodies.update(_robot_ring(params, center))
        return world, bodies
    for i in range(n):
        bodies[f"robot_{i:02d}"] = AgentBody(
            id=f"robot_{i:02d}",
            kind=AgentKind.ROBOT,
            position=(rng.uniform(0.0, size), rng.uniform(0.0, size)),
            max_speed=float(_get(params, "robot_max_speed", 0.5)),
            sense_radius=float(_get(params, "robot_sense_radius", 2.5)),
            comm_radius=float(_get(params, "comm_radius", 4.0)),
        )
    return world, bodies
