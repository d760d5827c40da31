"""Agent-world coupling: world state, agent bodies, percepts, actions.

The world is 2-D continuous space with discrete time (dt = 1 step). A step
integrates the submitted actions with speed clamping and slide-along
collision resolution; perception is strictly local to each agent's sense
and communication radii.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping, Sequence

from . import geometry as geo
from .errors import InvalidAction, UnknownAgentId
from .geometry import Vec
from .rng import Substream

log = logging.getLogger(__name__)


class AgentKind(str, Enum):
    HUMAN = "human"
    ROBOT = "robot"
    AI_CONTROLLER = "ai_controller"


@dataclass(frozen=True)
class Rect:
    """Axis-aligned arena bounds, in meters."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("arena bounds must be non-degenerate")

    def contains(self, p: Vec) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax

    def clamp(self, p: Vec) -> Vec:
        return (
            min(max(p[0], self.xmin), self.xmax),
            min(max(p[1], self.ymin), self.ymax),
        )


@dataclass(frozen=True)
class ObjectOfInterest:
    position: Vec
    strength: float
    discovered: bool = False

    def __post_init__(self):
        if not 0.0 <= self.strength <= 1.0:
            raise ValueError("object strength must lie in [0, 1]")


@dataclass(frozen=True)
class Obstacle:
    """Circular obstacle; blocks movement but not sensing or communication."""

    center: Vec
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("obstacle radius must be positive")


@dataclass(frozen=True)
class WorldState:
    time: int
    arena: Rect
    objects: tuple[ObjectOfInterest, ...] = ()
    obstacles: tuple[Obstacle, ...] = ()
    env_params: Mapping[str, float] = field(default_factory=dict)
    # latest broadcast payload per agent; the communication medium
    signals: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("time must be non-negative")
        for obj in self.objects:
            if not self.arena.contains(obj.position):
                raise ValueError("object outside arena bounds")


@dataclass(frozen=True)
class AgentBody:
    id: str
    kind: AgentKind
    position: Vec
    heading: float = 0.0
    max_speed: float = 1.0
    sense_radius: float = 0.0
    comm_radius: float = 0.0

    def __post_init__(self):
        if self.max_speed <= 0.0:
            raise ValueError("max_speed must be positive")
        if self.sense_radius < 0.0 or self.comm_radius < 0.0:
            raise ValueError("radii must be non-negative")


# --- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class Move:
    velocity: Vec


@dataclass(frozen=True)
class Broadcast:
    payload: float


@dataclass(frozen=True)
class MarkGoalClaim:
    """Flag every object inside the claimer's sense radius as discovered."""


@dataclass(frozen=True)
class NoOp:
    pass


Action = Move | Broadcast | MarkGoalClaim | NoOp

# An agent may submit one action of each variant kind per step (a robot
# typically moves and re-broadcasts its fusion value in the same tick).
ActionBundle = Action | Sequence[Action]


# --- percepts ---------------------------------------------------------------


@dataclass(frozen=True)
class NeighborInfo:
    id: str
    rel_position: Vec
    fusion_value: float


@dataclass(frozen=True)
class Detection:
    rel_position: Vec
    strength: float


@dataclass(frozen=True)
class Percept:
    self_state: AgentBody
    neighbor_summaries: tuple[NeighborInfo, ...]
    local_detections: tuple[Detection, ...]


# --- operations -------------------------------------------------------------


def _as_bundle(action: ActionBundle) -> tuple[Action, ...]:
    if isinstance(action, (Move, Broadcast, MarkGoalClaim, NoOp)):
        return (action,)
    bundle = tuple(action)
    kinds = [type(a) for a in bundle]
    if len(set(kinds)) != len(kinds):
        raise InvalidAction("bundle holds more than one action of the same kind")
    return bundle


def _resolve_obstacles(p: Vec, fallback_dir: Vec, obstacles: Sequence[Obstacle]) -> Vec:
    # Two passes cover the common case of brushing past at most two circles.
    for _ in range(2):
        moved = False
        for obs in obstacles:
            d = geo.dist(p, obs.center)
            if d < obs.radius:
                if d == 0.0:
                    out = geo.unit(fallback_dir)
                    if out == geo.ZERO:
                        out = (1.0, 0.0)
                else:
                    out = geo.scale(geo.sub(p, obs.center), 1.0 / d)
                p = geo.add(obs.center, geo.scale(out, obs.radius))
                moved = True
        if not moved:
            break
    return p


def integrate_move(body: AgentBody, velocity: Vec, world: WorldState) -> Vec:
    """Apply one step of movement: clamp speed, slide along walls and obstacles.

    The resulting displacement never exceeds max_speed.
    """
    v = geo.clamp_norm(velocity, body.max_speed)
    p = world.arena.clamp(geo.add(body.position, v))
    if world.obstacles:
        p = _resolve_obstacles(p, geo.sub(body.position, p), world.obstacles)
        p = world.arena.clamp(p)
    # collision resolution can only push a short way; re-clamp to be safe
    d = geo.dist(p, body.position)
    if d > body.max_speed:
        p = geo.add(body.position, geo.clamp_norm(geo.sub(p, body.position), body.max_speed))
    return p


def step(
    world: WorldState,
    bodies: Mapping[str, AgentBody],
    actions: Mapping[str, ActionBundle],
    rng: Substream | None = None,
) -> tuple[WorldState, dict[str, AgentBody]]:
    """Advance the world by one tick.

    Agents absent from the action map receive NoOp. Non-finite velocities are
    rejected with a warning and replaced by NoOp. The current dynamics are
    deterministic, so the rng parameter is reserved for stochastic world
    effects and may be None.
    """
    for agent_id in actions:
        if agent_id not in bodies:
            raise UnknownAgentId(agent_id)

    new_bodies: dict[str, AgentBody] = {}
    new_signals: dict[str, float] | None = None
    discovered_by: list[AgentBody] = []

    for agent_id in sorted(bodies):
        body = bodies[agent_id]
        bundle = _as_bundle(actions.get(agent_id, NoOp()))
        new_body = body
        for action in bundle:
            if isinstance(action, Move):
                if not geo.is_finite(action.velocity):
                    log.warning("agent %s sent a non-finite velocity; treating as NoOp", agent_id)
                    continue
                p = integrate_move(body, action.velocity, world)
                disp = geo.sub(p, body.position)
                heading = math.atan2(disp[1], disp[0]) if geo.norm(disp) > 1e-12 else body.heading
                new_body = replace(new_body, position=p, heading=heading)
            elif isinstance(action, Broadcast):
                if not math.isfinite(action.payload):
                    log.warning("agent %s sent a non-finite payload; treating as NoOp", agent_id)
                    continue
                if new_signals is None:
                    new_signals = dict(world.signals)
                new_signals[agent_id] = min(max(action.payload, 0.0), 1.0)
            elif isinstance(action, MarkGoalClaim):
                discovered_by.append(body)
        new_bodies[agent_id] = new_body

    new_objects = world.objects
    if discovered_by:
        updated = []
        for obj in world.objects:
            if not obj.discovered and any(
                geo.dist(obj.position, b.position) <= b.sense_radius for b in discovered_by
            ):
                obj = replace(obj, discovered=True)
            updated.append(obj)
        new_objects = tuple(updated)

    new_world = replace(
        world,
        time=world.time + 1,
        objects=new_objects,
        signals=world.signals if new_signals is None else new_signals,
    )
    return new_world, new_bodies


def perceive(
    world: WorldState,
    bodies: Mapping[str, AgentBody],
    agent_id: str,
    rng: Substream | None = None,
) -> Percept:
    """Build the local view of one agent.

    Neighbors are restricted to comm_radius and carry the neighbor's latest
    broadcast value; detections are restricted to sense_radius and get
    additive Gaussian position noise of scale env_params["sensor_noise_sigma"]
    drawn from the given substream. Strength readings stay noise-free.
    """
    if agent_id not in bodies:
        raise UnknownAgentId(agent_id)
    me = bodies[agent_id]
    px, py = me.position

    neighbors: list[NeighborInfo] = []
    if me.comm_radius > 0.0:
        for other_id in sorted(bodies):
            if other_id == agent_id:
                continue
            other = bodies[other_id]
            rel = (other.position[0] - px, other.position[1] - py)
            if math.hypot(rel[0], rel[1]) <= me.comm_radius:
                neighbors.append(
                    NeighborInfo(other_id, rel, world.signals.get(other_id, 0.0))
                )

    sigma = float(world.env_params.get("sensor_noise_sigma", 0.0))
    detections: list[Detection] = []
    if me.sense_radius > 0.0:
        for obj in world.objects:
            rel = (obj.position[0] - px, obj.position[1] - py)
            if math.hypot(rel[0], rel[1]) <= me.sense_radius:
                if sigma > 0.0:
                    if rng is None:
                        raise ValueError("sensor noise requires a substream")
                    rel = (rel[0] + rng.normal(0.0, sigma), rel[1] + rng.normal(0.0, sigma))
                detections.append(Detection(rel, obj.strength))

    return Percept(me, tuple(neighbors), tuple(detections))


def masked_world(world: WorldState, bodies: Mapping[str, AgentBody], agent_id: str) -> tuple[WorldState, dict[str, AgentBody]]:
    """Drop all content outside one agent's sense/comm radii.

    Support for locality metamorphic tests: perceiving through the masked
    world must equal perceiving through the full one.
    """
    me = bodies[agent_id]
    kept_bodies = {
        other_id: b
        for other_id, b in bodies.items()
        if other_id == agent_id or geo.dist(b.position, me.position) <= me.comm_radius
    }
    kept_objects = tuple(
        o for o in world.objects if geo.dist(o.position, me.position) <= me.sense_radius
    )
    kept_signals = {k: v for k, v in world.signals.items() if k in kept_bodies}
    return replace(world, objects=kept_objects, signals=kept_signals), kept_bodies
