"""Extended-swarming behaviors: local fusion gradients and body postures.

Robots interact only with comm-radius neighbors. Detections seed a per-robot
fusion value that relaxes outward with per-hop decay, forming a gradient
field that points back toward sensed objects; posture commands gossip
hop-by-hop from the operator and shape the swarm through virtual forces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Mapping, Sequence

from . import geometry as geo
from .episode import CommandRecord, GroupDecisionMatrix
from .geometry import Vec
from .rng import Substream
from .world import AgentBody, Broadcast, Move, Percept


@dataclass(frozen=True)
class PostureGains:
    cohesion: float = 0.0
    separation: float = 0.0
    target: float = 0.0


DEFAULT_GAINS: Mapping[str, PostureGains] = {
    "contract": PostureGains(cohesion=0.5, separation=0.8),
    "disperse": PostureGains(cohesion=0.45, separation=0.9),
    "extend_limb": PostureGains(separation=0.3, target=0.6),
    "follow_gradient": PostureGains(separation=0.4, target=0.5),
    "hold": PostureGains(),
}


@dataclass(frozen=True)
class SwarmConfig:
    n_robots: int
    comm_radius: float
    sense_radius: float
    decay: float
    separation_distance: float
    posture_gains: Mapping[str, PostureGains] = field(default_factory=lambda: dict(DEFAULT_GAINS))

    def __post_init__(self):
        if self.n_robots < 1:
            raise ValueError("n_robots must be at least 1")
        if not 0.0 < self.decay < 1.0:
            raise ValueError("decay must lie strictly inside (0, 1)")
        if not self.separation_distance < self.comm_radius:
            raise ValueError("separation_distance must be smaller than comm_radius")

    def gains(self, posture: str) -> PostureGains:
        return self.posture_gains.get(posture, DEFAULT_GAINS.get(posture, PostureGains()))


# --- posture commands --------------------------------------------------------


@dataclass(frozen=True)
class Contract:
    pass


@dataclass(frozen=True)
class Disperse:
    pass


@dataclass(frozen=True)
class ExtendLimb:
    bearing: float
    length: float


@dataclass(frozen=True)
class FollowGradient:
    pass


@dataclass(frozen=True)
class Hold:
    pass


PostureCommand = Contract | Disperse | ExtendLimb | FollowGradient | Hold

_POSTURE_NAMES = {
    Contract: "contract",
    Disperse: "disperse",
    ExtendLimb: "extend_limb",
    FollowGradient: "follow_gradient",
    Hold: "hold",
}


def posture_name(command: PostureCommand) -> str:
    return _POSTURE_NAMES[type(command)]


def validate_command(command: PostureCommand, config: SwarmConfig) -> None:
    if isinstance(command, ExtendLimb):
        max_length = config.n_robots * config.separation_distance
        if command.length < 0.0 or command.length > max_length:
            raise ValueError(f"limb length {command.length} outside [0, {max_length}]")
        if not math.isfinite(command.bearing):
            raise ValueError("limb bearing must be finite")


# --- fusion field ------------------------------------------------------------


@dataclass(frozen=True)
class FieldEntry:
    """Fusion value of one robot and the direction of its best source."""

    value: float
    direction: Vec | None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("fusion value must lie in [0, 1]")


ZERO_ENTRY = FieldEntry(0.0, None)


def update_fusion_field(
    values: Mapping[str, float],
    percepts: Mapping[str, Percept],
    decay: float,
) -> dict[str, FieldEntry]:
    """One synchronous round of the max-with-decay fusion rule.

    For each robot: the new value is the max of its own detection strengths
    and decay times the best neighbor value; the direction points at the
    argmax source. A robot with no detection and no positive neighbor decays
    its stale value by the same factor and loses its direction. Ties prefer
    own detections, then the lowest neighbor id. Neighbor values come from
    the values map where present, falling back to the broadcast value
    carried by the percept (e.g. for the operator).
    """
    out: dict[str, FieldEntry] = {}
    for robot_id, percept in percepts.items():
        best_value = 0.0
        best_dir: Vec | None = None
        for det in percept.local_detections:
            if det.strength > best_value:
                best_value = det.strength
                best_dir = geo.unit(det.rel_position)
        for nb in sorted(percept.neighbor_summaries, key=lambda n: n.id):
            f_j = values.get(nb.id, nb.fusion_value)
            candidate = decay * f_j
            if candidate > best_value:
                best_value = candidate
                best_dir = geo.unit(nb.rel_position)
        if best_value > 0.0:
            out[robot_id] = FieldEntry(min(best_value, 1.0), best_dir)
        else:
            stale = values.get(robot_id, 0.0) * decay
            out[robot_id] = FieldEntry(stale if stale > 0.0 else 0.0, None)
    return out


def fusion_round_from_percept(
    percept: Percept, own_value: float, decay: float
) -> FieldEntry:
    """Single-robot view of the fusion rule; used by locality checks."""
    return update_fusion_field({percept.self_state.id: own_value}, {percept.self_state.id: percept}, decay)[
        percept.self_state.id
    ]


def gradient_readout(human: "HumanAvatar") -> tuple[Vec | None, float]:
    """Direction toward the strongest in-range fusion value, with its magnitude.

    Returns (None, 0.0) when every in-range value is zero. Ties go to the
    lowest robot id.
    """
    best_id: str | None = None
    best_value = 0.0
    best_rel: Vec | None = None
    for robot_id in sorted(human.readout):
        rel, value = human.readout[robot_id]
        if value > best_value:
            best_id, best_value, best_rel = robot_id, value, rel
    if best_id is None or best_rel is None:
        return None, 0.0
    return geo.unit(best_rel), best_value


def readout_from_percept(percept: Percept) -> tuple[Vec | None, float]:
    """Gradient readout computed straight from an operator percept."""
    avatar = HumanAvatar(
        percept.self_state,
        None,
        {nb.id: (nb.rel_position, nb.fusion_value) for nb in percept.neighbor_summaries},
    )
    return gradient_readout(avatar)


def communication_graph(
    bodies: Mapping[str, AgentBody], comm_radius: float
) -> dict[str, set[str]]:
    """Symmetric adjacency over all given agents: edge iff distance <= radius."""
    ids = sorted(bodies)
    adj: dict[str, set[str]] = {agent_id: set() for agent_id in ids}
    for i, a in enumerate(ids):
        pa = bodies[a].position
        for b in ids[i + 1 :]:
            if geo.dist(pa, bodies[b].position) <= comm_radius:
                adj[a].add(b)
                adj[b].add(a)
    return adj


# --- swarm state and postures ------------------------------------------------


@dataclass(frozen=True)
class AdoptedCommand:
    """Command a robot currently obeys, with gossip bookkeeping."""

    seq: int
    command: PostureCommand
    human_estimate: Vec | None


@dataclass(frozen=True)
class HumanAvatar:
    body: AgentBody
    command: PostureCommand | None
    # in-comm-range robots only: id -> (relative position, fusion value)
    readout: Mapping[str, tuple[Vec, float]]


@dataclass(frozen=True)
class SwarmState:
    config: SwarmConfig
    robots: Mapping[str, AgentBody]
    field: Mapping[str, FieldEntry]
    adopted: Mapping[str, AdoptedCommand]
    human: HumanAvatar | None = None

    def topology(self) -> dict[str, set[str]]:
        bodies = dict(self.robots)
        if self.human is not None:
            bodies[self.human.body.id] = self.human.body
        return communication_graph(bodies, self.config.comm_radius)


def propagate_commands(
    swarm: SwarmState,
    command: PostureCommand | None,
    command_seq: int,
    human_seen: Mapping[str, Vec],
) -> dict[str, AdoptedCommand]:
    """Gossip the operator command one hop.

    Robots that see the human adopt the current command directly (refreshing
    their operator position estimate); everyone else takes the highest-
    sequence command among comm neighbors' previous-round states. The
    estimate travels with the command so distant robots can still move
    relative to the operator.
    """
    prev = swarm.adopted
    radius = swarm.config.comm_radius
    out: dict[str, AdoptedCommand] = {}
    for robot_id in sorted(swarm.robots):
        body = swarm.robots[robot_id]
        best = prev.get(robot_id)
        if command is not None and robot_id in human_seen:
            if best is None or command_seq >= best.seq:
                best = AdoptedCommand(command_seq, command, human_seen[robot_id])
        for nb_id in sorted(swarm.robots):
            if nb_id == robot_id:
                continue
            nb_state = prev.get(nb_id)
            if nb_state is None:
                continue
            if best is not None and nb_state.seq <= best.seq:
                continue
            if geo.dist(body.position, swarm.robots[nb_id].position) <= radius:
                best = nb_state
        if best is not None:
            out[robot_id] = best
    return out


def _separation(
    body: AgentBody,
    others: Mapping[str, AgentBody],
    separation_distance: float,
) -> Vec:
    fx = fy = 0.0
    px, py = body.position
    for other in others.values():
        dx = px - other.position[0]
        dy = py - other.position[1]
        d = math.hypot(dx, dy)
        if 0.0 < d < separation_distance:
            w = (separation_distance - d) / (separation_distance * d)
            fx += dx * w
            fy += dy * w
    return (fx, fy)


def _robot_neighbors(swarm: SwarmState, robot_id: str) -> dict[str, AgentBody]:
    body = swarm.robots[robot_id]
    radius = swarm.config.comm_radius
    return {
        other_id: other
        for other_id, other in swarm.robots.items()
        if other_id != robot_id and geo.dist(body.position, other.position) <= radius
    }


def posture_step(
    swarm: SwarmState,
    command: PostureCommand | None,
    human: HumanAvatar | None,
    field: Mapping[str, FieldEntry],
) -> dict[str, Move]:
    """Per-robot velocities for the current posture round.

    Each robot uses only its own state, its comm neighbors, its adopted
    command (falling back to the given command, with the human position
    available only when the human is in its comm range), and its own fusion
    entry. Robots with no command at all hold position.
    """
    cfg = swarm.config
    moves: dict[str, Move] = {}
    for robot_id in sorted(swarm.robots):
        body = swarm.robots[robot_id]
        entry = swarm.adopted.get(robot_id)
        if entry is not None:
            cmd = entry.command
            human_est = entry.human_estimate
        elif command is not None:
            cmd = command
            human_est = None
            if human is not None and geo.dist(body.position, human.body.position) <= cfg.comm_radius:
                human_est = human.body.position
        else:
            moves[robot_id] = Move((0.0, 0.0))
            continue

        neighbors = _robot_neighbors(swarm, robot_id)
        gains = cfg.gains(posture_name(cmd))

        if isinstance(cmd, Hold):
            moves[robot_id] = Move((0.0, 0.0))
            continue

        if isinstance(cmd, Contract):
            velocity: Vec = (0.0, 0.0)
            if human_est is not None:
                velocity = geo.scale(geo.unit(geo.sub(human_est, body.position)), gains.cohesion)
        elif isinstance(cmd, Disperse):
            # spread to a lattice just inside comm range: repel below the
            # target spacing, cohere above it, so the web grows but stays
            # connected
            spacing = 0.85 * cfg.comm_radius
            vx = vy = 0.0
            for other in neighbors.values():
                dxy = geo.sub(body.position, other.position)
                d = geo.norm(dxy)
                if d == 0.0:
                    continue
                if d < spacing:
                    w = gains.cohesion * (spacing - d) / (spacing * d)
                    vx += dxy[0] * w
                    vy += dxy[1] * w
                else:
                    w = gains.cohesion * (d - spacing) / (cfg.comm_radius * d)
                    vx -= dxy[0] * w
                    vy -= dxy[1] * w
            velocity = (vx, vy)
            if not neighbors:
                velocity = (0.0, 0.0)
        elif isinstance(cmd, ExtendLimb):
            velocity = _limb_velocity(body, cmd, human_est, neighbors, cfg, gains)
        else:  # FollowGradient
            velocity = (0.0, 0.0)
            f = field.get(robot_id, ZERO_ENTRY)
            if f.direction is not None:
                velocity = geo.scale(f.direction, gains.target)

        sep = _separation(body, neighbors, cfg.separation_distance)
        moves[robot_id] = Move(geo.add(velocity, geo.scale(sep, gains.separation)))
    return moves


def _limb_velocity(
    body: AgentBody,
    cmd: ExtendLimb,
    human_est: Vec | None,
    neighbors: Mapping[str, AgentBody],
    cfg: SwarmConfig,
    gains: PostureGains,
) -> Vec:
    """Follow-the-predecessor chaining along the commanded bearing.

    The predecessor is the neighbor (or the operator) with the largest
    along-bearing coordinate still behind this robot; the robot aims one
    separation_distance beyond it, capped at the commanded length.
    """
    if human_est is None:
        return (0.0, 0.0)
    u = (math.cos(cmd.bearing), math.sin(cmd.bearing))

    def along(p: Vec) -> float:
        return (p[0] - human_est[0]) * u[0] + (p[1] - human_est[1]) * u[1]

    my_s = along(body.position)
    pred_s = 0.0
    for nb_id in sorted(neighbors):
        s = along(neighbors[nb_id].position)
        if pred_s < s < my_s:
            pred_s = s
    target_s = min(pred_s + cfg.separation_distance, cmd.length)
    target = geo.add(human_est, geo.scale(u, target_s))
    return geo.scale(geo.sub(target, body.position), gains.target)


# --- episode integration -----------------------------------------------------


@dataclass
class SwarmUnitState:
    values: dict[str, float]
    adopted: dict[str, AdoptedCommand]
    last_seq: int
    standing: PostureCommand | None = None
    directions: dict[str, Vec | None] = field(default_factory=dict)


class SwarmUnit(GroupDecisionMatrix):
    """Group decision matrix running the swarm's synchronous round.

    Per step: ingest newly journaled operator commands, gossip them one hop,
    update the fusion field from the members' percepts, then emit one Move
    plus one fusion Broadcast per robot. All inputs are local views; nothing
    here reads global world state.
    """

    needs_percept = True

    def __init__(self, config: SwarmConfig, human_id: str = "human"):
        self.config = config
        self.human_id = human_id

    def initial_state(self, bodies: Mapping[str, AgentBody]) -> SwarmUnitState:
        return SwarmUnitState(values={rid: 0.0 for rid in bodies}, adopted={}, last_seq=-1)

    def decide_group(
        self,
        percepts: Mapping[str, Percept],
        state: SwarmUnitState,
        rng: Substream,
        inbox: Sequence[CommandRecord],
    ) -> tuple[dict[str, Any], SwarmUnitState]:
        robots = {rid: p.self_state for rid, p in percepts.items()}
        command = state.standing
        command_seq = state.last_seq
        for rec in inbox:
            if rec.emitter == self.human_id and isinstance(rec.command, PostureCommand):
                if rec.seq > command_seq:
                    command, command_seq = rec.command, rec.seq

        human_seen: dict[str, Vec] = {}
        for rid, percept in percepts.items():
            for nb in percept.neighbor_summaries:
                if nb.id == self.human_id:
                    px, py = percept.self_state.position
                    human_seen[rid] = (px + nb.rel_position[0], py + nb.rel_position[1])
                    break

        field_now = update_fusion_field(state.values, percepts, self.config.decay)
        values = {rid: entry.value for rid, entry in field_now.items()}

        swarm = SwarmState(self.config, robots, field_now, state.adopted)
        adopted = propagate_commands(swarm, command, command_seq, human_seen)
        swarm = replace(swarm, adopted=adopted)
        moves = posture_step(swarm, None, None, field_now)

        actions: dict[str, Any] = {rid: (moves[rid], Broadcast(values[rid])) for rid in robots}
        directions = {rid: entry.direction for rid, entry in field_now.items()}
        return actions, SwarmUnitState(values, adopted, command_seq, command, directions)
