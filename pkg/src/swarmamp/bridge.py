"""Live session gateway: snapshot encoding, command decoding, session core.

The session core is synchronous and free of socket concerns, so record/
replay determinism and protocol conformance are testable headlessly; the
WebSocket layer in server.py is a thin pump around it. All messages are
UTF-8 JSON envelopes {type, tick, payload} validated against the shared
schema file bridge_schema.json.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any

import jsonschema

from . import rng as rnd
from .episode import CommandRecord
from .errors import SwarmAmpError
from .goals import ResourceLedger, evaluate_metric
from .harness import ExperimentConfig, merged_params
from .policies import TeleopPolicy
from .rng import Substream
from .scenarios import build_scenario
from .situations import sample_situations
from .swarm import PostureCommand, SwarmUnit, validate_command
from .trace_io import command_from_dict, command_to_dict
from .world import Action, AgentKind, Broadcast, Percept, perceive, step
from . import geometry as geo

SCHEMA_VERSION = 1

with resources.files("swarmamp").joinpath("bridge_schema.json").open() as _fh:
    BRIDGE_SCHEMA: dict = json.load(_fh)

_VALIDATOR = jsonschema.Draft7Validator(BRIDGE_SCHEMA)


class BridgeProtocolError(SwarmAmpError):
    pass


# --- messages ------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorMessage:
    """Decoded operator command; exactly one op per message."""

    op: str  # "posture" | "move_human" | "pause" | "resume" | "reset"
    client_tick: int
    posture: PostureCommand | None = None
    velocity: tuple[float, float] | None = None
    seed: int | None = None


def decode_command(text: str) -> OperatorMessage:
    """Parse and validate one inbound command frame."""
    try:
        envelope = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BridgeProtocolError(f"not valid JSON: {exc}") from None
    errors = sorted(_VALIDATOR.iter_errors(envelope), key=lambda e: e.json_path)
    if errors or envelope.get("type") != "command":
        detail = errors[0].message if errors else "expected a command envelope"
        raise BridgeProtocolError(f"schema violation: {detail}")
    payload = envelope["payload"]
    op = payload["op"]
    if op == "posture":
        return OperatorMessage(
            op=op, client_tick=envelope["tick"], posture=command_from_dict(payload["posture"])
        )
    if op == "move_human":
        vx, vy = payload["velocity"]
        if not (abs(vx) < 1e9 and abs(vy) < 1e9):
            raise BridgeProtocolError("velocity out of range")
        return OperatorMessage(op=op, client_tick=envelope["tick"], velocity=(float(vx), float(vy)))
    if op == "reset":
        return OperatorMessage(op=op, client_tick=envelope["tick"], seed=int(payload["seed"]))
    return OperatorMessage(op=op, client_tick=envelope["tick"])


def encode_command(message: OperatorMessage) -> str:
    """Inverse of decode_command; used by tests and the journal."""
    payload: dict[str, Any]
    if message.op == "posture":
        assert message.posture is not None
        payload = {"op": "posture", "posture": command_to_dict(message.posture)}
    elif message.op == "move_human":
        payload = {"op": "move_human", "velocity": list(message.velocity or (0.0, 0.0))}
    elif message.op == "reset":
        payload = {"op": "reset", "seed": message.seed or 0}
    else:
        payload = {"op": message.op}
    return json.dumps(
        {"type": "command", "tick": message.client_tick, "payload": payload},
        sort_keys=True,
        separators=(",", ":"),
    )


@dataclass(frozen=True)
class Snapshot:
    tick: int
    paused: bool
    human_position: tuple[float, float]
    human_heading: float
    robots: tuple[tuple[str, tuple[float, float], float, tuple[float, float] | None], ...]
    objects: tuple[tuple[tuple[float, float], float, bool], ...]
    posture: PostureCommand | None
    resources: ResourceLedger
    goal_metric: str
    goal_value: float
    goal_reached: bool
    arena: tuple[float, float, float, float]


def encode_snapshot(snapshot: Snapshot) -> str:
    envelope = {
        "type": "snapshot",
        "tick": snapshot.tick,
        "payload": {
            "schema_version": SCHEMA_VERSION,
            "paused": snapshot.paused,
            "human": {
                "position": list(snapshot.human_position),
                "heading": snapshot.human_heading,
            },
            "robots": [
                {
                    "id": rid,
                    "position": list(position),
                    "fusion": fusion,
                    "direction": None if direction is None else list(direction),
                }
                for rid, position, fusion, direction in snapshot.robots
            ],
            "objects": [
                {"position": list(position), "strength": strength, "discovered": discovered}
                for position, strength, discovered in snapshot.objects
            ],
            "posture": None if snapshot.posture is None else command_to_dict(snapshot.posture),
            "resources": snapshot.resources.as_dict(),
            "goal": {
                "metric": snapshot.goal_metric,
                "value": snapshot.goal_value,
                "reached": snapshot.goal_reached,
            },
            "arena": list(snapshot.arena),
        },
    }
    return json.dumps(envelope, sort_keys=True, separators=(",", ":"))


def decode_snapshot(text: str) -> Snapshot:
    envelope = json.loads(text)
    errors = sorted(_VALIDATOR.iter_errors(envelope), key=lambda e: e.json_path)
    if errors or envelope.get("type") != "snapshot":
        detail = errors[0].message if errors else "expected a snapshot envelope"
        raise BridgeProtocolError(f"schema violation: {detail}")
    p = envelope["payload"]
    return Snapshot(
        tick=envelope["tick"],
        paused=p["paused"],
        human_position=tuple(p["human"]["position"]),
        human_heading=p["human"]["heading"],
        robots=tuple(
            (
                r["id"],
                tuple(r["position"]),
                r["fusion"],
                None if r.get("direction") is None else tuple(r["direction"]),
            )
            for r in p["robots"]
        ),
        objects=tuple(
            (tuple(o["position"]), o["strength"], o["discovered"]) for o in p["objects"]
        ),
        posture=None if p["posture"] is None else command_from_dict(p["posture"]),
        resources=ResourceLedger(**p["resources"]),
        goal_metric=p["goal"]["metric"],
        goal_value=p["goal"]["value"],
        goal_reached=p["goal"]["reached"],
        arena=tuple(p.get("arena", (0.0, 0.0, 0.0, 0.0))),
    )


def encode_error(tick: int, message: str) -> str:
    return json.dumps(
        {"type": "error", "tick": tick, "payload": {"message": message}},
        sort_keys=True,
        separators=(",", ":"),
    )


def encode_ack(tick: int, client_tick: int, op: str) -> str:
    return json.dumps(
        {"type": "ack", "tick": tick, "payload": {"client_tick": client_tick, "op": op}},
        sort_keys=True,
        separators=(",", ":"),
    )


def validate_message_text(text: str) -> None:
    """Raise when a frame does not conform to the shared schema."""
    envelope = json.loads(text)
    jsonschema.validate(envelope, BRIDGE_SCHEMA)


# --- session core ----------------------------------------------------------------


@dataclass
class JournalEntry:
    tick: int
    message: OperatorMessage


def _metric_fold(metric: str, previous: float, current: float) -> float:
    if metric.startswith("min_"):
        return min(previous, current)
    return current


class SessionCore:
    """Authoritative simulation session driven by explicit tick() calls.

    Commands queue between ticks and apply at the next tick in arrival
    order; (seed, journal) fully determine the session, which the replay
    check exploits. Pausing freezes the tick while snapshots keep streaming.
    """

    def __init__(self, config: ExperimentConfig, seed: int | None = None):
        self.config = config
        self.seed = config.seed if seed is None else seed
        self.journal: list[JournalEntry] = []
        self._pending: list[OperatorMessage] = []
        self._reset(self.seed)

    def _reset(self, seed: int) -> None:
        self.seed = seed
        self.tick_count = 0
        self.paused = False
        self.spent = ResourceLedger()
        situation = sample_situations(self.config.space, 1, seed, scenario=self.config.scenario)[0]
        self.situation = situation
        params = merged_params(self.config)
        merged = dict(params)
        merged.update(situation.assignment)
        self.world, self.bodies = build_scenario(
            self.config.scenario, merged, Substream(seed, rnd.INIT)
        )
        self.human_id = next(
            aid for aid, b in sorted(self.bodies.items()) if b.kind is AgentKind.HUMAN
        )
        self.teleop = TeleopPolicy(max_speed=self.bodies[self.human_id].max_speed)
        self.swarm_unit = SwarmUnit(self.config.swarm, human_id=self.human_id)
        robots = {aid: b for aid, b in self.bodies.items() if b.kind is AgentKind.ROBOT}
        self._swarm_members = sorted(robots)
        self._swarm_state = self.swarm_unit.initial_state(robots)
        self._teleop_state = self.teleop.initial_state(self.bodies[self.human_id])
        self._emitted: list[CommandRecord] = []
        self.current_posture: PostureCommand | None = None
        metric0 = evaluate_metric(self.config.goal.metric, self._mini_trace())
        self._goal_value = metric0
        self._noisy = float(self.world.env_params.get("sensor_noise_sigma", 0.0)) > 0.0
        self._tokens = {aid: rnd.agent_token(aid) for aid in self.bodies}

    def _mini_trace(self):
        # one-state trace view for incremental goal evaluation
        from .episode import EpisodeTrace, Outcome, StepState

        return EpisodeTrace(
            seed=self.seed,
            situation=self.situation,
            states=[StepState(self.world, dict(self.bodies))],
            outcome=Outcome.BUDGET_EXHAUSTED,
            outcome_reason=None,
            resources_spent=self.spent,
        )

    # -- command intake --

    def submit(self, message: OperatorMessage) -> str:
        """Queue a command; returns the ack (or error) frame to send back."""
        if message.op == "posture" and message.posture is not None:
            try:
                validate_command(message.posture, self.config.swarm)
            except ValueError as exc:
                return encode_error(self.tick_count, str(exc))
        self._pending.append(message)
        return encode_ack(self.tick_count, message.client_tick, message.op)

    def _apply(self, message: OperatorMessage) -> None:
        self.journal.append(JournalEntry(self.tick_count, message))
        if message.op == "pause":
            self.paused = True
        elif message.op == "resume":
            self.paused = False
        elif message.op == "reset":
            self._pending = []
            self._reset(message.seed if message.seed is not None else self.seed)
        elif message.op == "move_human":
            self.teleop.set_velocity(message.velocity or (0.0, 0.0))
        elif message.op == "posture":
            assert message.posture is not None
            self.teleop.push_posture(message.posture)
            self.current_posture = message.posture

    # -- simulation advance --

    def tick(self) -> Snapshot:
        """Apply queued commands, advance one step unless paused, snapshot."""
        pending, self._pending = self._pending, []
        for message in pending:
            self._apply(message)
        if not self.paused and not self._goal_reached():
            self._advance()
        return self.snapshot()

    def _goal_reached(self) -> bool:
        lo, hi = self.config.goal.tolerated_range
        return lo <= self._goal_value <= hi

    def _advance(self) -> None:
        t = self.tick_count
        seed = self.seed

        def percept_for(agent_id: str) -> Percept:
            stream = Substream(seed, rnd.PERCEIVE, t, self._tokens[agent_id]) if self._noisy else None
            return perceive(self.world, self.bodies, agent_id, stream)

        actions: dict[str, Any] = {}
        result, self._teleop_state = self.teleop.decide(None, self._teleop_state, Substream(0))
        if isinstance(result, Action):
            actions[self.human_id] = result
        else:
            self._emitted.append(CommandRecord(t, self.human_id, result, len(self._emitted)))
            self.spent.messages += 1

        percepts = {aid: percept_for(aid) for aid in self._swarm_members}
        inbox = [rec for rec in self._emitted if rec.time < t]
        group_actions, self._swarm_state = self.swarm_unit.decide_group(
            percepts, self._swarm_state, Substream(seed, rnd.DECIDE, t), inbox
        )
        for agent_id, bundle in group_actions.items():
            actions[agent_id] = bundle
            if isinstance(bundle, (list, tuple)):
                self.spent.messages += sum(1 for a in bundle if isinstance(a, Broadcast))

        old = self.bodies
        self.world, self.bodies = step(self.world, self.bodies, actions, Substream(seed, rnd.STEP, t))
        self.spent.steps += 1
        self.spent.distance += sum(
            geo.dist(self.bodies[a].position, old[a].position) for a in sorted(self.bodies)
        )
        self.tick_count += 1
        current = evaluate_metric(self.config.goal.metric, self._mini_trace())
        self._goal_value = _metric_fold(self.config.goal.metric, self._goal_value, current)

    def snapshot(self) -> Snapshot:
        human = self.bodies[self.human_id]
        entries = []
        for rid in self._swarm_members:
            body = self.bodies[rid]
            value = self._swarm_state.values.get(rid, 0.0)
            direction = self._swarm_state.directions.get(rid)
            entries.append((rid, body.position, value, direction))
        return Snapshot(
            tick=self.tick_count,
            paused=self.paused,
            human_position=human.position,
            human_heading=human.heading,
            robots=tuple(entries),
            objects=tuple(
                (o.position, o.strength, o.discovered) for o in self.world.objects
            ),
            posture=self.current_posture,
            resources=ResourceLedger(
                steps=self.spent.steps, distance=self.spent.distance, messages=self.spent.messages
            ),
            goal_metric=self.config.goal.metric,
            goal_value=self._goal_value,
            goal_reached=self._goal_reached(),
            arena=(
                self.world.arena.xmin,
                self.world.arena.ymin,
                self.world.arena.xmax,
                self.world.arena.ymax,
            ),
        )

    # -- replay --

    def replay(self, journal: list[JournalEntry], final_tick: int) -> Snapshot:
        """Feed a recorded journal into this fresh session.

        Journal entries fire in order once the session reaches their recorded
        tick; the loop runs until the final tick count is reached (or nothing
        can advance anymore). Returns the final snapshot, which must equal
        the live session's for the same seed and journal.
        """
        i = 0
        last = self.snapshot()
        for _ in range(final_tick + len(journal) + 1):
            while i < len(journal) and journal[i].tick <= self.tick_count:
                self.submit(journal[i].message)
                i += 1
            last = self.tick()
            if self.tick_count >= final_tick and i >= len(journal):
                break
            if self.paused and i >= len(journal):
                break
        return last
