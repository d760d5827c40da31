"""Line-delimited trace serialization.

One JSON record per step state, followed by an envelope record carrying the
episode fields (seed, situation, outcome, resources_spent, commands). The
byte stream is deterministic for a given trace, which is what the golden
determinism checks compare.
"""

from __future__ import annotations

import json
from typing import IO, Iterator

from .episode import CommandRecord, EpisodeTrace, Outcome, StepState
from .goals import ResourceLedger
from .situations import Situation
from .swarm import (
    Contract,
    Disperse,
    ExtendLimb,
    FollowGradient,
    Hold,
    PostureCommand,
    posture_name,
)
from .world import AgentBody, AgentKind, ObjectOfInterest, Obstacle, Rect, WorldState


def _world_to_dict(world: WorldState) -> dict:
    return {
        "time": world.time,
        "arena": [world.arena.xmin, world.arena.ymin, world.arena.xmax, world.arena.ymax],
        "objects": [
            {"position": list(o.position), "strength": o.strength, "discovered": o.discovered}
            for o in world.objects
        ],
        "obstacles": [{"center": list(o.center), "radius": o.radius} for o in world.obstacles],
        "env_params": dict(sorted(world.env_params.items())),
        "signals": dict(sorted(world.signals.items())),
    }


def _body_to_dict(body: AgentBody) -> dict:
    return {
        "id": body.id,
        "kind": body.kind.value,
        "position": list(body.position),
        "heading": body.heading,
        "max_speed": body.max_speed,
        "sense_radius": body.sense_radius,
        "comm_radius": body.comm_radius,
    }


def command_to_dict(command: PostureCommand) -> dict:
    d: dict = {"posture": posture_name(command)}
    if isinstance(command, ExtendLimb):
        d["bearing"] = command.bearing
        d["length"] = command.length
    return d


def command_from_dict(d: dict) -> PostureCommand:
    name = d["posture"]
    if name == "contract":
        return Contract()
    if name == "disperse":
        return Disperse()
    if name == "extend_limb":
        return ExtendLimb(float(d["bearing"]), float(d["length"]))
    if name == "follow_gradient":
        return FollowGradient()
    if name == "hold":
        return Hold()
    raise ValueError(f"unknown posture {name!r}")


def _dump(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


def write_trace(trace: EpisodeTrace, fh: IO[str]) -> None:
    for state in trace.states:
        record = {
            "time": state.world.time,
            "world": _world_to_dict(state.world),
            "bodies": [_body_to_dict(state.bodies[a]) for a in sorted(state.bodies)],
        }
        fh.write(_dump(record) + "\n")
    envelope = {
        "seed": trace.seed,
        "situation": {
            "assignment": dict(sorted(trace.situation.assignment.items())),
            "scenario": trace.situation.scenario,
        },
        "outcome": trace.outcome.value,
        "outcome_reason": trace.outcome_reason,
        "resources_spent": trace.resources_spent.as_dict(),
        "commands": [
            {
                "time": rec.time,
                "emitter": rec.emitter,
                "seq": rec.seq,
                "command": command_to_dict(rec.command)
                if isinstance(rec.command, PostureCommand)
                else repr(rec.command),
            }
            for rec in trace.commands
        ],
    }
    fh.write(_dump(envelope) + "\n")


def trace_to_string(trace: EpisodeTrace) -> str:
    import io

    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()


def _world_from_dict(d: dict) -> WorldState:
    return WorldState(
        time=d["time"],
        arena=Rect(*d["arena"]),
        objects=tuple(
            ObjectOfInterest(tuple(o["position"]), o["strength"], o["discovered"])
            for o in d["objects"]
        ),
        obstacles=tuple(Obstacle(tuple(o["center"]), o["radius"]) for o in d["obstacles"]),
        env_params=d["env_params"],
        signals=d["signals"],
    )


def _body_from_dict(d: dict) -> AgentBody:
    return AgentBody(
        id=d["id"],
        kind=AgentKind(d["kind"]),
        position=tuple(d["position"]),
        heading=d["heading"],
        max_speed=d["max_speed"],
        sense_radius=d["sense_radius"],
        comm_radius=d["comm_radius"],
    )


def read_trace(fh: IO[str] | Iterator[str]) -> EpisodeTrace:
    states: list[StepState] = []
    envelope: dict | None = None
    for line in fh:
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        if "world" in record:
            world = _world_from_dict(record["world"])
            bodies = {b["id"]: _body_from_dict(b) for b in record["bodies"]}
            states.append(StepState(world, bodies))
        else:
            envelope = record
    if envelope is None:
        raise ValueError("trace has no envelope record")
    spent = ResourceLedger(**envelope["resources_spent"])
    commands = [
        CommandRecord(
            rec["time"],
            rec["emitter"],
            command_from_dict(rec["command"]) if isinstance(rec["command"], dict) else rec["command"],
            rec["seq"],
        )
        for rec in envelope["commands"]
    ]
    return EpisodeTrace(
        seed=envelope["seed"],
        situation=Situation(
            envelope["situation"]["assignment"], envelope["situation"]["scenario"]
        ),
        states=states,
        outcome=Outcome(envelope["outcome"]),
        outcome_reason=envelope["outcome_reason"],
        resources_spent=spent,
        commands=commands,
    )
