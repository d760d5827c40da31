"""Regenerate the wire-protocol conformance fixtures.

Emits one JSON frame per line: valid_messages.jsonl holds frames the server
produces or accepts (all schema-valid), invalid_messages.jsonl holds frames
that must be rejected. The cockpit's validator is tested against both, so
the TS and Python sides agree on the protocol.

Usage: python frontend/scripts/gen_fixtures.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema

from swarmamp.bridge import (
    BRIDGE_SCHEMA,
    OperatorMessage,
    Snapshot,
    encode_ack,
    encode_command,
    encode_error,
    encode_snapshot,
)
from swarmamp.goals import ResourceLedger
from swarmamp.rng import Substream
from swarmamp.swarm import Contract, Disperse, ExtendLimb, FollowGradient, Hold

OUT_DIR = Path(__file__).parent.parent / "fixtures"


def random_snapshot(rng: Substream) -> Snapshot:
    n = rng.integers(7)
    return Snapshot(
        tick=rng.integers(100000),
        paused=bool(rng.bit()),
        human_position=(rng.uniform(0, 30), rng.uniform(0, 30)),
        human_heading=rng.uniform(-math.pi, math.pi),
        robots=tuple(
            (
                f"robot_{i:02d}",
                (rng.uniform(0, 30), rng.uniform(0, 30)),
                rng.random(),
                None if rng.bit() else (rng.uniform(-1, 1), rng.uniform(-1, 1)),
            )
            for i in range(n)
        ),
        objects=tuple(
            ((rng.uniform(0, 30), rng.uniform(0, 30)), rng.random(), bool(rng.bit()))
            for _ in range(rng.integers(3))
        ),
        posture=[None, Contract(), Disperse(), FollowGradient(), Hold(), ExtendLimb(1.0, 3.0)][
            rng.integers(6)
        ],
        resources=ResourceLedger(
            steps=rng.integers(5000), distance=rng.uniform(0, 500), messages=rng.integers(5000)
        ),
        goal_metric="min_human_object_distance",
        goal_value=rng.uniform(0, 30),
        goal_reached=bool(rng.bit()),
        arena=(0.0, 0.0, 30.0, 30.0),
    )


def valid_frames() -> list[str]:
    rng = Substream(1234)
    frames = [encode_snapshot(random_snapshot(rng)) for _ in range(40)]
    frames += [
        encode_command(OperatorMessage(op="posture", client_tick=3, posture=Contract())),
        encode_command(OperatorMessage(op="posture", client_tick=4, posture=ExtendLimb(0.5, 6.0))),
        encode_command(OperatorMessage(op="move_human", client_tick=5, velocity=(0.3, -0.2))),
        encode_command(OperatorMessage(op="pause", client_tick=6)),
        encode_command(OperatorMessage(op="resume", client_tick=7)),
        encode_command(OperatorMessage(op="reset", client_tick=8, seed=99)),
        encode_ack(12, 5, "move_human"),
        encode_error(13, "limb length 99 outside [0, 18.0]"),
    ]
    return frames


def invalid_frames() -> list[str]:
    return [
        json.dumps(frame)
        for frame in [
            {"type": "command", "tick": 1, "payload": {"op": "warp"}},
            {"type": "command", "tick": -1, "payload": {"op": "pause"}},
            {"type": "command", "tick": 1, "payload": {"op": "move_human", "velocity": [1.0]}},
            {"type": "command", "tick": 1, "payload": {"op": "move_human", "velocity": ["a", "b"]}},
            {"type": "command", "tick": 1, "payload": {"op": "posture", "posture": {"posture": "sprint"}}},
            {"type": "command", "tick": 1, "payload": {"op": "reset"}},
            {"type": "command", "tick": 1.5, "payload": {"op": "pause"}},
            {"type": "command", "payload": {"op": "pause"}},
            {"type": "snapshot", "tick": 1, "payload": {"schema_version": 2}},
            {"type": "snapshot", "tick": 1, "payload": {}},
            {"type": "ack", "tick": 1, "payload": {"client_tick": "x", "op": "pause"}},
            {"type": "error", "tick": 1, "payload": {}},
            {"type": "telemetry", "tick": 1, "payload": {}},
            {
                "type": "snapshot",
                "tick": 2,
                "payload": {
                    "schema_version": 1,
                    "paused": False,
                    "human": {"position": [0, 0], "heading": 0},
                    "robots": [{"id": "r0", "position": [0, 0], "fusion": 1.5}],
                    "objects": [],
                    "posture": None,
                    "resources": {"steps": 0, "distance": 0, "messages": 0},
                    "goal": {"metric": "m", "value": 0, "reached": False},
                },
            },
        ]
    ]


def main() -> None:
    OUT_DIR.mkdir(exist_ok=True)
    valid = valid_frames()
    for frame in valid:
        jsonschema.validate(json.loads(frame), BRIDGE_SCHEMA)
    (OUT_DIR / "valid_messages.jsonl").write_text("\n".join(valid) + "\n")

    invalid = invalid_frames()
    for frame in invalid:
        try:
            jsonschema.validate(json.loads(frame), BRIDGE_SCHEMA)
        except jsonschema.ValidationError:
            continue
        raise SystemExit(f"fixture unexpectedly valid: {frame}")
    (OUT_DIR / "invalid_messages.jsonl").write_text("\n".join(invalid) + "\n")
    print(f"wrote {len(valid)} valid and {len(invalid)} invalid frames to {OUT_DIR}")


if __name__ == "__main__":
    main()
