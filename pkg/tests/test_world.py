from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmamp.errors import InvalidAction, UnknownAgentId
from swarmamp.rng import Substream
from swarmamp.world import (
    Broadcast,
    MarkGoalClaim,
    Move,
    ObjectOfInterest,
    Obstacle,
    masked_world,
    perceive,
    step,
)

from helpers import make_robot, make_world


# --- reference oracle: clamp velocity, then slide along axis-aligned walls ---


def clamp_and_slide_reference(pos, vel, max_speed, arena):
    """Independent clamp-and-slide model for a wall-only world."""
    speed = math.hypot(*vel)
    if speed > max_speed:
        vel = (vel[0] * max_speed / speed, vel[1] * max_speed / speed)
    x = pos[0] + vel[0]
    y = pos[1] + vel[1]
    x = min(max(x, arena[0]), arena[2])
    y = min(max(y, arena[1]), arena[3])
    return (x, y)


class TestStep:
    def test_identity_dynamics(self):
        world = make_world(objects=[ObjectOfInterest((4.0, 4.0), 0.7)])
        bodies = {"r0": make_robot("r0", (2.0, 2.0))}
        new_world, new_bodies = step(world, bodies, {})
        assert new_world.time == world.time + 1
        assert new_world.objects == world.objects
        assert new_world.arena == world.arena
        assert new_bodies == bodies

    def test_unit_kinematics(self):
        world = make_world()
        bodies = {"r0": make_robot("r0", (0.0, 0.0), max_speed=1.0)}
        _, new_bodies = step(world, bodies, {"r0": Move((1.0, 0.0))})
        assert new_bodies["r0"].position == (1.0, 0.0)

    def test_wall_clamp_and_slide_matches_reference(self):
        # agent half a meter from the right wall, pushing straight at it
        world = make_world(size=10.0)
        bodies = {"r0": make_robot("r0", (9.5, 5.0), max_speed=2.0)}
        _, new_bodies = step(world, bodies, {"r0": Move((2.0, 0.0))})
        expected = clamp_and_slide_reference((9.5, 5.0), (2.0, 0.0), 2.0, (0, 0, 10, 10))
        assert new_bodies["r0"].position == expected
        assert new_bodies["r0"].position == (10.0, 5.0)  # on the wall, no tangential drift

    @pytest.mark.parametrize(
        "pos,vel",
        [
            ((9.5, 5.0), (2.0, 1.0)),
            ((0.2, 0.2), (-3.0, -3.0)),
            ((5.0, 9.9), (0.5, 4.0)),
            ((9.8, 9.8), (5.0, 5.0)),
        ],
    )
    def test_diagonal_wall_slides_match_reference(self, pos, vel):
        world = make_world(size=10.0)
        bodies = {"r0": make_robot("r0", pos, max_speed=2.0)}
        _, new_bodies = step(world, bodies, {"r0": Move(vel)})
        expected = clamp_and_slide_reference(pos, vel, 2.0, (0, 0, 10, 10))
        assert new_bodies["r0"].position == pytest.approx(expected, abs=1e-12)

    def test_unknown_agent_rejected(self):
        world = make_world()
        bodies = {"r0": make_robot("r0", (1.0, 1.0))}
        with pytest.raises(UnknownAgentId):
            step(world, bodies, {"ghost": Move((1.0, 0.0))})

    def test_non_finite_velocity_becomes_noop(self, caplog):
        world = make_world()
        bodies = {"r0": make_robot("r0", (1.0, 1.0))}
        with caplog.at_level("WARNING"):
            _, new_bodies = step(world, bodies, {"r0": Move((float("nan"), 0.0))})
        assert new_bodies["r0"].position == (1.0, 1.0)
        assert any("non-finite" in r.message for r in caplog.records)

    def test_broadcast_latches_signal(self):
        world = make_world()
        bodies = {"r0": make_robot("r0", (1.0, 1.0))}
        w1, _ = step(world, bodies, {"r0": Broadcast(0.8)})
        assert w1.signals["r0"] == 0.8
        w2, _ = step(w1, bodies, {})
        assert w2.signals["r0"] == 0.8  # persists until re-broadcast
        w3, _ = step(w2, bodies, {"r0": Broadcast(1.7)})
        assert w3.signals["r0"] == 1.0  # payload clamped into [0, 1]

    def test_move_and_broadcast_bundle(self):
        world = make_world()
        bodies = {"r0": make_robot("r0", (1.0, 1.0))}
        w1, b1 = step(world, bodies, {"r0": (Move((1.0, 0.0)), Broadcast(0.5))})
        assert b1["r0"].position == (2.0, 1.0)
        assert w1.signals["r0"] == 0.5

    def test_duplicate_variant_in_bundle_rejected(self):
        world = make_world()
        bodies = {"r0": make_robot("r0", (1.0, 1.0))}
        with pytest.raises(InvalidAction):
            step(world, bodies, {"r0": (Move((1.0, 0.0)), Move((0.0, 1.0)))})

    def test_mark_goal_claim_discovers_in_range_objects(self):
        world = make_world(
            objects=[ObjectOfInterest((2.0, 2.0), 0.5), ObjectOfInterest((9.0, 9.0), 0.5)]
        )
        bodies = {"r0": make_robot("r0", (1.5, 2.0), sense_radius=1.0)}
        w1, _ = step(world, bodies, {"r0": MarkGoalClaim()})
        assert w1.objects[0].discovered is True
        assert w1.objects[1].discovered is False

    def test_obstacle_blocks_movement(self):
        world = make_world(obstacles=[Obstacle((5.0, 5.0), 1.0)])
        bodies = {"r0": make_robot("r0", (3.4, 5.0), max_speed=1.0)}
        _, new_bodies = step(world, bodies, {"r0": Move((1.0, 0.0))})
        # pushed back out to the obstacle boundary
        assert math.hypot(new_bodies["r0"].position[0] - 5.0, new_bodies["r0"].position[1] - 5.0) >= 1.0 - 1e-9

    def test_conservation_of_count(self):
        world = make_world(objects=[ObjectOfInterest((2.0, 2.0), 0.5)])
        bodies = {f"r{i}": make_robot(f"r{i}", (float(i), 1.0)) for i in range(5)}
        w1, b1 = step(world, bodies, {"r0": Move((1.0, 0.0)), "r3": MarkGoalClaim()})
        assert set(b1) == set(bodies)
        assert len(w1.objects) == len(world.objects)


@settings(max_examples=150, deadline=None)
@given(
    px=st.floats(0.0, 10.0),
    py=st.floats(0.0, 10.0),
    vx=st.floats(-5.0, 5.0, allow_nan=False),
    vy=st.floats(-5.0, 5.0, allow_nan=False),
    max_speed=st.floats(0.1, 3.0),
)
def test_displacement_never_exceeds_max_speed(px, py, vx, vy, max_speed):
    world = make_world(obstacles=[Obstacle((5.0, 5.0), 1.5)])
    start = (px, py)
    # keep starts outside the obstacle so the scenario is well-posed
    if math.hypot(px - 5.0, py - 5.0) < 1.5:
        return
    bodies = {"r0": make_robot("r0", start, max_speed=max_speed)}
    _, new_bodies = step(world, bodies, {"r0": Move((vx, vy))})
    moved = math.hypot(new_bodies["r0"].position[0] - px, new_bodies["r0"].position[1] - py)
    assert moved <= max_speed + 1e-9


class TestPerceive:
    def test_zero_radii_empty_percept(self):
        world = make_world(objects=[ObjectOfInterest((1.0, 1.0), 1.0)])
        bodies = {
            "r0": make_robot("r0", (1.5, 1.0), sense_radius=0.0, comm_radius=0.0),
            "r1": make_robot("r1", (1.6, 1.0)),
        }
        pct = perceive(world, bodies, "r0")
        assert pct.neighbor_summaries == ()
        assert pct.local_detections == ()

    def test_zero_noise_detection_exact(self):
        world = make_world(objects=[ObjectOfInterest((3.0, 4.0), 0.9)])
        bodies = {"r0": make_robot("r0", (1.0, 1.0), sense_radius=5.0)}
        pct = perceive(world, bodies, "r0")
        assert len(pct.local_detections) == 1
        assert pct.local_detections[0].rel_position == (2.0, 3.0)
        assert pct.local_detections[0].strength == 0.9

    def test_unknown_agent(self):
        world = make_world()
        with pytest.raises(UnknownAgentId):
            perceive(world, {}, "nope")

    def test_noise_mean_within_clt_bound(self):
        # sigma 0.1, 10^4 perceives: per-axis mean error within 3*sigma/sqrt(n)
        sigma = 0.1
        n = 10_000
        world = make_world(objects=[ObjectOfInterest((3.0, 1.0), 1.0)], sigma=sigma)
        bodies = {"r0": make_robot("r0", (1.0, 1.0), sense_radius=5.0)}
        sum_dx = sum_dy = 0.0
        for i in range(n):
            pct = perceive(world, bodies, "r0", Substream(2024, 1, i))
            det = pct.local_detections[0]
            sum_dx += det.rel_position[0] - 2.0
            sum_dy += det.rel_position[1] - 0.0
        bound = 3.0 * sigma / math.sqrt(n)
        assert abs(sum_dx / n) < bound
        assert abs(sum_dy / n) < bound

    def test_noise_never_touches_self_state_or_strength(self):
        world = make_world(objects=[ObjectOfInterest((3.0, 1.0), 0.6)], sigma=0.5)
        bodies = {"r0": make_robot("r0", (1.0, 1.0), sense_radius=5.0)}
        pct = perceive(world, bodies, "r0", Substream(7))
        assert pct.self_state == bodies["r0"]
        assert pct.local_detections[0].strength == 0.6

    def test_locality_masking_preserves_percept(self):
        # zeroing out-of-radius content must not change the percept
        from dataclasses import replace

        rng = Substream(99)
        for _ in range(200):
            world = make_world(
                objects=[
                    ObjectOfInterest((rng.uniform(0, 10), rng.uniform(0, 10)), rng.random())
                    for _ in range(4)
                ]
            )
            bodies = {
                f"r{i}": make_robot(
                    f"r{i}", (rng.uniform(0, 10), rng.uniform(0, 10)), sense_radius=2.0, comm_radius=3.0
                )
                for i in range(6)
            }
            world = replace(world, signals={f"r{i}": rng.random() for i in range(6)})
            full = perceive(world, bodies, "r0")
            mw, mb = masked_world(world, bodies, "r0")
            masked = perceive(mw, mb, "r0")
            assert full == masked
