from __future__ import annotations

import math
from collections import deque
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swarmamp.episode import DecisionMatrix, run_episode
from swarmamp.goals import Budget, GoalSpec
from swarmamp.rng import Substream
from swarmamp.swarm import (
    AdoptedCommand,
    Contract,
    Disperse,
    ExtendLimb,
    FieldEntry,
    FollowGradient,
    Hold,
    HumanAvatar,
    SwarmConfig,
    SwarmState,
    SwarmUnit,
    communication_graph,
    gradient_readout,
    posture_step,
    propagate_commands,
    update_fusion_field,
    validate_command,
)
from swarmamp.world import AgentBody, AgentKind, Detection, NeighborInfo, Percept

from helpers import make_robot


CFG = SwarmConfig(
    n_robots=4, comm_radius=1.0, sense_radius=0.5, decay=0.5, separation_distance=0.4
)


# --- independent oracle: breadth-first hop distances on the comm graph -------


def bfs_hops(positions: dict[str, tuple], comm_radius: float, source: str) -> dict[str, int]:
    ids = sorted(positions)
    hops = {source: 0}
    queue = deque([source])
    while queue:
        cur = queue.popleft()
        for other in ids:
            if other in hops:
                continue
            d = math.hypot(
                positions[cur][0] - positions[other][0],
                positions[cur][1] - positions[other][1],
            )
            if d <= comm_radius:
                hops[other] = hops[cur] + 1
                queue.append(other)
    return hops


def bfs_field_oracle(
    positions: dict[str, tuple],
    comm_radius: float,
    detections: dict[str, float],
    decay: float,
) -> dict[str, float]:
    """Closed form the converged field must match: strength * decay^hopdist."""
    expected = {rid: 0.0 for rid in positions}
    for detector, strength in detections.items():
        hops = bfs_hops(positions, comm_radius, detector)
        for rid, h in hops.items():
            expected[rid] = max(expected[rid], strength * decay**h)
    return expected


def synth_percepts(
    positions: dict[str, tuple],
    comm_radius: float,
    detections: dict[str, float],
    values: dict[str, float],
) -> dict[str, Percept]:
    """Static-topology percepts built directly, no world loop involved."""
    percepts = {}
    for rid, pos in positions.items():
        body = AgentBody(id=rid, kind=AgentKind.ROBOT, position=pos, max_speed=1.0)
        neighbors = tuple(
            NeighborInfo(oid, (opos[0] - pos[0], opos[1] - pos[1]), values.get(oid, 0.0))
            for oid, opos in sorted(positions.items())
            if oid != rid
            and math.hypot(opos[0] - pos[0], opos[1] - pos[1]) <= comm_radius
        )
        dets = ()
        if rid in detections:
            dets = (Detection((0.1, 0.0), detections[rid]),)
        percepts[rid] = Percept(body, neighbors, dets)
    return percepts


def iterate_field(positions, comm_radius, detections, decay, rounds):
    values = {rid: 0.0 for rid in positions}
    field = {rid: FieldEntry(0.0, None) for rid in positions}
    for _ in range(rounds):
        percepts = synth_percepts(positions, comm_radius, detections, values)
        field = update_fusion_field(values, percepts, decay)
        values = {rid: e.value for rid, e in field.items()}
    return field


class TestFusionField:
    def test_no_detections_all_zero(self):
        positions = {f"r{i}": (float(i), 0.0) for i in range(4)}
        field = iterate_field(positions, 1.0, {}, 0.5, rounds=5)
        assert all(e.value == 0.0 and e.direction is None for e in field.values())

    def test_four_robot_line_hand_computation(self):
        # three synchronous updates after the detection has registered at r0
        positions = {f"r{i}": (float(i), 0.0) for i in range(4)}
        field = iterate_field(positions, 1.0, {"r0": 1.0}, 0.5, rounds=4)
        assert [field[f"r{i}"].value for i in range(4)] == [1.0, 0.5, 0.25, 0.125]
        # directions point back along the chain toward the source
        assert field["r1"].direction == (-1.0, 0.0)
        assert field["r0"].direction == (1.0, 0.0)  # toward its own detection

    def test_random_topologies_match_bfs_oracle(self):
        rng = Substream(314)
        for case in range(30):
            n = 3 + rng.integers(20)
            positions = {
                f"r{i:02d}": (rng.uniform(0, 10), rng.uniform(0, 10)) for i in range(n)
            }
            detections = {}
            for rid in sorted(positions)[: 1 + rng.integers(3)]:
                detections[rid] = 0.2 + 0.8 * rng.random()
            decay = 0.3 + 0.6 * rng.random()
            expected = bfs_field_oracle(positions, 3.0, detections, decay)
            hops_max = n  # safe upper bound on diameter
            field = iterate_field(positions, 3.0, detections, decay, rounds=hops_max)
            for rid in positions:
                assert abs(field[rid].value - expected[rid]) <= 1e-12

    def test_stale_values_decay_when_sources_vanish(self):
        positions = {"r0": (0.0, 0.0)}
        values = {"r0": 0.8}
        percepts = synth_percepts(positions, 1.0, {}, values)
        field = update_fusion_field(values, percepts, 0.5)
        assert field["r0"].value == pytest.approx(0.4)
        assert field["r0"].direction is None

    def test_direction_absent_iff_unsourced(self):
        positions = {"r0": (0.0, 0.0), "r1": (0.5, 0.0)}
        field = iterate_field(positions, 1.0, {"r0": 0.6}, 0.5, rounds=2)
        assert field["r0"].direction is not None
        assert field["r1"].direction is not None
        # drop the detection: values keep decaying, directions vanish
        values = {rid: e.value for rid, e in field.items()}
        percepts = synth_percepts(positions, 1.0, {}, values)
        after = update_fusion_field(values, percepts, 0.5)
        assert after["r1"].value > 0.0
        # r1 still has a positive neighbor (r0), so it keeps a direction;
        # isolate r0: no detection, no positive neighbor above its own decayed value
        lonely = update_fusion_field({"r0": 0.4}, synth_percepts({"r0": (0.0, 0.0)}, 1.0, {}, {}), 0.5)
        assert lonely["r0"].value == pytest.approx(0.2)
        assert lonely["r0"].direction is None

    @settings(max_examples=100, deadline=None)
    @given(data=st.data())
    def test_values_always_bounded(self, data):
        n = data.draw(st.integers(2, 8))
        positions = {
            f"r{i}": (
                data.draw(st.floats(0, 5, allow_nan=False)),
                data.draw(st.floats(0, 5, allow_nan=False)),
            )
            for i in range(n)
        }
        values = {f"r{i}": data.draw(st.floats(0, 1)) for i in range(n)}
        detections = {
            f"r{i}": data.draw(st.floats(0, 1))
            for i in range(n)
            if data.draw(st.booleans())
        }
        decay = data.draw(st.floats(0.01, 0.99))
        percepts = synth_percepts(positions, 2.0, detections, values)
        field = update_fusion_field(values, percepts, decay)
        for entry in field.values():
            assert 0.0 <= entry.value <= 1.0


class TestGradientReadout:
    def avatar(self, readout):
        body = AgentBody(id="human", kind=AgentKind.HUMAN, position=(0.0, 0.0), max_speed=1.0)
        return HumanAvatar(body, None, readout)

    def test_all_zero_gives_none(self):
        direction, magnitude = gradient_readout(self.avatar({"r0": ((1.0, 0.0), 0.0)}))
        assert direction is None
        assert magnitude == 0.0

    def test_single_robot_at_ninety_degrees(self):
        direction, magnitude = gradient_readout(self.avatar({"r0": ((0.0, 2.0), 0.5)}))
        assert direction == (0.0, 1.0)
        assert magnitude == 0.5

    def test_argmax_wins(self):
        readout = {"r0": ((2.0, 0.0), 0.3), "r1": ((-2.0, 0.0), 0.6)}
        direction, magnitude = gradient_readout(self.avatar(readout))
        assert direction == (-1.0, 0.0)
        assert magnitude == 0.6


class TestCommunicationGraph:
    def test_edge_at_exact_radius(self):
        bodies = {"a": make_robot("a", (0.0, 0.0)), "b": make_robot("b", (3.0, 0.0))}
        adj = communication_graph(bodies, 3.0)
        assert "b" in adj["a"] and "a" in adj["b"]

    def test_no_edge_beyond_radius(self):
        bodies = {"a": make_robot("a", (0.0, 0.0)), "b": make_robot("b", (3.0 + 1e-9, 0.0))}
        adj = communication_graph(bodies, 3.0)
        assert adj["a"] == set() and adj["b"] == set()

    def test_single_node_empty_graph(self):
        adj = communication_graph({"a": make_robot("a", (0.0, 0.0))}, 3.0)
        assert adj == {"a": set()}

    def test_symmetry(self):
        rng = Substream(5)
        bodies = {
            f"r{i}": make_robot(f"r{i}", (rng.uniform(0, 10), rng.uniform(0, 10)))
            for i in range(12)
        }
        adj = communication_graph(bodies, 3.5)
        for a, nbrs in adj.items():
            for b in nbrs:
                assert a in adj[b]


def swarm_state(positions, adopted=None, human=None, config=None):
    cfg = config or SwarmConfig(
        n_robots=max(len(positions), 1),
        comm_radius=3.0,
        sense_radius=2.0,
        decay=0.5,
        separation_distance=1.0,
    )
    robots = {rid: make_robot(rid, pos) for rid, pos in positions.items()}
    field = {rid: FieldEntry(0.0, None) for rid in positions}
    return SwarmState(cfg, robots, field, adopted or {}, human)


class TestPostures:
    def test_hold_all_velocities_exactly_zero(self):
        positions = {f"r{i}": (float(i), 0.3 * i) for i in range(5)}
        state = swarm_state(positions)
        adopted = {rid: AdoptedCommand(0, Hold(), None) for rid in positions}
        state = replace(state, adopted=adopted)
        moves = posture_step(state, None, None, state.field)
        assert all(m.velocity == (0.0, 0.0) for m in moves.values())

    def test_no_command_no_movement(self):
        positions = {"r0": (0.0, 0.0), "r1": (0.5, 0.0)}
        state = swarm_state(positions)
        moves = posture_step(state, None, None, state.field)
        assert all(m.velocity == (0.0, 0.0) for m in moves.values())

    def test_follow_gradient_moves_along_field(self):
        positions = {"r0": (0.0, 0.0)}
        state = swarm_state(positions)
        field = {"r0": FieldEntry(0.5, (0.0, 1.0))}
        adopted = {"r0": AdoptedCommand(0, FollowGradient(), None)}
        state = replace(state, field=field, adopted=adopted)
        moves = posture_step(state, None, None, field)
        v = moves["r0"].velocity
        assert v[0] == 0.0 and v[1] > 0.0

    def test_extend_limb_length_validated(self):
        cfg = SwarmConfig(
            n_robots=4, comm_radius=3.0, sense_radius=2.0, decay=0.5, separation_distance=1.0
        )
        validate_command(ExtendLimb(0.0, 4.0), cfg)
        with pytest.raises(ValueError):
            validate_command(ExtendLimb(0.0, 4.5), cfg)


class ScriptedOperator(DecisionMatrix):
    """Emits one posture command at step 0, then keeps quiet."""

    needs_percept = False
    uses_rng = False

    def __init__(self, command):
        self.command = command

    def initial_state(self, body):
        return {"sent": False}

    def decide(self, percept, state, rng):
        from swarmamp.world import NoOp

        if not state["sent"]:
            state["sent"] = True
            return self.command, state
        return NoOp(), state


def run_posture_episode(command, seed=11, steps=200, n_robots=10, arena=12.0, cluster=False):
    from swarmamp.situations import Situation

    cfg = SwarmConfig(
        n_robots=n_robots,
        comm_radius=4.0,
        sense_radius=2.5,
        decay=0.7,
        separation_distance=1.5,
    )
    situation = Situation({"arena": arena, "n_robots": n_robots}, scenario="scatter")
    unit = SwarmUnit(cfg)
    policies = {"human": ScriptedOperator(command)}
    for i in range(n_robots):
        policies[f"robot_{i:02d}"] = unit
    goal = GoalSpec(metric="min_human_object_distance", tolerated_range=(-1.0, -0.5))
    return run_episode(
        situation,
        policies,
        goal,
        Budget(steps=steps),
        seed=seed,
        params={"comm_radius": 4.0, "separation_distance": 1.5, "cluster": cluster},
    )


def mean_distance_to_human(state) -> float:
    human = state.bodies["human"].position
    robots = [b for rid, b in state.bodies.items() if rid != "human"]
    return sum(math.hypot(b.position[0] - human[0], b.position[1] - human[1]) for b in robots) / len(robots)


def mean_pairwise_distance(state) -> float:
    robots = [b.position for rid, b in sorted(state.bodies.items()) if rid != "human"]
    total = 0.0
    count = 0
    for i in range(len(robots)):
        for j in range(i + 1, len(robots)):
            total += math.hypot(robots[i][0] - robots[j][0], robots[i][1] - robots[j][1])
            count += 1
    return total / count


def test_contract_pulls_swarm_to_operator():
    trace = run_posture_episode(Contract(), seed=11)
    start = mean_distance_to_human(trace.states[0])
    end = mean_distance_to_human(trace.states[-1])
    assert end < start
    assert end <= 2 * 1.5  # twice the separation distance


def test_disperse_spreads_cluster():
    trace = run_posture_episode(Disperse(), seed=12, arena=20.0, cluster=True)
    start = mean_pairwise_distance(trace.states[0])
    end = mean_pairwise_distance(trace.states[-1])
    assert end > start


def test_posture_locality_masking_robots_far_away():
    # removing robots outside a robot's comm radius must not change its move
    rng = Substream(2718)
    cfg = SwarmConfig(
        n_robots=8, comm_radius=3.0, sense_radius=2.0, decay=0.5, separation_distance=1.0
    )
    for case in range(200):
        positions = {f"r{i}": (rng.uniform(0, 12), rng.uniform(0, 12)) for i in range(8)}
        adopted = {
            rid: AdoptedCommand(0, Contract(), (rng.uniform(0, 12), rng.uniform(0, 12)))
            for rid in positions
        }
        state = swarm_state(positions, adopted=adopted, config=cfg)
        target = "r0"
        full_move = posture_step(state, None, None, state.field)[target]

        keep = {
            rid: pos
            for rid, pos in positions.items()
            if rid == target
            or math.hypot(pos[0] - positions[target][0], pos[1] - positions[target][1]) <= 3.0
        }
        masked = swarm_state(keep, adopted={r: adopted[r] for r in keep}, config=cfg)
        masked_move = posture_step(masked, None, None, masked.field)[target]
        assert full_move == masked_move


def test_fusion_locality_masking():
    rng = Substream(1618)
    for case in range(200):
        n = 6
        positions = {f"r{i}": (rng.uniform(0, 8), rng.uniform(0, 8)) for i in range(n)}
        values = {f"r{i}": rng.random() for i in range(n)}
        detections = {"r1": 0.9}
        percepts = synth_percepts(positions, 2.5, detections, values)
        full = update_fusion_field(values, percepts, 0.6)["r0"]
        # masking: the percept already contains only in-radius content, so
        # recomputing from r0's percept alone must give the same answer
        solo = update_fusion_field(values, {"r0": percepts["r0"]}, 0.6)["r0"]
        assert full == solo


def test_extend_limb_chains_along_bearing():
    # after enough steps the robots line up close to the commanded ray
    bearing = 0.0  # east
    trace = run_posture_episode(ExtendLimb(bearing, 9.0), seed=21, steps=150, cluster=True)
    final = trace.states[-1]
    human = final.bodies["human"].position
    off_axis = []
    along = []
    for rid, body in final.bodies.items():
        if rid == "human":
            continue
        off_axis.append(abs(body.position[1] - human[1]))
        along.append(body.position[0] - human[0])
    # most robots ahead of the operator along the bearing, small lateral spread
    assert sorted(along)[len(along) // 2] > 0.5
    assert sum(off_axis) / len(off_axis) < 2.0
    assert max(along) <= 9.0 + 1.0  # capped near the commanded length


def test_command_propagation_is_hop_by_hop():
    # chain: human - r0 - r1 - r2, spaced at comm radius
    cfg = SwarmConfig(
        n_robots=3, comm_radius=1.0, sense_radius=0.5, decay=0.5, separation_distance=0.4
    )
    positions = {"r0": (1.0, 0.0), "r1": (2.0, 0.0), "r2": (3.0, 0.0)}
    state = swarm_state(positions, config=cfg)
    seen = {"r0": (0.0, 0.0)}  # only r0 sees the human
    a1 = propagate_commands(state, Contract(), 0, seen)
    assert set(a1) == {"r0"}
    state = replace(state, adopted=a1)
    a2 = propagate_commands(state, Contract(), 0, seen)
    assert set(a2) == {"r0", "r1"}
    state = replace(state, adopted=a2)
    a3 = propagate_commands(state, Contract(), 0, seen)
    assert set(a3) == {"r0", "r1", "r2"}
    # estimates travel with the command
    assert a3["r2"].human_estimate == (0.0, 0.0)
