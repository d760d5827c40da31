"""Scripted operator policies, supervisory trust loop, and task allocation.

These decision matrices stand in for the live operator during headless
evaluation. The reactive layer (random walk, gradient following) responds to
percepts directly; the supervisory layer gates the swarm per situation
bucket through a trust table. Adaptive and anticipatory layers are declared
as interfaces only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

from . import geometry as geo
from .episode import DecisionMatrix
from .errors import LoaViolation, UnknownBucket
from .rng import Substream
from .swarm import Disperse, FollowGradient, Hold, PostureCommand, readout_from_percept
from .world import AgentBody, AgentKind, Broadcast, Move, NoOp, Percept


class AdaptivePolicyLayer:
    """Interface for policies that refit their rules to the current situation.

    No built-in implementation; declared so higher layers can be stacked
    later without changing the episode loop.
    """

    def adapt(self, evidence: Any) -> None:
        raise NotImplementedError


class AnticipatoryPolicyLayer:
    """Interface for policies that project future world states."""

    def project(self, horizon: int) -> Any:
        raise NotImplementedError


class InertPolicy(DecisionMatrix):
    """Does nothing; stands in for an absent or withheld agent."""

    needs_percept = False
    uses_rng = False

    def decide(self, percept, state, rng):
        return NoOp(), state


class RandomWalkPolicy(DecisionMatrix):
    """Uniformly random unit-speed movement each step."""

    needs_percept = False
    uses_rng = True

    def __init__(self, speed: float = 1.0):
        self.speed = speed

    def decide(self, percept, state, rng: Substream):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        return Move((self.speed * math.cos(theta), self.speed * math.sin(theta))), state


class DiscreteRandomWalkPolicy(DecisionMatrix):
    """Axis-aligned unit steps in one of four directions, for lattice worlds."""

    needs_percept = False
    uses_rng = True

    _DIRS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))

    def decide(self, percept, state, rng: Substream):
        return Move(self._DIRS[rng.integers(4)]), state


class FairCoinPolicy(DecisionMatrix):
    """One fair bit per episode: heads moves a unit right, tails never moves.

    Stub for estimator checks: paired with a goal on the final x position
    the success probability is exactly 1/2.
    """

    needs_percept = False
    uses_rng = True

    def decide(self, percept, state, rng: Substream):
        if state is None:
            heads = bool(rng.bit())
            return (Move((1.0, 0.0)) if heads else NoOp()), ("heads" if heads else "tails")
        return NoOp(), state


@dataclass
class GradientFollowerState:
    posture: PostureCommand | None = None
    last_direction: tuple[float, float] | None = None
    misses: int = 0


class GradientFollowerPolicy(DecisionMatrix):
    """Reactive operator: search posture until the web reports a trace.

    Emits a posture command only when the desired posture changes (one
    journal record per command, independent of swarm size). While the local
    gradient readout is at or above the threshold the operator climbs it;
    after losing the trace it coasts along the last good direction for a
    bounded number of steps before falling back to the search posture. The
    operator's own detections feed the fusion web via its broadcast.
    """

    needs_percept = True
    uses_rng = False

    def __init__(self, threshold: float, speed: float = 1.0, patience: int = 40):
        if not 0.0 <= threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        self.threshold = threshold
        self.speed = speed
        self.patience = patience

    def initial_state(self, body: AgentBody) -> GradientFollowerState:
        return GradientFollowerState()

    def decide(self, percept: Percept, state: GradientFollowerState, rng):
        direction, magnitude = readout_from_percept(percept)
        own = max((d.strength for d in percept.local_detections), default=0.0)

        tracking = direction is not None and magnitude >= self.threshold
        if tracking:
            state.last_direction = direction
            state.misses = 0
        elif (
            isinstance(state.posture, FollowGradient)
            and state.last_direction is not None
            and state.misses < self.patience
        ):
            state.misses += 1
            direction = state.last_direction
            tracking = True

        desired: PostureCommand = FollowGradient() if tracking else Disperse()
        if state.posture != desired:
            state.posture = desired
            return desired, state

        if tracking and direction is not None:
            return (Move(geo.scale(direction, self.speed)), Broadcast(own)), state
        return Broadcast(own), state


# --- trust and supervision ---------------------------------------------------


@dataclass(frozen=True)
class TrustModel:
    """Believed swarm competence per situation bucket, plus a deploy threshold.

    bucket_edges are the sorted boundaries of len(believed) + 1 values
    partitioning the swept axis range.
    """

    bucket_edges: tuple[float, ...]
    believed_competence: tuple[float, ...]
    deploy_threshold: float

    def __post_init__(self):
        if len(self.bucket_edges) != len(self.believed_competence) + 1:
            raise ValueError("need exactly one more edge than buckets")
        if list(self.bucket_edges) != sorted(self.bucket_edges):
            raise ValueError("bucket edges must be sorted")
        if not 0.0 <= self.deploy_threshold <= 1.0:
            raise ValueError("deploy threshold must lie in [0, 1]")
        for b in self.believed_competence:
            if not 0.0 <= b <= 1.0:
                raise ValueError("believed competence must lie in [0, 1]")

    def bucket_for(self, value: float) -> int:
        if not self.bucket_edges[0] <= value <= self.bucket_edges[-1]:
            raise UnknownBucket(f"value {value} outside bucketed range")
        for i in range(len(self.believed_competence)):
            if value <= self.bucket_edges[i + 1]:
                return i
        return len(self.believed_competence) - 1


class CalibrationTag(str, Enum):
    CALIBRATED = "calibrated"
    MISUSE = "misuse"
    DISUSE = "disuse"


class SupervisoryVariant(str, Enum):
    DEPLOY = "deploy"
    WITHHOLD = "withhold"
    REPARAMETERIZE = "reparameterize"


@dataclass(frozen=True)
class SupervisoryAction:
    variant: SupervisoryVariant
    ai_id: str
    parameters: Mapping[str, Any]
    calibration_tag: CalibrationTag


def supervisory_step(
    trust: TrustModel,
    situation_bucket: int,
    true_competence_probe: float,
    ai_id: str = "swarm",
    parameters: Mapping[str, Any] | None = None,
) -> SupervisoryAction:
    """One supervisory decision: deploy the AI iff believed competence clears
    the threshold, tagged against the true competence probe.

    Misuse marks overtrust (deployed where the probe is below threshold),
    disuse marks undertrust (withheld where it would clear it). The probe is
    a simulation-only construct; real operators cannot observe it.
    """
    if not 0 <= situation_bucket < len(trust.believed_competence):
        raise UnknownBucket(f"bucket {situation_bucket} not in model")
    believed = trust.believed_competence[situation_bucket]
    deploy = believed >= trust.deploy_threshold
    fits = true_competence_probe >= trust.deploy_threshold
    if deploy and not fits:
        tag = CalibrationTag.MISUSE
    elif not deploy and fits:
        tag = CalibrationTag.DISUSE
    else:
        tag = CalibrationTag.CALIBRATED
    variant = SupervisoryVariant.DEPLOY if deploy else SupervisoryVariant.WITHHOLD
    return SupervisoryAction(variant, ai_id, dict(parameters or {}), tag)


@dataclass
class SupervisorScriptState:
    action: SupervisoryAction | None = None
    inner_state: Any = None
    sent_hold: bool = False


class SupervisorScriptPolicy(DecisionMatrix):
    """Supervisory operator: gates the swarm per episode through a trust table.

    At the first step the supervisor reads the situation's bucket value and
    either deploys the swarm (thereafter acting as the given inner policy)
    or withholds it (sending one Hold command and falling back to the
    fallback policy, typically manual search).
    """

    needs_percept = True
    uses_rng = True

    def __init__(
        self,
        trust: TrustModel,
        bucket_value: float,
        true_probe: float,
        inner: DecisionMatrix,
        fallback: DecisionMatrix,
    ):
        self.trust = trust
        self.bucket_value = bucket_value
        self.true_probe = true_probe
        self.inner = inner
        self.fallback = fallback
        self.last_action: SupervisoryAction | None = None

    def initial_state(self, body: AgentBody) -> SupervisorScriptState:
        return SupervisorScriptState()

    def decide(self, percept, state: SupervisorScriptState, rng: Substream):
        if state.action is None:
            bucket = self.trust.bucket_for(self.bucket_value)
            state.action = supervisory_step(self.trust, bucket, self.true_probe)
            self.last_action = state.action
            if state.action.variant is SupervisoryVariant.DEPLOY:
                state.inner_state = self.inner.initial_state(percept.self_state if percept else None)
            else:
                state.inner_state = self.fallback.initial_state(percept.self_state if percept else None)
        if state.action.variant is SupervisoryVariant.DEPLOY:
            result, state.inner_state = self.inner.decide(percept, state.inner_state, rng)
            return result, state
        if not state.sent_hold:
            state.sent_hold = True
            return Hold(), state
        result, state.inner_state = self.fallback.decide(percept, state.inner_state, rng)
        return result, state


class TeleopPolicy(DecisionMatrix):
    """Live operator: applies the latest command pushed in from the bridge.

    The standing velocity persists until replaced; posture commands are
    emitted once each. Feeding commands happens outside the decide call, so
    a journaled session stays replayable.
    """

    needs_percept = False
    uses_rng = False

    def __init__(self, max_speed: float = 1.0):
        self.max_speed = max_speed
        self._velocity: tuple[float, float] = (0.0, 0.0)
        self._pending_posture: PostureCommand | None = None

    def set_velocity(self, velocity: tuple[float, float]) -> None:
        self._velocity = velocity

    def push_posture(self, command: PostureCommand) -> None:
        self._pending_posture = command

    def decide(self, percept, state, rng):
        if self._pending_posture is not None:
            cmd = self._pending_posture
            self._pending_posture = None
            return cmd, state
        if self._velocity == (0.0, 0.0):
            return NoOp(), state
        return Move(geo.clamp_norm(self._velocity, self.max_speed)), state


# --- task allocation ---------------------------------------------------------


class Loa(str, Enum):
    MANUAL = "manual"
    SHARED = "shared"
    AUTOMATED = "automated"


@dataclass(frozen=True)
class AllocationDesign:
    tasks: tuple[str, ...]
    assignment: Mapping[str, tuple[frozenset[str], Loa]]


def build_allocation(
    tasks: Sequence[str],
    assignment: Mapping[str, tuple[Sequence[str], Loa | str]],
    agents: Mapping[str, AgentKind],
) -> AllocationDesign:
    """Validate a task-to-agents mapping against the level-of-automation rules.

    Manual tasks may name only humans, automated tasks only AI controllers,
    and shared tasks need at least one of each. Agents may appear under any
    number of tasks.
    """
    built: dict[str, tuple[frozenset[str], Loa]] = {}
    for task in tasks:
        if task not in assignment:
            raise LoaViolation(f"task {task!r} has no assignment")
        agent_ids, loa = assignment[task]
        loa = Loa(loa)
        ids = frozenset(agent_ids)
        if not ids:
            raise LoaViolation(f"task {task!r} names no agents")
        kinds = set()
        for agent_id in ids:
            if agent_id not in agents:
                raise LoaViolation(f"task {task!r} names unknown agent {agent_id!r}")
            kinds.add(agents[agent_id])
        if loa is Loa.MANUAL and kinds != {AgentKind.HUMAN}:
            raise LoaViolation(f"manual task {task!r} must name only human agents")
        if loa is Loa.AUTOMATED and kinds != {AgentKind.AI_CONTROLLER}:
            raise LoaViolation(f"automated task {task!r} must name only AI controllers")
        if loa is Loa.SHARED and not (
            AgentKind.HUMAN in kinds and AgentKind.AI_CONTROLLER in kinds
        ):
            raise LoaViolation(f"shared task {task!r} needs a human and an AI controller")
        built[task] = (ids, loa)
    return AllocationDesign(tuple(tasks), built)
