"""Episode execution: the perceive-decide-step loop with seeded reproducibility.

An episode is a pure function of (situation, policies, goal, budget, seed).
Every random draw comes from a substream keyed by (seed, purpose, step,
agent), so neither agent iteration order nor parallel batch execution can
change a trace.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence

from . import geometry as geo
from . import rng as rnd
from .errors import PolicyFailure
from .goals import Budget, GoalSpec, ResourceLedger
from .rng import Substream
from .situations import Situation
from .world import (
    Action,
    ActionBundle,
    AgentBody,
    Broadcast,
    Percept,
    WorldState,
    perceive,
    step,
)

log = logging.getLogger(__name__)


class Outcome(str, Enum):
    GOAL_REACHED = "goal_reached"
    BUDGET_EXHAUSTED = "budget_exhausted"
    ABORTED = "aborted"


@dataclass(frozen=True)
class StepState:
    """World snapshot plus all agent bodies at one instant."""

    world: WorldState
    bodies: Mapping[str, AgentBody]


@dataclass(frozen=True)
class CommandRecord:
    """Out-of-band operator command captured by the episode journal."""

    time: int
    emitter: str
    command: Any
    seq: int


@dataclass
class EpisodeTrace:
    seed: int
    situation: Situation
    states: list[StepState]
    outcome: Outcome
    outcome_reason: str | None
    resources_spent: ResourceLedger
    commands: list[CommandRecord] = field(default_factory=list)


class DecisionMatrix:
    """Policy interface: a pure mapping (percept, state, rng) -> (action, state').

    Subclasses may return a single Action, a bundle of actions of distinct
    kinds, or an out-of-band command object (anything that is not an Action),
    which the episode journals and replaces with NoOp in the world.
    """

    needs_percept: bool = True
    uses_rng: bool = True

    def initial_state(self, body: AgentBody) -> Any:
        return None

    def decide(self, percept: Percept | None, state: Any, rng: Substream) -> tuple[Any, Any]:
        raise NotImplementedError


class GroupDecisionMatrix:
    """Joint policy deciding for several agents in one synchronous round.

    Registered in the policy map under every member id; the episode invokes
    decide_group once per step with the members' percepts and the journal of
    commands emitted at strictly earlier steps.
    """

    needs_percept: bool = True

    def initial_state(self, bodies: Mapping[str, AgentBody]) -> Any:
        return None

    def decide_group(
        self,
        percepts: Mapping[str, Percept],
        state: Any,
        rng: Substream,
        inbox: Sequence[CommandRecord],
    ) -> tuple[Mapping[str, Any], Any]:
        raise NotImplementedError


_NULL_RNG = Substream(0)


def _is_action(result: Any) -> bool:
    if isinstance(result, Action):
        return True
    if isinstance(result, (list, tuple)):
        return all(isinstance(a, Action) for a in result)
    return False


def _count_messages(bundle: ActionBundle) -> int:
    if isinstance(bundle, Broadcast):
        return 1
    if isinstance(bundle, (list, tuple)):
        return sum(1 for a in bundle if isinstance(a, Broadcast))
    return 0


def run_episode(
    situation: Situation,
    policies: Mapping[str, DecisionMatrix | GroupDecisionMatrix],
    goal: GoalSpec,
    budget: Budget,
    seed: int,
    params: Mapping[str, Any] | None = None,
    scenario_builder=None,
) -> EpisodeTrace:
    """Run one episode to goal, budget exhaustion, or abort.

    The initial world comes from the situation's registered scenario
    constructor (or an explicit scenario_builder callable taking
    (assignment-with-params, rng) and returning (world, bodies)).
    """
    from .scenarios import build_scenario  # deferred: scenarios import policies

    merged: dict[str, Any] = dict(params or {})
    merged.update(situation.assignment)
    init_rng = Substream(seed, rnd.INIT)
    if scenario_builder is not None:
        world, bodies = scenario_builder(merged, init_rng)
    else:
        if situation.scenario is None:
            raise ValueError("situation names no scenario constructor")
        world, bodies = build_scenario(situation.scenario, merged, init_rng)

    missing = sorted(set(bodies) - set(policies))
    if missing:
        raise PolicyFailure(missing[0], None)

    agent_order = sorted(bodies)
    tokens = {agent_id: rnd.agent_token(agent_id) for agent_id in agent_order}

    # group policies appear once, at the position of their first member
    groups: dict[int, tuple[GroupDecisionMatrix, list[str]]] = {}
    singles: list[str] = []
    for agent_id in agent_order:
        policy = policies[agent_id]
        if isinstance(policy, GroupDecisionMatrix):
            entry = groups.setdefault(id(policy), (policy, []))
            entry[1].append(agent_id)
        else:
            singles.append(agent_id)

    policy_state: dict[str, Any] = {
        agent_id: policies[agent_id].initial_state(bodies[agent_id]) for agent_id in singles
    }
    group_state: dict[int, Any] = {
        key: grp.initial_state({a: bodies[a] for a in members})
        for key, (grp, members) in groups.items()
    }

    spent = ResourceLedger()
    states = [StepState(world, dict(bodies))]
    journal: list[CommandRecord] = []
    trace = EpisodeTrace(seed, situation, states, Outcome.BUDGET_EXHAUSTED, None, spent, journal)
    noisy = float(world.env_params.get("sensor_noise_sigma", 0.0)) > 0.0

    t = 0
    while True:
        if goal.satisfied(trace):
            trace.outcome = Outcome.GOAL_REACHED
            budget.cap(spent)
            break
        if budget.exhausted(spent):
            trace.outcome = Outcome.BUDGET_EXHAUSTED
            budget.cap(spent)
            break

        actions: dict[str, ActionBundle] = {}

        def percept_for(agent_id: str) -> Percept:
            stream = Substream(seed, rnd.PERCEIVE, t, tokens[agent_id]) if noisy else None
            return perceive(world, bodies, agent_id, stream)

        try:
            for agent_id in singles:
                policy = policies[agent_id]
                pct = percept_for(agent_id) if policy.needs_percept else None
                stream = (
                    Substream(seed, rnd.DECIDE, t, tokens[agent_id])
                    if policy.uses_rng
                    else _NULL_RNG
                )
                result, policy_state[agent_id] = policy.decide(pct, policy_state[agent_id], stream)
                _record(result, agent_id, t, actions, journal, spent)

            for key, (grp, members) in groups.items():
                pcts = {a: percept_for(a) for a in members} if grp.needs_percept else {}
                stream = Substream(seed, rnd.DECIDE, t, tokens[members[0]])
                inbox = [rec for rec in journal if rec.time < t]
                results, group_state[key] = grp.decide_group(pcts, group_state[key], stream, inbox)
                for agent_id, result in results.items():
                    _record(result, agent_id, t, actions, journal, spent)
        except Exception as exc:  # noqa: BLE001 - policy errors abort the episode
            failed = exc.agent_id if isinstance(exc, PolicyFailure) else "?"
            log.warning("episode %d aborted at step %d: %r", seed, t, exc)
            trace.outcome = Outcome.ABORTED
            trace.outcome_reason = f"policy_failure:{failed}:{exc}"
            break

        old_bodies = bodies
        world, bodies = step(world, bodies, actions, Substream(seed, rnd.STEP, t))
        spent.steps += 1
        spent.distance += sum(
            geo.dist(bodies[a].position, old_bodies[a].position) for a in agent_order
        )
        states.append(StepState(world, dict(bodies)))
        t += 1

    return trace


def _record(
    result: Any,
    agent_id: str,
    t: int,
    actions: dict[str, ActionBundle],
    journal: list[CommandRecord],
    spent: ResourceLedger,
) -> None:
    if _is_action(result):
        actions[agent_id] = result
        spent.messages += _count_messages(result)
    else:
        journal.append(CommandRecord(t, agent_id, result, len(journal)))
        spent.messages += 1
