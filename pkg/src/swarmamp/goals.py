"""Goal specifications, performance metrics, and resource accounting.

A goal is a named performance metric plus a tolerated range; an episode
counts as successful when the metric of its trace falls inside the range.
Metrics are registered by name so configs stay serializable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from . import geometry as geo
from .errors import UnknownMetric, ZeroLimit
from .world import AgentKind

if TYPE_CHECKING:
    from .episode import EpisodeTrace


@dataclass
class ResourceLedger:
    """Spent resources of one episode: steps, distance traveled, messages."""

    steps: int = 0
    distance: float = 0.0
    messages: int = 0

    def as_dict(self) -> dict:
        return {"steps": self.steps, "distance": self.distance, "messages": self.messages}


@dataclass(frozen=True)
class Budget:
    """Resource limits; None means the component is unconstrained."""

    steps: int
    distance: float | None = None
    messages: int | None = None

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("step budget must be non-negative")

    def exhausted(self, spent: ResourceLedger) -> bool:
        if spent.steps >= self.steps:
            return True
        if self.distance is not None and spent.distance >= self.distance:
            return True
        if self.messages is not None and spent.messages >= self.messages:
            return True
        return False

    def cap(self, spent: ResourceLedger) -> None:
        """Clamp spent values at their limits (applied when a budget ends the run)."""
        spent.steps = min(spent.steps, self.steps)
        if self.distance is not None:
            spent.distance = min(spent.distance, self.distance)
        if self.messages is not None:
            spent.messages = min(spent.messages, self.messages)

    def as_dict(self) -> dict:
        return {"steps": self.steps, "distance": self.distance, "messages": self.messages}


def normalize_resources(spent: ResourceLedger, limits: Budget) -> float:
    """Worst-component resource score: 1 - max(spent/limit), clamped to [0, 1].

    1.0 means nothing spent, 0.0 means some budget fully used. Components
    with a None limit are ignored.
    """
    ratios = []
    pairs = [
        (float(spent.steps), float(limits.steps)),
        (spent.distance, limits.distance),
        (float(spent.messages), None if limits.messages is None else float(limits.messages)),
    ]
    for used, limit in pairs:
        if limit is None:
            continue
        if limit <= 0.0:
            raise ZeroLimit("resource limit must be positive where constrained")
        ratios.append(used / limit)
    if not ratios:
        return 1.0
    return min(max(1.0 - max(ratios), 0.0), 1.0)


@dataclass(frozen=True)
class GoalSpec:
    """Named performance metric with the tolerated range that defines success."""

    metric: str
    tolerated_range: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.tolerated_range
        if lo > hi:
            raise ValueError("tolerated range must satisfy lo <= hi")

    def satisfied(self, trace: "EpisodeTrace") -> bool:
        value = evaluate_metric(self.metric, trace)
        lo, hi = self.tolerated_range
        return lo <= value <= hi


MetricFn = Callable[["EpisodeTrace"], float]

_METRICS: dict[str, MetricFn] = {}


def register_metric(name: str) -> Callable[[MetricFn], MetricFn]:
    def deco(fn: MetricFn) -> MetricFn:
        _METRICS[name] = fn
        return fn

    return deco


def metric_names() -> list[str]:
    return sorted(_METRICS)


def evaluate_metric(name: str, trace: "EpisodeTrace") -> float:
    try:
        fn = _METRICS[name]
    except KeyError:
        raise UnknownMetric(name) from None
    return fn(trace)


# --- built-in metrics -------------------------------------------------------


def _min_distance_to_objects(trace: "EpisodeTrace", kinds: set[AgentKind] | None) -> float:
    best = float("inf")
    for state in trace.states:
        if not state.world.objects:
            continue
        for body in state.bodies.values():
            if kinds is not None and body.kind not in kinds:
                continue
            for obj in state.world.objects:
                d = geo.dist(body.position, obj.position)
                if d < best:
                    best = d
    return best


@register_metric("min_human_object_distance")
def _min_human_object_distance(trace: "EpisodeTrace") -> float:
    """Closest approach of any human to any object over the whole trace."""
    return _min_distance_to_objects(trace, {AgentKind.HUMAN})


@register_metric("min_agent_object_distance")
def _min_agent_object_distance(trace: "EpisodeTrace") -> float:
    return _min_distance_to_objects(trace, None)


@register_metric("min_human_target_distance")
def _min_human_target_distance(trace: "EpisodeTrace") -> float:
    """Closest approach of any human to the first object (the designated target)."""
    best = float("inf")
    for state in trace.states:
        if not state.world.objects:
            continue
        target = state.world.objects[0]
        for body in state.bodies.values():
            if body.kind is AgentKind.HUMAN:
                best = min(best, geo.dist(body.position, target.position))
    return best


@register_metric("discovered_count")
def _discovered_count(trace: "EpisodeTrace") -> float:
    final = trace.states[-1].world
    return float(sum(1 for o in final.objects if o.discovered))


@register_metric("steps_used")
def _steps_used(trace: "EpisodeTrace") -> float:
    return float(trace.resources_spent.steps)


@register_metric("final_human_x")
def _final_human_x(trace: "EpisodeTrace") -> float:
    final = trace.states[-1]
    for body in final.bodies.values():
        if body.kind is AgentKind.HUMAN:
            return body.position[0]
    return float("nan")
