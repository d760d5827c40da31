"""Decision-making competence: effectiveness, efficiency, and verdicts.

Effectiveness is the empirical probability that an episode's performance
metric lands inside the tolerated goal range, averaged over sampled
situations; competence multiplies it by a normalized resource score.
Allocation arms are compared through their confidence intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .episode import EpisodeTrace, Outcome
from .errors import EmptyTraceSet, MismatchedSpace, OutOfRange, UnknownAxis
from .goals import Budget, GoalSpec, evaluate_metric, normalize_resources
from .rng import Substream
from .situations import ContinuousRange, DiscreteRange, Situation, SituationSpace

# two-sided 95% normal quantile, used by the Wilson score interval
Z95 = 1.959963984540054


def wilson_interval(successes: int, n: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; well-behaved near 0/1."""
    if n <= 0:
        raise EmptyTraceSet("interval needs at least one observation")
    p = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n))
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == n else min(1.0, center + half)
    return (lo, hi)


def estimate_effectiveness(
    traces: Sequence[EpisodeTrace], goal: GoalSpec
) -> tuple[float, tuple[float, float]]:
    """Fraction of traces whose metric falls in the tolerated range, with 95% CI."""
    if not traces:
        raise EmptyTraceSet("no traces to evaluate")
    lo, hi = goal.tolerated_range
    successes = sum(1 for t in traces if lo <= evaluate_metric(goal.metric, t) <= hi)
    return successes / len(traces), wilson_interval(successes, len(traces))


def competence(p_hat: float, r: float) -> float:
    """Competence as the product of effectiveness and resource score."""
    if not (0.0 <= p_hat <= 1.0 and 0.0 <= r <= 1.0):
        raise OutOfRange(f"p_hat={p_hat}, r={r} must both lie in [0, 1]")
    return r * p_hat


@dataclass(frozen=True)
class CompetenceReport:
    p_hat: float
    ci: tuple[float, float]
    r: float
    c_hat: float
    c_ci: tuple[float, float]
    n: int
    space_id: str
    policy_id: str
    aborted: int = 0

    def __post_init__(self):
        if abs(self.c_hat - self.r * self.p_hat) > 1e-12:
            raise ValueError("c_hat must equal r * p_hat")
        if not (0.0 <= self.ci[0] <= self.ci[1] <= 1.0):
            raise ValueError("confidence interval must sit inside [0, 1]")

    def as_dict(self) -> dict:
        return {
            "p_hat": self.p_hat,
            "ci_lo": self.ci[0],
            "ci_hi": self.ci[1],
            "r": self.r,
            "c_hat": self.c_hat,
            "c_ci_lo": self.c_ci[0],
            "c_ci_hi": self.c_ci[1],
            "n": self.n,
            "space_id": self.space_id,
            "policy_id": self.policy_id,
            "aborted": self.aborted,
        }


def build_report(
    traces: Sequence[EpisodeTrace],
    goal: GoalSpec,
    budget: Budget,
    space_id: str,
    policy_id: str,
) -> CompetenceReport:
    """Aggregate a batch of traces into a competence report.

    The resource score averages only goal-reached episodes (failures are
    already penalized through effectiveness); with no successes it is 0. The
    competence interval scales the effectiveness interval by the resource
    score, treating r as a fixed factor.
    """
    p_hat, ci = estimate_effectiveness(traces, goal)
    lo, hi = goal.tolerated_range
    scores = [
        normalize_resources(t.resources_spent, budget)
        for t in traces
        if lo <= evaluate_metric(goal.metric, t) <= hi
    ]
    r = sum(scores) / len(scores) if scores else 0.0
    aborted = sum(1 for t in traces if t.outcome is Outcome.ABORTED)
    return CompetenceReport(
        p_hat=p_hat,
        ci=ci,
        r=r,
        c_hat=competence(p_hat, r),
        c_ci=(r * ci[0], r * ci[1]),
        n=len(traces),
        space_id=space_id,
        policy_id=policy_id,
        aborted=aborted,
    )


@dataclass(frozen=True)
class JointnessVerdict:
    c_nat: CompetenceReport
    c_arti: CompetenceReport
    c_joint: CompetenceReport
    verdict: str  # "joint" | "disjoint" | "inconclusive"


def compare_allocations(
    nat: CompetenceReport, arti: CompetenceReport, joint: CompetenceReport
) -> JointnessVerdict:
    """Joint iff the joint competence CI clears both isolated arms' CIs.

    Joint: joint's lower bound strictly above both upper bounds. Disjoint:
    joint's upper bound at or below the better lower bound. Anything else is
    inconclusive. Symmetric in the two isolated arms.
    """
    if not (nat.space_id == arti.space_id == joint.space_id):
        raise MismatchedSpace(
            f"reports disagree on space: {nat.space_id}, {arti.space_id}, {joint.space_id}"
        )
    best_hi = max(nat.c_ci[1], arti.c_ci[1])
    best_lo = max(nat.c_ci[0], arti.c_ci[0])
    if joint.c_ci[0] > best_hi:
        verdict = "joint"
    elif joint.c_ci[1] <= best_lo:
        verdict = "disjoint"
    else:
        verdict = "inconclusive"
    return JointnessVerdict(nat, arti, joint, verdict)


@dataclass(frozen=True)
class CliffFlag:
    left_index: int
    right_index: int
    left_value: object
    right_value: object
    delta: float


@dataclass(frozen=True)
class BrittlenessMap:
    axis: str
    cells: tuple[tuple[object, CompetenceReport], ...]
    cliffs: tuple[CliffFlag, ...]
    cliff_threshold: float


EpisodeRunner = Callable[[Situation, int], EpisodeTrace]


def brittleness_sweep(
    space: SituationSpace,
    axis: str,
    run: EpisodeRunner,
    goal: GoalSpec,
    budget: Budget,
    per_cell_n: int,
    seed: int,
    n_cells: int = 10,
    cliff_threshold: float = 0.2,
    space_id: str = "",
    policy_id: str = "",
) -> BrittlenessMap:
    """Sweep one situation variable and flag competence cliffs.

    The axis is pinned to a grid of values (the variable's values if
    discrete, n_cells evenly spaced points if continuous) while the other
    variables are sampled uniformly. A cliff is flagged between adjacent
    cells when competence changes by more than the threshold and the
    competence intervals are disjoint.
    """
    names = [v.name for v in space.variables]
    if axis not in names:
        raise UnknownAxis(axis)
    if per_cell_n < 30:
        raise ValueError("per_cell_n must be at least 30 for usable intervals")

    var = space.variable(axis)
    if isinstance(var.range, DiscreteRange):
        grid: list[object] = list(var.range.values)
    else:
        lo, hi = var.range.lo, var.range.hi
        if n_cells == 1:
            grid = [(lo + hi) / 2.0]
        else:
            grid = [lo + (hi - lo) * i / (n_cells - 1) for i in range(n_cells)]

    others = tuple(v for v in space.variables if v.name != axis)
    cells: list[tuple[object, CompetenceReport]] = []
    for cell_index, value in enumerate(grid):
        traces: list[EpisodeTrace] = []
        for i in range(per_cell_n):
            rng = Substream(seed, cell_index, i)
            assignment: dict[str, object] = {axis: value}
            for v in others:
                if isinstance(v.range, ContinuousRange):
                    assignment[v.name] = rng.uniform(v.range.lo, v.range.hi)
                else:
                    assignment[v.name] = v.range.values[rng.integers(len(v.range.values))]
            situation = Situation(assignment, scenario=None)
            traces.append(run(situation, rng.spawn_seed()))
        cells.append(
            (value, build_report(traces, goal, budget, space_id, f"{policy_id}@{axis}={value}"))
        )

    cliffs: list[CliffFlag] = []
    for i in range(len(cells) - 1):
        left, right = cells[i][1], cells[i + 1][1]
        delta = left.c_hat - right.c_hat
        disjoint = left.c_ci[0] > right.c_ci[1] or right.c_ci[0] > left.c_ci[1]
        if abs(delta) > cliff_threshold and disjoint:
            cliffs.append(CliffFlag(i, i + 1, cells[i][0], cells[i + 1][0], delta))
    return BrittlenessMap(axis, tuple(cells), tuple(cliffs), cliff_threshold)
