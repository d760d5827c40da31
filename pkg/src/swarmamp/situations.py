"""Situation spaces: the variable assignments an agent may be confronted with.

A space lists named variables with continuous intervals or discrete value
sets; sampling produces concrete situations, each of which a registered
scenario constructor can turn into an initial world.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping

from .errors import EmptyRange, GridTooCoarse
from .rng import SAMPLE, Substream


@dataclass(frozen=True)
class ContinuousRange:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo >= self.hi:
            raise EmptyRange(f"continuous range [{self.lo}, {self.hi}] is empty")

    def contains(self, value: Any) -> bool:
        return isinstance(value, (int, float)) and self.lo <= value <= self.hi


@dataclass(frozen=True)
class DiscreteRange:
    values: tuple[Any, ...]

    def __post_init__(self):
        if not self.values:
            raise EmptyRange("discrete range has no values")

    def contains(self, value: Any) -> bool:
        return value in self.values


VariableRange = ContinuousRange | DiscreteRange


@dataclass(frozen=True)
class Variable:
    name: str
    range: VariableRange


class Sampler(str, Enum):
    UNIFORM = "uniform"
    GRID_CROSS = "grid_cross"


@dataclass(frozen=True)
class SituationSpace:
    variables: tuple[Variable, ...]
    sampler: Sampler = Sampler.UNIFORM

    def __post_init__(self):
        if len(self.variables) < 1:
            raise ValueError("a situation space needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")

    @property
    def size(self) -> int | str:
        """Number of assignments for all-discrete spaces, else "continuous"."""
        total = 1
        for v in self.variables:
            if isinstance(v.range, ContinuousRange):
                return "continuous"
            total *= len(v.range.values)
        return total

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)


@dataclass(frozen=True)
class Situation:
    """One assignment of every space variable, plus the scenario that builds it."""

    assignment: Mapping[str, Any]
    scenario: str | None = None

    def validated_against(self, space: SituationSpace) -> "Situation":
        for v in self.variables_of(space):
            if not v.range.contains(self.assignment[v.name]):
                raise ValueError(f"value {self.assignment[v.name]!r} outside range of {v.name}")
        return self

    def variables_of(self, space: SituationSpace):
        for v in space.variables:
            if v.name not in self.assignment:
                raise ValueError(f"missing variable {v.name}")
            yield v


def _grid_points(space: SituationSpace, n: int) -> list[dict[str, Any]]:
    discrete_total = 1
    n_continuous = 0
    for v in space.variables:
        if isinstance(v.range, DiscreteRange):
            discrete_total *= len(v.range.values)
        else:
            n_continuous += 1

    if n_continuous == 0:
        if discrete_total > n:
            raise GridTooCoarse(
                f"full cross product needs {discrete_total} situations, only {n} requested"
            )
        points_per_axis = 0
    else:
        points_per_axis = int((n / discrete_total) ** (1.0 / n_continuous))
        # guard against float underestimation at exact powers
        while discrete_total * (points_per_axis + 1) ** n_continuous <= n:
            points_per_axis += 1
        if points_per_axis == 0:
            raise GridTooCoarse(f"{n} situations cannot cover one grid cross")

    axes: list[list[Any]] = []
    for v in space.variables:
        if isinstance(v.range, DiscreteRange):
            axes.append(list(v.range.values))
        else:
            k = points_per_axis
            if k == 1:
                axes.append([(v.range.lo + v.range.hi) / 2.0])
            else:
                span = v.range.hi - v.range.lo
                axes.append([v.range.lo + span * i / (k - 1) for i in range(k)])
    return [dict(zip([v.name for v in space.variables], combo)) for combo in itertools.product(*axes)]


def sample_situations(
    space: SituationSpace,
    n: int,
    seed: int,
    scenario: str | None = None,
) -> list[Situation]:
    """Draw n situations from the space, deterministically for (space, n, seed).

    Uniform sampling draws each variable i.i.d.; grid-cross enumerates a
    lattice, rounding n down to the nearest full cross product.
    """
    if n < 1:
        raise ValueError("n must be at least 1")

    if space.sampler is Sampler.GRID_CROSS:
        assignments = _grid_points(space, n)
    else:
        assignments = []
        for i in range(n):
            rng = Substream(seed, SAMPLE, i)
            row: dict[str, Any] = {}
            for v in space.variables:
                if isinstance(v.range, ContinuousRange):
                    row[v.name] = rng.uniform(v.range.lo, v.range.hi)
                else:
                    row[v.name] = v.range.values[rng.integers(len(v.range.values))]
            assignments.append(row)

    return [Situation(row, scenario=scenario).validated_against(space) for row in assignments]
