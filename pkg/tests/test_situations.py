from __future__ import annotations

import pytest

from swarmamp.errors import EmptyRange, GridTooCoarse
from swarmamp.situations import (
    ContinuousRange,
    DiscreteRange,
    Sampler,
    SituationSpace,
    Variable,
    sample_situations,
)


def space_of(*variables, sampler=Sampler.UNIFORM):
    return SituationSpace(tuple(variables), sampler)


def test_single_discrete_value_repeats():
    space = space_of(Variable("v", DiscreteRange(("a",))))
    out = sample_situations(space, 3, seed=0)
    assert [s.assignment["v"] for s in out] == ["a", "a", "a"]


def test_uniform_mean_clt_bound():
    space = space_of(Variable("x", ContinuousRange(0.0, 1.0)))
    out = sample_situations(space, 100_000, seed=42)
    mean = sum(s.assignment["x"] for s in out) / len(out)
    assert abs(mean - 0.5) < 0.005


def test_grid_cross_enumerates_exact_product():
    space = space_of(
        Variable("a", DiscreteRange((1, 2))),
        Variable("b", DiscreteRange(("x", "y"))),
        sampler=Sampler.GRID_CROSS,
    )
    out = sample_situations(space, 4, seed=0)
    combos = {(s.assignment["a"], s.assignment["b"]) for s in out}
    assert combos == {(1, "x"), (1, "y"), (2, "x"), (2, "y")}
    assert len(out) == 4


def test_grid_cross_rounds_down_to_full_product():
    space = space_of(
        Variable("a", DiscreteRange((1, 2))),
        Variable("x", ContinuousRange(0.0, 1.0)),
        sampler=Sampler.GRID_CROSS,
    )
    out = sample_situations(space, 7, seed=0)  # 2 discrete * 3 grid points = 6 <= 7
    assert len(out) == 6
    xs = sorted({s.assignment["x"] for s in out})
    assert xs == [0.0, 0.5, 1.0]


def test_grid_too_coarse():
    space = space_of(
        Variable("a", DiscreteRange((1, 2))),
        Variable("b", DiscreteRange(("x", "y"))),
        sampler=Sampler.GRID_CROSS,
    )
    with pytest.raises(GridTooCoarse):
        sample_situations(space, 3, seed=0)


def test_empty_ranges_rejected():
    with pytest.raises(EmptyRange):
        DiscreteRange(())
    with pytest.raises(EmptyRange):
        ContinuousRange(2.0, 2.0)


def test_duplicate_names_rejected():
    with pytest.raises(ValueError):
        space_of(
            Variable("v", DiscreteRange((1,))),
            Variable("v", DiscreteRange((2,))),
        )


def test_sampling_deterministic_for_seed():
    space = space_of(
        Variable("x", ContinuousRange(0.0, 1.0)), Variable("k", DiscreteRange((1, 2, 3)))
    )
    a = sample_situations(space, 50, seed=7)
    b = sample_situations(space, 50, seed=7)
    c = sample_situations(space, 50, seed=8)
    assert [s.assignment for s in a] == [s.assignment for s in b]
    assert [s.assignment for s in a] != [s.assignment for s in c]


def test_size_descriptor():
    finite = space_of(
        Variable("a", DiscreteRange((1, 2))), Variable("b", DiscreteRange((1, 2, 3)))
    )
    assert finite.size == 6
    mixed = space_of(Variable("a", DiscreteRange((1, 2))), Variable("x", ContinuousRange(0, 1)))
    assert mixed.size == "continuous"


def test_values_validated_against_ranges():
    space = space_of(Variable("x", ContinuousRange(0.0, 1.0)))
    for s in sample_situations(space, 200, seed=3):
        assert 0.0 <= s.assignment["x"] <= 1.0
