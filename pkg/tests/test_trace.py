import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import corridor
from leemaze import (
    AscendToMax,
    Braided,
    DescendToMin,
    ParentMap,
    follow_pointers,
    generate_maze,
    greedy_trace,
    lee_label,
    lee_trace,
    parse_maze,
)
from leemaze.errors import CycleDetected, LocalExtremum, StepBudgetExceeded, Unreachable


def test_start_equals_goal():
    m = corridor(5)
    assert greedy_trace(np.zeros((1, 5)), m, (0, 2), (0, 2)) == [(0, 2)]


def test_constant_field_is_stuck_immediately():
    m = corridor(5)
    with pytest.raises(LocalExtremum) as err:
        greedy_trace(np.ones((1, 5)), m, m.source, m.destination)
    assert err.value.partial == [m.source]


def test_ascend_mode_walks_uphill():
    m = corridor(5)
    v = np.arange(5, dtype=float)[None, :]
    assert greedy_trace(v, m, m.source, m.destination, AscendToMax) == [(0, c) for c in range(5)]


def test_step_budget():
    m = corridor(6)
    v = -np.arange(6, dtype=float)[None, :]
    with pytest.raises(StepBudgetExceeded):
        greedy_trace(v, m, m.source, m.destination, max_steps=2)


def test_nan_goal_is_unreachable():
    m = corridor(3)
    with pytest.raises(Unreachable):
        greedy_trace(np.array([[2.0, 1.0, np.nan]]), m, m.source, m.destination)


def test_walls_are_never_entered():
    m = parse_maze("S#.\n...\n..D\n")
    v = np.array([[4.0, -100.0, 2.0], [3.0, 2.0, 1.0], [2.0, 1.0, 0.0]])
    assert greedy_trace(v, m, m.source, m.destination) == [(0, 0), (1, 0), (1, 1), (1, 2), (2, 2)]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 500), a=st.floats(0.01, 50), b=st.floats(-100, 100), cube=st.booleans())
def test_path_invariant_under_monotone_transform(seed, a, b, cube):
    m = generate_maze(15, 15, Braided(), seed)
    f = lee_label(m)
    v = f.values
    g = a * v**3 + b if cube else a * v + b
    assert greedy_trace(g, m, m.source, m.destination) == lee_trace(f)
    assert greedy_trace(-g, m, m.source, m.destination, AscendToMax) == lee_trace(f)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 500), data=st.data())
def test_monotone_along_a_route_reaches_goal(seed, data):
    # values strictly decrease along one route and exceed it everywhere else
    m = generate_maze(11, 11, Braided(), seed)
    route = lee_trace(lee_label(m))
    steps = data.draw(st.lists(st.floats(0.1, 10), min_size=len(route), max_size=len(route)))
    along = np.cumsum(steps)[::-1]
    v = np.full(m.open.shape, along.max() + 1.0)
    v += np.random.default_rng(seed).random(v.shape)
    for c, x in zip(route, along):
        v[c] = x
    assert greedy_trace(v, m, m.source, m.destination, DescendToMin) == route


def test_follow_pointers_root_and_cycle():
    m = corridor(4)
    assert follow_pointers(ParentMap(m, {}, m.destination), m.destination) == [m.destination]
    looped = ParentMap(m, {(0, 0): "E", (0, 1): "E", (0, 2): "W"}, m.destination)
    with pytest.raises(CycleDetected):
        follow_pointers(looped, m.source)
    with pytest.raises(Unreachable):
        follow_pointers(ParentMap(m, {(0, 0): "E"}, m.destination), m.source)
