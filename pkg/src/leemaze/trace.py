"""Shared path tracers: strict greedy descent/ascent and pointer following.

Every engine extracts its path through one of these two kernels so that the
N, E, S, W tie-break is identical everywhere.
"""
from __future__ import annotations

import enum
import math

import numpy as np

from . import _kernels
from .errors import CycleDetected, LocalExtremum, StepBudgetExceeded, Unreachable
from .maze import Coord, Maze


class TraceMode(enum.Enum):
    AscendToMax = "ascend"
    DescendToMin = "descend"


AscendToMax = TraceMode.AscendToMax
DescendToMin = TraceMode.DescendToMin


def _as_values(field) -> np.ndarray:
    values = getattr(field, "values", field)
    return np.asarray(values, dtype=float)


def greedy_trace(field, maze: Maze, start, goal, mode: TraceMode = DescendToMin, max_steps=None) -> list[Coord]:
    """Walk from ``start`` to ``goal`` always taking the extremal strictly improving neighbor.

    ``field`` is a 2-D array or anything with a ``values`` array; NaN marks
    cells without a value.  Ties go to the first neighbor in N, E, S, W order.
    """
    values = _as_values(field)
    for name, c in (("start", start), ("goal", goal)):
        if not maze.is_channel(c) or math.isnan(values[c[0], c[1]]):
            raise Unreachable(f"{name} {tuple(c)} has no field value")
    if max_steps is None:
        max_steps = maze.n_channels
    flat, n, status = _kernels.greedy_path(
        values, maze.open, start[0], start[1], goal[0], goal[1], mode is DescendToMin, max_steps
    )
    path = _coords(flat[:n], maze.width)
    if status == _kernels.LOCAL_EXTREMUM:
        raise LocalExtremum(f"no strictly improving neighbor at {tuple(path[-1])}", partial=path)
    if status == _kernels.BUDGET:
        raise StepBudgetExceeded(f"no arrival within {max_steps} steps", partial=path)
    return path


def _coords(flat_path, w) -> list[Coord]:
    return [Coord(*divmod(int(i), w)) for i in flat_path]


def follow_pointers(structure, start) -> list[Coord]:
    """Follow stored incoming directions from ``start`` back to the root.

    ``structure`` is a ParentMap or an ArrivalField (anything with
    ``parent(c)``, ``maze`` and ``root``).
    """
    maze = structure.maze
    root = Coord(*structure.root)
    cur = Coord(*start)
    if not maze.is_channel(cur):
        raise Unreachable(f"{tuple(cur)} is not a channel cell")
    path = [cur]
    budget = maze.n_channels
    while cur != root:
        nxt = structure.parent(cur)
        if nxt is None:
            raise Unreachable(f"{tuple(cur)} carries no pointer")
        if len(path) > budget:
            raise CycleDetected(f"pointer chain from {tuple(start)} exceeds {budget} cells")
        path.append(nxt)
        cur = nxt
    return path
