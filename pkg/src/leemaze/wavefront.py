"""Temporal-gradient engines: delay-weighted wavefronts, excitable media, pointer fields.

A wave started at one site reaches every other site first along a fastest
route.  Recording, per cell, the time of first arrival and the direction it
came from is enough to read the route back out.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import NotQuiescent, Unreachable, WallQuery
from .maze import DIRECTIONS, OFFSETS, Coord, Maze
from .oracle import dump_grid
from .trace import DescendToMin, follow_pointers, greedy_trace

NOT_REACHED = -1
NO_POINTER = -1


@dataclass(frozen=True, eq=False)
class DelayMap:
    """Integer delay per channel cell, paid when a signal enters the cell."""

    maze: Maze
    delays: np.ndarray

    def __post_init__(self):
        d = np.array(self.delays, dtype=np.int64, copy=True)
        if d.shape != self.maze.open.shape:
            raise ValueError("delay grid does not match maze shape")
        if np.any(d[self.maze.open] < 1):
            raise ValueError("delays must be >= 1 on channel cells")
        d[~self.maze.open] = 0
        d.setflags(write=False)
        object.__setattr__(self, "delays", d)

    @classmethod
    def uniform(cls, maze: Maze) -> "DelayMap":
        return cls(maze, maze.open.astype(np.int64))

    @classmethod
    def random(cls, maze: Maze, lo: int = 1, hi: int = 9, seed: int = 0) -> "DelayMap":
        rng = np.random.default_rng(seed)
        return cls(maze, rng.integers(lo, hi + 1, size=maze.open.shape))

    def __getitem__(self, c) -> int:
        return int(self.delays[c[0], c[1]])

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.delays[self.maze.open] == 1))


@dataclass(frozen=True, eq=False)
class ArrivalField:
    """First-arrival time and incoming direction per cell.

    ``pointers`` holds an index into N, E, S, W naming the neighbor the
    signal came from, or -1.
    """

    maze: Maze
    arrival: np.ndarray
    pointers: np.ndarray
    origin: Coord

    def __post_init__(self):
        self.arrival.setflags(write=False)
        self.pointers.setflags(write=False)

    @property
    def root(self) -> Coord:
        return self.origin

    def time(self, c) -> Optional[int]:
        v = int(self.arrival[c[0], c[1]])
        return None if v == NOT_REACHED else v

    def pointer(self, c) -> Optional[str]:
        k = int(self.pointers[c[0], c[1]])
        return None if k == NO_POINTER else DIRECTIONS[k]

    def parent(self, c) -> Optional[Coord]:
        k = int(self.pointers[c[0], c[1]])
        if k == NO_POINTER:
            return None
        dr, dc = OFFSETS[k]
        return Coord(c[0] + dr, c[1] + dc)

    @cached_property
    def reached(self) -> np.ndarray:
        return self.arrival != NOT_REACHED

    @cached_property
    def values(self) -> np.ndarray:
        out = self.arrival.astype(float)
        out[~self.reached] = np.nan
        out.setflags(write=False)
        return out

    def dump(self) -> str:
        m = self.maze
        return dump_grid(self.arrival, self.reached, f"field {m.width} {m.height} origin {self.origin.row} {self.origin.col}")

    def dump_pointers(self) -> str:
        m = self.maze
        lines = [f"pointers {m.width} {m.height} origin {self.origin.row} {self.origin.col}"]
        for r in range(m.height):
            row = []
            for c in range(m.width):
                if (r, c) == self.origin:
                    row.append("o")
                else:
                    k = int(self.pointers[r, c])
                    row.append("-" if k == NO_POINTER else DIRECTIONS[k])
            lines.append("".join(row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CaParams:
    refractory: int = 3
    threshold: int = 1

    def __post_init__(self):
        if self.refractory < 1 or self.threshold < 1:
            raise ValueError("refractory and threshold must be >= 1")


def _origin(maze: Maze, origin) -> Coord:
    origin = Coord(*(maze.destination if origin is None else origin))
    if not maze.is_channel(origin):
        raise WallQuery(f"origin {tuple(origin)} is not a channel cell")
    return origin


def weighted_wavefront(maze: Maze, delays: DelayMap | None = None, origin=None) -> ArrivalField:
    """Discrete-event wave from ``origin`` (default: destination).

    A cell first reached at time t keeps the direction of that signal and
    passes it on; a neighbor n hears it at t + delay(n).  Later signals are
    ignored.  Simultaneous signals go to the earliest N, E, S, W direction.
    """
    origin = _origin(maze, origin)
    if delays is None:
        delays = DelayMap.uniform(maze)
    d = delays.delays
    h, w = maze.open.shape
    arrival = np.full((h, w), NOT_REACHED, dtype=np.int64)
    pointers = np.full((h, w), NO_POINTER, dtype=np.int8)
    # events: (time, row, col, direction back to the sender)
    events = [(0, origin.row, origin.col, NO_POINTER)]
    while events:
        t, r, c, k = heapq.heappop(events)
        if arrival[r, c] != NOT_REACHED:
            continue
        arrival[r, c] = t
        pointers[r, c] = k
        for back, (dr, dc) in enumerate(OFFSETS):
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and maze.open[nr, nc] and arrival[nr, nc] == NOT_REACHED:
                # the neighbor sees the signal coming from the opposite side
                heapq.heappush(events, (t + int(d[nr, nc]), nr, nc, (back + 2) % 4))
    return ArrivalField(maze, arrival, pointers, origin)


def excitable_ca(
    maze: Maze, origin=None, params: CaParams = CaParams(), max_steps: int | None = None
) -> ArrivalField:
    """Three-state excitable medium on the channels, excited at ``origin`` at step 0.

    Resting cells fire when at least ``threshold`` neighbors are excited,
    stay excited for one step, then rest for ``refractory`` steps.  Records
    the step of first excitation and the first excited neighbor (N, E, S, W).
    """
    return _run_ca(maze, origin, params, max_steps)


def ca_frames(maze: Maze, origin=None, params: CaParams = CaParams(), max_steps: int | None = None) -> list[str]:
    """ASCII snapshot per step: ``*`` excited, ``r`` refractory, ``.`` resting, ``#`` wall."""
    frames: list[str] = []
    _run_ca(maze, origin, params, max_steps, frames)
    return frames


def _frame(maze: Maze, state: np.ndarray) -> str:
    glyph = np.full(state.shape, ".", dtype="<U1")
    glyph[state == 1] = "*"
    glyph[state >= 2] = "r"
    glyph[~maze.open] = "#"
    return "".join("".join(row) + "\n" for row in glyph)


def _run_ca(maze, origin, params: CaParams, max_steps, frames=None) -> ArrivalField:
    origin = _origin(maze, origin)
    if max_steps is None:
        max_steps = maze.n_channels + params.refractory + 1
    h, w = maze.open.shape
    # 0 resting, 1 excited, 2.. refractory countdown (2 + remaining - 1)
    state = np.zeros((h, w), dtype=np.int64)
    arrival = np.full((h, w), NOT_REACHED, dtype=np.int64)
    pointers = np.full((h, w), NO_POINTER, dtype=np.int8)
    state[origin] = 1
    arrival[origin] = 0
    step = 0
    if frames is not None:
        frames.append(_frame(maze, state))
    while np.any(state == 1):
        if step >= max_steps:
            raise NotQuiescent(
                f"excitation still active after {max_steps} steps",
                field=ArrivalField(maze, arrival, pointers, origin),
            )
        excited = np.zeros((h + 2, w + 2), dtype=bool)
        excited[1:-1, 1:-1] = state == 1
        count = np.zeros((h, w), dtype=np.int64)
        first = np.full((h, w), NO_POINTER, dtype=np.int8)
        for k in range(3, -1, -1):
            dr, dc = OFFSETS[k]
            nb = excited[1 + dr : h + 1 + dr, 1 + dc : w + 1 + dc]
            count += nb
            first[nb] = k  # descending k, so N wins ties
        fire = maze.open & (state == 0) & (count >= params.threshold)
        new = np.where(state == 1, 1 + params.refractory, np.where(state >= 2, state - 1, 0))
        new[new == 1] = 0  # refractory countdown finished
        new[fire] = 1
        fresh = fire & (arrival == NOT_REACHED)
        step += 1
        arrival[fresh] = step
        pointers[fresh] = first[fresh]
        state = new
        if frames is not None:
            frames.append(_frame(maze, state))
    return ArrivalField(maze, arrival, pointers, origin)


def isochrones(field: ArrivalField, interval: int = 1) -> list[frozenset]:
    """Cells grouped by arrival band ``[k*interval, (k+1)*interval)``; empty bands kept."""
    if interval < 1:
        raise ValueError("interval must be >= 1")
    reached = field.reached
    if not reached.any():
        return []
    top = int(field.arrival[reached].max())
    bands: list[set] = [set() for _ in range(top // interval + 1)]
    for r, c in zip(*np.nonzero(reached)):
        bands[int(field.arrival[r, c]) // interval].add(Coord(int(r), int(c)))
    return [frozenset(b) for b in bands]


def isochrone_intersection_path(
    maze: Maze, from_source: ArrivalField, from_dest: ArrivalField
) -> tuple[frozenset, list[Coord]]:
    """Cells where the two waves' isochrones meet on the minimal total, plus a route through them.

    The geodesic set holds every cell c with
    arrival_src(c) + arrival_dst(c) == arrival_src(destination).
    """
    total = from_source.time(maze.destination)
    if total is None or from_dest.time(maze.source) is None:
        raise Unreachable("the waves do not reach the opposite terminal")
    both = from_source.reached & from_dest.reached
    on = both & (from_source.arrival + from_dest.arrival == total)
    geodesic = frozenset(Coord(int(r), int(c)) for r, c in zip(*np.nonzero(on)))
    sub = Maze(on, maze.source, maze.destination)
    guide = np.where(on, from_dest.values, np.nan)
    path = greedy_trace(guide, sub, maze.source, maze.destination, DescendToMin)
    return geodesic, path


def pointer_trace(field: ArrivalField, start=None) -> list[Coord]:
    """Read a route out of the pointer field: from ``start`` back to the wave origin."""
    start = Coord(*(field.maze.source if start is None else start))
    if not field.maze.in_bounds(start) or field.time(start) is None:
        raise Unreachable(f"{tuple(start)} was never reached by the wave")
    return follow_pointers(field, start)
