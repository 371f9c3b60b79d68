"""Maze model: parsing, generation and adjacency queries.

A maze is a rectangular grid of wall and channel cells with one source and
one destination.  Every engine works on the 4-neighborhood and visits
neighbors in the fixed order North, East, South, West; that order is the
global tie-break.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np
from scipy import ndimage

from .errors import InvalidDimensions, MalformedInput, WallQuery

WALL = "#"
CHANNEL = "."
SOURCE = "S"
DESTINATION = "D"

# N, E, S, W
DIRECTIONS = ("N", "E", "S", "W")
OFFSETS = ((-1, 0), (0, 1), (1, 0), (0, -1))
OPPOSITE = {"N": "S", "E": "W", "S": "N", "W": "E"}


class Coord(NamedTuple):
    row: int
    col: int


@dataclass(frozen=True)
class Perfect:
    """Spanning-tree maze: exactly one simple path between any two cells."""


@dataclass(frozen=True)
class Braided:
    """Perfect maze with a fraction of its dead ends knocked through."""

    loop_fraction: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.loop_fraction <= 1.0:
            raise InvalidDimensions(f"loop_fraction must lie in [0, 1], got {self.loop_fraction}")


MazeKind = Union[Perfect, Braided]


def parse_kind(text: str) -> MazeKind:
    """``perfect``, ``braided`` or ``braided:<fraction>``."""
    name, _, arg = text.strip().lower().partition(":")
    if name == "perfect" and not arg:
        return Perfect()
    if name == "braided":
        try:
            return Braided(float(arg)) if arg else Braided()
        except ValueError as exc:
            raise InvalidDimensions(f"bad loop fraction in {text!r}") from exc
    raise InvalidDimensions(f"unknown maze kind {text!r}")


@dataclass(frozen=True, eq=False)
class Maze:
    """Immutable grid; ``open[r, c]`` is True for channel cells."""

    open: np.ndarray
    source: Coord
    destination: Coord

    def __post_init__(self):
        grid = np.array(self.open, dtype=bool, copy=True)
        if grid.ndim != 2 or grid.size == 0:
            raise MalformedInput("maze grid must be a non-empty 2-D array")
        grid.setflags(write=False)
        object.__setattr__(self, "open", grid)
        object.__setattr__(self, "source", Coord(*map(int, self.source)))
        object.__setattr__(self, "destination", Coord(*map(int, self.destination)))
        for name in ("source", "destination"):
            c = getattr(self, name)
            if not self.is_channel(c):
                raise MalformedInput(f"{name} {tuple(c)} is not a channel cell")

    @property
    def height(self) -> int:
        return self.open.shape[0]

    @property
    def width(self) -> int:
        return self.open.shape[1]

    def in_bounds(self, c) -> bool:
        return 0 <= c[0] < self.height and 0 <= c[1] < self.width

    def is_channel(self, c) -> bool:
        return self.in_bounds(c) and bool(self.open[c[0], c[1]])

    def channel_cells(self) -> list[Coord]:
        """Channel cells in row-major order."""
        return [Coord(int(r), int(c)) for r, c in zip(*np.nonzero(self.open))]

    @cached_property
    def n_channels(self) -> int:
        return int(self.open.sum())

    @cached_property
    def neighbor_table(self) -> np.ndarray:
        """``(height*width, 4)`` flat indices of channel neighbors in N,E,S,W order, -1 if none."""
        h, w = self.open.shape
        padded = np.zeros((h + 2, w + 2), dtype=bool)
        padded[1:-1, 1:-1] = self.open
        idx = np.arange(h * w).reshape(h, w)
        table = np.full((h * w, 4), -1, dtype=np.int64)
        for k, (dr, dc) in enumerate(OFFSETS):
            ok = padded[1 + dr : h + 1 + dr, 1 + dc : w + 1 + dc] & self.open
            shifted = idx + dr * w + dc
            table[:, k] = np.where(ok, shifted, -1).ravel()
        table.setflags(write=False)
        return table

    def to_text(self) -> str:
        rows = []
        for r in range(self.height):
            row = [CHANNEL if v else WALL for v in self.open[r]]
            if r == self.source.row:
                row[self.source.col] = SOURCE
            if r == self.destination.row:
                row[self.destination.col] = DESTINATION
            rows.append("".join(row) + "\n")
        return "".join(rows)

    def __eq__(self, other):
        if not isinstance(other, Maze):
            return NotImplemented
        return (
            self.source == other.source
            and self.destination == other.destination
            and np.array_equal(self.open, other.open)
        )

    def __hash__(self):
        return hash((self.source, self.destination, self.open.tobytes(), self.open.shape))

    def __repr__(self):
        return f"Maze({self.width}x{self.height}, source={tuple(self.source)}, destination={tuple(self.destination)})"


def parse_maze(text: str) -> Maze:
    """Parse the ASCII maze format (``#`` wall, ``.`` channel, ``S``/``D`` endpoints)."""
    lines = [line.rstrip() for line in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise MalformedInput("empty maze")
    width = len(lines[0])
    grid = np.zeros((len(lines), width), dtype=bool)
    source = destination = None
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MalformedInput(f"ragged rows: row {r} has {len(line)} cells, expected {width}")
        for c, ch in enumerate(line):
            if ch == WALL:
                continue
            if ch not in (CHANNEL, SOURCE, DESTINATION):
                raise MalformedInput(f"illegal character {ch!r} at row {r}, col {c}")
            grid[r, c] = True
            if ch == SOURCE:
                if source is not None:
                    raise MalformedInput("more than one source 'S'")
                source = Coord(r, c)
            elif ch == DESTINATION:
                if destination is not None:
                    raise MalformedInput("more than one destination 'D'")
                destination = Coord(r, c)
    if source is None:
        raise MalformedInput("missing source 'S'")
    if destination is None:
        raise MalformedInput("missing destination 'D'")
    return Maze(grid, source, destination)


def neighbors(maze: Maze, c) -> list[Coord]:
    """Channel cells adjacent to ``c`` in N, E, S, W order."""
    if not maze.is_channel(c):
        raise WallQuery(f"{tuple(c)} is not a channel cell")
    r, col = c
    out = []
    for dr, dc in OFFSETS:
        n = (r + dr, col + dc)
        if maze.is_channel(n):
            out.append(Coord(*n))
    return out


def is_connected(maze: Maze) -> bool:
    labels, _ = ndimage.label(maze.open)
    return labels[maze.source] == labels[maze.destination]


def generate_maze(width: int, height: int, kind: MazeKind = Perfect(), seed: int = 0) -> Maze:
    """Recursive-backtracker maze on an odd lattice, optionally braided.

    Rooms sit at odd (row, col); even rows and columns hold walls.  The
    source is an opening in the top wall above room (1, 1) and the
    destination an opening in the bottom wall below room (h-2, w-2).
    """
    for name, v in (("width", width), ("height", height)):
        if int(v) != v or v < 3 or v % 2 == 0:
            raise InvalidDimensions(f"{name} must be an odd integer >= 3, got {v}")
    if not isinstance(kind, (Perfect, Braided)):
        raise InvalidDimensions(f"unknown maze kind {kind!r}")
    rng = random.Random(seed)
    grid = np.zeros((height, width), dtype=bool)
    rows, cols = (height - 1) // 2, (width - 1) // 2

    visited = np.zeros((rows, cols), dtype=bool)
    visited[0, 0] = True
    grid[1, 1] = True
    stack = [(0, 0)]
    while stack:
        i, j = stack[-1]
        options = [
            (di, dj)
            for di, dj in OFFSETS
            if 0 <= i + di < rows and 0 <= j + dj < cols and not visited[i + di, j + dj]
        ]
        if not options:
            stack.pop()
            continue
        di, dj = rng.choice(options)
        ni, nj = i + di, j + dj
        visited[ni, nj] = True
        grid[2 * i + 1 + di, 2 * j + 1 + dj] = True
        grid[2 * ni + 1, 2 * nj + 1] = True
        stack.append((ni, nj))

    source = Coord(0, 1)
    destination = Coord(height - 1, width - 2)
    grid[source] = True
    grid[destination] = True

    if isinstance(kind, Braided) and kind.loop_fraction > 0:
        _braid(grid, kind.loop_fraction, rng)
    return Maze(grid, source, destination)


def _open_degree(grid: np.ndarray, r: int, c: int) -> int:
    h, w = grid.shape
    return sum(
        1 for dr, dc in OFFSETS if 0 <= r + dr < h and 0 <= c + dc < w and grid[r + dr, c + dc]
    )


def _braid(grid: np.ndarray, fraction: float, rng: random.Random) -> None:
    h, w = grid.shape
    dead_ends = [
        (r, c) for r in range(1, h - 1, 2) for c in range(1, w - 1, 2) if _open_degree(grid, r, c) == 1
    ]
    rng.shuffle(dead_ends)
    for r, c in dead_ends[: int(fraction * len(dead_ends) + 0.5)]:
        if _open_degree(grid, r, c) != 1:
            continue  # already opened by an earlier knock-through
        walls = [
            (dr, dc)
            for dr, dc in OFFSETS
            if 1 <= r + 2 * dr < h - 1 and 1 <= c + 2 * dc < w - 1 and not grid[r + dr, c + dc]
        ]
        if walls:
            dr, dc = rng.choice(walls)
            grid[r + dr, c + dc] = True
