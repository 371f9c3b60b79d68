"""Reference Lee algorithm: wave labeling, label descent, spanning tree.

Also hosts the exhaustive simple-path enumerator used as an independent
oracle in tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import _kernels
from .errors import TooLarge, Unreachable, WallQuery
from .maze import DIRECTIONS, OFFSETS, Coord, Maze
from .trace import DescendToMin, greedy_trace

UNLABELED = -1


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Breadth-first labels from ``origin``; walls and unreachable cells are unlabeled."""

    maze: Maze
    labels: np.ndarray
    origin: Coord

    def __post_init__(self):
        self.labels.setflags(write=False)

    def label(self, c) -> Optional[int]:
        v = int(self.labels[c[0], c[1]])
        return None if v == UNLABELED else v

    @cached_property
    def reached(self) -> np.ndarray:
        return self.labels != UNLABELED

    @cached_property
    def values(self) -> np.ndarray:
        """Float view with NaN on unlabeled cells, for the shared tracers."""
        out = self.labels.astype(float)
        out[~self.reached] = np.nan
        out.setflags(write=False)
        return out

    def dump(self) -> str:
        return dump_grid(
            self.labels, self.reached, f"field {self.maze.width} {self.maze.height} origin {self.origin.row} {self.origin.col}"
        )


@dataclass(frozen=True, eq=False)
class ParentMap:
    """Incoming direction per cell: the direction of the neighbor one step closer to ``root``."""

    maze: Maze
    pointers: dict
    root: Coord

    def parent(self, c) -> Optional[Coord]:
        d = self.pointers.get(Coord(*c))
        if d is None:
            return None
        dr, dc = OFFSETS[DIRECTIONS.index(d)]
        return Coord(c[0] + dr, c[1] + dc)


def dump_grid(values: np.ndarray, defined: np.ndarray, header: str, fmt=str) -> str:
    lines = [header]
    for r in range(values.shape[0]):
        lines.append(" ".join(fmt(values[r, c].item()) if defined[r, c] else "-" for c in range(values.shape[1])))
    return "\n".join(lines) + "\n"


def bfs_labels(maze: Maze, origin) -> np.ndarray:
    """Breadth-first labels as an int array, -1 on unreached cells."""
    return _kernels.bfs_labels(maze.open, int(origin[0]), int(origin[1]))


def lee_label(maze: Maze, origin=None) -> DistanceField:
    """Label every channel cell with its corridor distance from ``origin`` (default: destination)."""
    origin = Coord(*(maze.destination if origin is None else origin))
    if not maze.is_channel(origin):
        raise WallQuery(f"origin {tuple(origin)} is not a channel cell")
    return DistanceField(maze, bfs_labels(maze, origin), origin)


def lee_trace(field: DistanceField, source=None) -> list[Coord]:
    """Descend labels from ``source`` to the field origin, lowest label first, ties N,E,S,W."""
    source = Coord(*(field.maze.source if source is None else source))
    if not field.maze.in_bounds(source) or field.label(source) is None:
        raise Unreachable(f"{tuple(source)} carries no label")
    return greedy_trace(field, field.maze, source, field.origin, DescendToMin)


def spanning_tree(field: DistanceField) -> ParentMap:
    """Shortest-path tree: each labeled cell points at its first N,E,S,W neighbor labeled one less."""
    maze, labels = field.maze, field.labels
    pointers = {}
    for r, c in zip(*np.nonzero(field.reached)):
        lab = labels[r, c]
        if lab == 0:
            continue
        for d, (dr, dc) in zip(DIRECTIONS, OFFSETS):
            n = (r + dr, c + dc)
            if maze.is_channel(n) and labels[n] == lab - 1:
                pointers[Coord(int(r), int(c))] = d
                break
    return ParentMap(maze, pointers, field.origin)


def enumerate_simple_paths(maze: Maze, cap: int = 81, start=None, goal=None) -> list[list[Coord]]:
    """Every simple path from ``start`` to ``goal`` (default S to D) by depth-first search.

    Refuses mazes with more than ``cap`` channel cells.
    """
    if maze.n_channels > cap:
        raise TooLarge(f"{maze.n_channels} channel cells exceeds enumeration cap {cap}")
    start = Coord(*(maze.source if start is None else start))
    goal = Coord(*(maze.destination if goal is None else goal))
    for c in (start, goal):
        if not maze.is_channel(c):
            raise WallQuery(f"{tuple(c)} is not a channel cell")
    adj = {c: [] for c in maze.channel_cells()}
    for c in adj:
        for dr, dc in OFFSETS:
            n = Coord(c.row + dr, c.col + dc)
            if n in adj:
                adj[c].append(n)

    paths = []
    path = [start]
    on_path = {start}

    def walk(c):
        if c == goal:
            paths.append(list(path))
            return
        for n in adj[c]:
            if n not in on_path:
                on_path.add(n)
                path.append(n)
                walk(n)
                path.pop()
                on_path.discard(n)

    walk(start)
    return paths
