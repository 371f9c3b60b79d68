"""Chemical and thermal gradient engines.

A substance released at the destination spreads along the channels and
slowly decays, so at steady state its concentration falls off strictly with
corridor distance.  Droplets, slime mould, epithelial cells and dye streaks
all climb this gradient; a temperature field anchored at a cold spot is the
same field with the flow directed toward the anchor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .errors import StepBudgetExceeded, WallQuery
from .fields import ScalarField, SolveDiagnostics
from .maze import OFFSETS, Coord, Maze
from .trace import AscendToMax, greedy_trace

DEFAULT_DECAY = 0.05
# relative per-step change below which the field counts as settled
FIXED_POINT_RTOL = 1e-12


@dataclass(frozen=True)
class DiffusionParams:
    decay: float = DEFAULT_DECAY
    steps: int = 100_000
    clamp: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.decay < 1.0:
            raise ValueError(f"decay must lie in [0, 1), got {self.decay}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


@dataclass(frozen=True)
class DeterministicGreedy:
    pass


@dataclass(frozen=True)
class SoftmaxStochastic:
    temperature: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")


AgentPolicy = Union[DeterministicGreedy, SoftmaxStochastic]


def diffuse(maze: Maze, anchor=None, params: DiffusionParams = DiffusionParams()) -> ScalarField:
    """Run the explicit decaying-diffusion scheme from a clamped ``anchor`` (default: destination).

    Each step sets c <- (1 - decay) * (c + sum(n - c) / 4) over channel
    neighbors, then resets the anchor to ``params.clamp``.  Stops after
    ``params.steps`` steps or once every cell reachable from the anchor is
    positive and changed by at most 1e-12 of its value.
    """
    anchor = Coord(*(maze.destination if anchor is None else anchor))
    if not maze.is_channel(anchor):
        raise WallQuery(f"anchor {tuple(anchor)} is not a channel cell")
    reach = _kernels.bfs_labels(maze.open, *anchor) >= 0
    start = np.zeros(maze.open.shape)
    start[anchor] = params.clamp
    values, steps, change = _kernels.diffuse(
        maze.open, reach, start, anchor.row, anchor.col, params.decay, params.clamp, True, params.steps, FIXED_POINT_RTOL
    )
    settled = change <= FIXED_POINT_RTOL and bool(np.all(values[reach] > 0))
    diag = SolveDiagnostics(int(steps), float(change), settled)
    return ScalarField(maze, values, "concentration", anchor=anchor, diagnostics=diag)


def diffusion_step(values: np.ndarray, maze: Maze, decay: float = 0.0) -> np.ndarray:
    """One unclamped step of the scheme; walls are left at 0."""
    v = np.where(maze.open, np.nan_to_num(np.asarray(values, dtype=float)), 0.0)
    out, _, _ = _kernels.diffuse(maze.open, maze.open, v, 0, 0, decay, 0.0, False, 1, -1.0)
    return out


def chemotactic_trace(
    field: ScalarField, maze: Maze, start=None, policy: AgentPolicy = DeterministicGreedy(), max_steps=None
) -> list[Coord]:
    """Walk an agent up the concentration gradient until it reaches the anchor.

    The greedy agent moves to the highest neighbor that beats its current
    cell (ties N, E, S, W).  The stochastic agent senses log-concentration:
    it picks a neighbor with probability proportional to
    ``value ** (1 / temperature)`` and avoids stepping straight back unless
    it is in a dead end.
    """
    start = Coord(*(maze.source if start is None else start))
    goal = field.anchor if field.anchor is not None else maze.destination
    if isinstance(policy, DeterministicGreedy):
        return greedy_trace(field, maze, start, goal, AscendToMax, max_steps)
    return _stochastic_walk(field, maze, start, Coord(*goal), policy, max_steps)


def _stochastic_walk(field, maze, start, goal, policy: SoftmaxStochastic, max_steps) -> list[Coord]:
    if not maze.is_channel(start):
        raise WallQuery(f"{tuple(start)} is not a channel cell")
    if max_steps is None:
        max_steps = 10 * maze.n_channels
    rng = np.random.default_rng(policy.seed)
    values = field.values
    path = [start]
    prev = None
    cur = start
    while cur != goal:
        if len(path) > max_steps:
            raise StepBudgetExceeded(f"agent did not reach the anchor in {max_steps} steps", partial=path)
        options = [
            Coord(cur.row + dr, cur.col + dc)
            for dr, dc in OFFSETS
            if maze.is_channel((cur.row + dr, cur.col + dc))
        ]
        if len(options) > 1 and prev in options:
            options.remove(prev)
        with np.errstate(divide="ignore"):
            logits = np.log(np.array([values[c] for c in options])) / policy.temperature
        if np.all(np.isneginf(logits)) or np.any(np.isnan(logits)):
            weights = np.ones(len(options))
        else:
            weights = np.exp(logits - logits.max())
        pick = int(rng.choice(len(options), p=weights / weights.sum()))
        prev, cur = cur, options[pick]
        path.append(cur)
    return path


def dye_advect(field: ScalarField, maze: Maze, start=None) -> frozenset[Coord]:
    """Cells stained by a dye streak released at ``start``: the greedy climb, as a set."""
    return frozenset(chemotactic_trace(field, maze, start, DeterministicGreedy()))
