"""Per-cell real-valued fields and their text dump format."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import MalformedInput
from .maze import Coord, Maze


@dataclass(frozen=True)
class SolveDiagnostics:
    iterations: int
    final_residual: float
    converged: bool


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real value per channel cell; NaN marks walls and cells without a value.

    ``wall_value`` is set when walls carry a defined value (Dirichlet solves
    hold them at 0).  ``anchor`` is the cell a diffusion field is clamped at.
    """

    maze: Maze
    values: np.ndarray
    kind: str = "potential"
    wall_value: Optional[float] = None
    anchor: Optional[Coord] = None
    diagnostics: Optional[SolveDiagnostics] = field(default=None, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        values[~self.maze.open] = np.nan
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, c) -> float:
        return float(self.values[c[0], c[1]])

    def channel_values(self) -> np.ndarray:
        """Values of all channel cells, row-major."""
        return self.values[self.maze.open]

    def dump(self) -> str:
        return dump_scalar(self.values, self.kind)


def _token(v: float) -> str:
    return "-" if math.isnan(v) else repr(float(v))


def dump_scalar(values: np.ndarray, kind: str) -> str:
    h, w = values.shape
    lines = [f"field {w} {h} kind {kind}"]
    for row in values.tolist():
        lines.append(" ".join(_token(v) for v in row))
    return "\n".join(lines) + "\n"


def load_scalar(text: str) -> tuple[str, np.ndarray]:
    """Inverse of :func:`dump_scalar`; returns ``(kind, values)`` with NaN for ``-``."""
    lines = text.splitlines()
    try:
        tag, w, h, key, kind = lines[0].split()
        w, h = int(w), int(h)
    except (IndexError, ValueError) as exc:
        raise MalformedInput(f"bad field header {lines[:1]!r}") from exc
    if tag != "field" or key != "kind":
        raise MalformedInput(f"bad field header {lines[0]!r}")
    rows = [line.split() for line in lines[1 : 1 + h]]
    if len(rows) != h or any(len(r) != w for r in rows):
        raise MalformedInput("field body does not match header dimensions")
    values = np.array([[math.nan if t == "-" else float(t) for t in r] for r in rows])
    return kind, values
