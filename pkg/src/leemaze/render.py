"""Deterministic text, grayscale and vector renders of mazes, paths and fields."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DegenerateRange, MalformedInput, PathOutsideMaze
from .maze import Coord, Maze

PATH_GLYPH = "*"


class Target(enum.Enum):
    AsciiOverlay = "ascii"
    GrayscaleImage = "pgm"
    Vector = "svg"


@dataclass(frozen=True)
class RenderSpec:
    """``normalize`` is ``"minmax"`` or a ``(lo, hi)`` pair of fixed bounds."""

    target: Target = Target.GrayscaleImage
    scale: int = 1
    normalize: Union[str, tuple] = "minmax"

    def __post_init__(self):
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValueError("scale must be a positive integer")
        if self.normalize != "minmax":
            lo, hi = self.normalize
            if not lo < hi:
                raise ValueError("fixed normalization needs lo < hi")


def _check_path(maze: Maze, path: Sequence) -> None:
    for c in path:
        if not maze.is_channel(c):
            raise PathOutsideMaze(f"path cell {tuple(c)} is not a channel cell")


def render_ascii(maze: Maze, path: Optional[Sequence] = None) -> str:
    """Maze text with ``*`` on path cells; the S and D glyphs stay in place."""
    if not path:
        return maze.to_text()
    _check_path(maze, path)
    rows = [list(line) for line in maze.to_text().splitlines()]
    for r, c in path:
        if (r, c) != maze.source and (r, c) != maze.destination:
            rows[r][c] = PATH_GLYPH
    return "".join("".join(row) + "\n" for row in rows)


def _values(field) -> np.ndarray:
    return np.asarray(getattr(field, "values", field), dtype=float)


def gray_levels(field, maze: Maze, normalize="minmax") -> np.ndarray:
    """Per-cell gray in 0..255: walls and valueless cells 0, values mapped onto 1..255."""
    v = _values(field)
    live = maze.open & ~np.isnan(v)
    if normalize == "minmax":
        if not live.any():
            raise DegenerateRange("field has no values to normalize")
        lo, hi = float(v[live].min()), float(v[live].max())
        if not lo < hi:
            raise DegenerateRange("constant field; use fixed normalization bounds")
    else:
        lo, hi = map(float, normalize)
    scaled = np.clip((np.where(live, v, lo) - lo) / (hi - lo), 0.0, 1.0)
    gray = 1 + np.floor(scaled * 254 + 0.5).astype(np.int64)
    return np.where(live, gray, 0)


def render_field_image(field, maze: Maze, spec: RenderSpec = RenderSpec()) -> bytes:
    """Plain portable graymap (P2, maxval 255), each cell a ``scale`` x ``scale`` block."""
    if spec.target is not Target.GrayscaleImage:
        raise ValueError("render_field_image needs a GrayscaleImage spec")
    gray = gray_levels(field, maze, spec.normalize)
    img = np.kron(gray, np.ones((spec.scale, spec.scale), dtype=np.int64))
    h, w = img.shape
    out = [f"P2\n{w} {h}\n255\n"]
    for row in img.tolist():
        # netpbm asks for lines of at most 70 characters
        line = ""
        for tok in map(str, row):
            if line and len(line) + 1 + len(tok) > 70:
                out.append(line + "\n")
                line = tok
            else:
                line = f"{line} {tok}" if line else tok
        out.append(line + "\n")
    return "".join(out).encode("ascii")


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a plain P2 graymap back into an array."""
    tokens = []
    for line in data.decode("ascii").splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P2":
        raise MalformedInput("not a plain graymap")
    w, h, maxval = map(int, tokens[1:4])
    pixels = np.array(tokens[4:], dtype=np.int64)
    if pixels.size != w * h or pixels.max(initial=0) > maxval:
        raise MalformedInput("graymap body does not match its header")
    return pixels.reshape(h, w)


def _num(x: float) -> str:
    x = float(x)
    return str(int(x)) if x.is_integer() else repr(x)


def render_vector(
    maze: Maze, path: Optional[Sequence] = None, field=None, scale: int = 10, normalize="minmax"
) -> str:
    """SVG with wall squares, optional gray heat squares, and the path as one polyline."""
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    if path:
        _check_path(maze, path)
    w, h = maze.width * scale, maze.height * scale
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">\n',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>\n',
    ]
    gray = gray_levels(field, maze, normalize) if field is not None else None
    for r in range(maze.height):
        for c in range(maze.width):
            x, y = c * scale, r * scale
            if not maze.open[r, c]:
                parts.append(f'<rect x="{x}" y="{y}" width="{scale}" height="{scale}" fill="#000000"/>\n')
            elif gray is not None and gray[r, c] > 0:
                g = int(gray[r, c])
                parts.append(f'<rect x="{x}" y="{y}" width="{scale}" height="{scale}" fill="rgb({g},{g},{g})"/>\n')
    if path:
        pts = " ".join(f"{_num((c + 0.5) * scale)},{_num((r + 0.5) * scale)}" for r, c in path)
        width = _num(max(1.0, scale / 4))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#d00000" stroke-width="{width}"/>\n')
    parts.append("</svg>\n")
    return "".join(parts)


def dump_path(path: Sequence) -> str:
    lines = [f"path {len(path)}"]
    lines.extend(f"{r} {c}" for r, c in path)
    return "\n".join(lines) + "\n"


def load_path(text: str) -> list[Coord]:
    lines = [line for line in text.splitlines() if line.strip()]
    try:
        tag, n = lines[0].split()
        n = int(n)
        if tag != "path" or len(lines) - 1 != n:
            raise ValueError
        return [Coord(*map(int, line.split())) for line in lines[1:]]
    except (IndexError, ValueError, TypeError) as exc:
        raise MalformedInput("malformed path file") from exc
