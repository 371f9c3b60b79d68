"""Shared fixtures and independent reference implementations."""
from collections import deque

import numpy as np
import pytest

from leemaze import Braided, Perfect, generate_maze, parse_maze
from leemaze import neighbors
from leemaze.maze import OFFSETS


def corridor(n: int):
    """Horizontal 1 x n corridor with S at the left end."""
    return parse_maze("S" + "." * (n - 2) + "D")


def reference_bfs(maze, origin):
    """Plain deque BFS, kept separate from the library kernel."""
    h, w = maze.open.shape
    dist = np.full((h, w), -1, dtype=np.int64)
    dist[origin] = 0
    queue = deque([tuple(origin)])
    while queue:
        r, c = queue.popleft()
        for dr, dc in OFFSETS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < h and 0 <= nc < w and maze.open[nr, nc] and dist[nr, nc] < 0:
                dist[nr, nc] = dist[r, c] + 1
                queue.append((nr, nc))
    return dist


def local_bfs_consistent(field) -> bool:
    """Origin 0; every other labeled cell has a neighbor one lower and none more than one apart."""
    m, lab = field.maze, field.labels
    for c in m.channel_cells():
        v = lab[c]
        if v < 0:
            if any(lab[n] >= 0 for n in neighbors(m, c)):
                return False
            continue
        near = [lab[n] for n in neighbors(m, c)]
        if v == 0:
            if c != field.origin:
                return False
        elif v - 1 not in near:
            return False
        if any(abs(x - v) > 1 for x in near):
            return False
    return True


def dense_neumann(maze, v_source=1.0, v_dest=0.0):
    """Graph-Laplacian solve with numpy.linalg on every channel cell connected to S."""
    reach = reference_bfs(maze, maze.source) >= 0
    cells = [tuple(c) for c in zip(*np.nonzero(reach))]
    index = {c: i for i, c in enumerate(cells)}
    n = len(cells)
    a = np.zeros((n, n))
    b = np.zeros(n)
    for c, i in index.items():
        if c == tuple(maze.source) or c == tuple(maze.destination):
            a[i, i] = 1.0
            b[i] = v_source if c == tuple(maze.source) else v_dest
            continue
        for dr, dc in OFFSETS:
            j = index.get((c[0] + dr, c[1] + dc))
            if j is not None:
                a[i, i] += 1.0
                a[i, j] -= 1.0
    sol = np.linalg.solve(a, b)
    out = np.full(maze.open.shape, np.nan)
    for c, i in index.items():
        out[c] = sol[i]
    return out


def suite(kind, sizes, seeds):
    return [generate_maze(s, s, kind, seed) for s in sizes for seed in seeds]


@pytest.fixture(scope="session")
def perfect_21():
    return [generate_maze(21, 21, Perfect(), s) for s in range(100)]


@pytest.fixture(scope="session")
def braided_21():
    return [generate_maze(21, 21, Braided(), s) for s in range(100)]


OPEN_3X3 = parse_maze("S..\n...\n..D\n")
# two branches from S to D: upper 4 edges, lower 6 edges
LOOP = parse_maze("S...\n.##D\n....\n")
# junction at (2,2) with a two-cell stub running south
STUB = parse_maze("#####\n#####\n#S.D#\n##.##\n##.##\n")


# one line per acceptance criterion, printed after the test session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
