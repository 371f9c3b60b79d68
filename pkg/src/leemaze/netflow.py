"""Resistance-gradient engines.

The maze is a grid of unit resistors between adjacent channel cells.  A
potential difference between source and destination develops a field whose
streamlines, current magnitudes and flux-reinforced conductivities all
single out the shortest route.

The same linear system describes laminar flow through the channels: read
potential as pressure and unit conductance as the inverse hydraulic
resistance of a unit-length channel segment.  There is no separate fluidic
solver.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from . import _kernels
from ._grid import ChannelGraph, channel_graph
from .errors import AmbiguousPath, DisconnectedHotSet, InvalidEndpoints, NotConverged, Unreachable
from .fields import ScalarField, SolveDiagnostics
from .maze import Coord, Maze, is_connected
from .trace import AscendToMax, DescendToMin, greedy_trace


class BoundaryCondition(enum.Enum):
    DirichletWalls = "dirichlet"
    NeumannWalls = "neumann"


DirichletWalls = BoundaryCondition.DirichletWalls
NeumannWalls = BoundaryCondition.NeumannWalls

# Dirichlet walls sit at 0, so the destination must differ from 0 to stay visible.
DEFAULT_ENDPOINTS = {NeumannWalls: (1.0, 0.0), DirichletWalls: (1.0, -1.0)}
DEFAULT_TOL = 1e-10
METHODS = ("direct", "jacobi", "sor")


def default_max_iter(maze: Maze) -> int:
    return 50 * maze.width * maze.height


@dataclass(frozen=True)
class _System:
    graph: ChannelGraph
    active: np.ndarray  # cells that take part in the solve
    fixed: np.ndarray
    fixed_values: np.ndarray
    weight: np.ndarray  # stencil weight per cell (degree or 4)


def _system(maze: Maze, bc: BoundaryCondition, v_source: float, v_dest: float) -> _System:
    g = channel_graph(maze)
    if bc is NeumannWalls:
        # Insulated pockets cut off from both terminals have no defined potential.
        active = _kernels.bfs_labels(maze.open, *maze.source)[g.rows, g.cols] >= 0
        weight = g.degree.astype(float)
    else:
        active = np.ones(g.n, dtype=bool)
        weight = np.full(g.n, 4.0)
    fixed = np.zeros(g.n, dtype=bool)
    values = np.zeros(g.n)
    s, d = g.of(maze.source), g.of(maze.destination)
    fixed[[s, d]] = True
    values[s], values[d] = v_source, v_dest
    return _System(g, active, fixed, values, weight)


def _stencil_sum(nbr: np.ndarray, v: np.ndarray) -> np.ndarray:
    # missing neighbors index the trailing 0 (a Dirichlet wall or nothing at all)
    return np.append(v, 0.0)[nbr].sum(axis=1)


def _residual(system: _System, v: np.ndarray) -> float:
    free = system.active & ~system.fixed
    if not free.any():
        return 0.0
    mean = _stencil_sum(system.graph.nbr, np.where(system.active, v, 0.0)) / system.weight
    return float(np.max(np.abs(v[free] - mean[free])))


def solve_potential(
    maze: Maze,
    bc: BoundaryCondition = NeumannWalls,
    v_source: float | None = None,
    v_dest: float | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    method: str = "direct",
    omega: float | None = None,
) -> tuple[ScalarField, SolveDiagnostics]:
    """Discrete Laplace potential with the terminals held at fixed values.

    Interior channel cells satisfy value = mean of the stencil, where
    Neumann walls drop out of the stencil and Dirichlet walls count as 0.
    ``method`` picks a sparse direct factorization (default), Jacobi, or
    red-black SOR; all stop once the max-norm residual is at most ``tol``.
    """
    dv_s, dv_d = DEFAULT_ENDPOINTS[bc]
    v_source = dv_s if v_source is None else float(v_source)
    v_dest = dv_d if v_dest is None else float(v_dest)
    if maze.source == maze.destination or v_source == v_dest:
        raise InvalidEndpoints("source and destination must be distinct cells at distinct potentials")
    if not is_connected(maze):
        raise Unreachable("destination is not reachable from source")
    if not tol > 0:
        raise ValueError("tol must be positive")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    if max_iter is None:
        max_iter = default_max_iter(maze)

    system = _system(maze, bc, v_source, v_dest)
    if method == "direct":
        v, iterations = _solve_direct(system, tol)
    else:
        v, iterations = _relax(system, tol, max_iter, method, omega)
    residual = _residual(system, v)
    diag = SolveDiagnostics(iterations, residual, residual <= tol)
    v = np.where(system.active, v, np.nan)
    field = ScalarField(
        maze, system.graph.scatter(v), "potential", wall_value=0.0 if bc is DirichletWalls else None, diagnostics=diag
    )
    if not diag.converged:
        raise NotConverged(
            f"residual {residual:.3e} above tol {tol:.1e} after {iterations} iterations", field=field, diagnostics=diag
        )
    return field, diag


def _system_matrix(system: _System) -> sparse.csr_matrix:
    lap = system.graph.laplacian()
    extra = system.weight - system.graph.degree  # wall contacts under Dirichlet, zero under Neumann
    return (lap + sparse.diags(extra)).tocsr()


def _solve_direct(system: _System, tol: float) -> tuple[np.ndarray, int]:
    a = _system_matrix(system)
    free = np.nonzero(system.active & ~system.fixed)[0]
    fixed = np.nonzero(system.fixed)[0]
    v = system.fixed_values.copy()
    if len(free) == 0:
        return v, 0
    a_ff = a[free][:, free].tocsc()
    rhs = -(a[free][:, fixed] @ system.fixed_values[fixed])
    lu = splinalg.splu(a_ff)
    x = lu.solve(rhs)
    passes = 1
    # a couple of refinement passes pull the residual down to round-off
    for _ in range(2):
        v[free] = x
        if _residual(system, v) <= tol:
            break
        x = x + lu.solve(rhs - a_ff @ x)
        passes += 1
    v[free] = x
    return v, passes


def _relax(system: _System, tol: float, max_iter: int, method: str, omega: float | None) -> tuple[np.ndarray, int]:
    g = system.graph
    free = system.active & ~system.fixed
    v = np.where(system.fixed, system.fixed_values, 0.0)
    if method == "jacobi":
        colors = [free]
        omega = 1.0
    else:
        parity = (g.rows + g.cols) % 2 == 0
        colors = [free & parity, free & ~parity]
        if omega is None:
            # optimal SOR factor for a chain as long as the longest corridor walk
            longest = int(_kernels.bfs_labels(g.maze.open, *g.maze.source).max()) + 1
            omega = 2.0 / (1.0 + math.sin(math.pi / max(longest, 2)))
    it = 0
    while it < max_iter:
        if _residual(system, v) <= tol:
            return v, it
        for mask in colors:
            mean = _stencil_sum(g.nbr, v) / system.weight
            v = np.where(mask, v + omega * (mean - v), v)
        it += 1
    return v, it


def current_field(potential: ScalarField, maze: Maze, bc: BoundaryCondition = NeumannWalls) -> ScalarField:
    """Current magnitude per cell: half the sum of absolute in- and out-flows.

    Flows run through unit resistors to each stencil neighbor (to the wall at
    0 under Dirichlet).  The terminals also count the current fed in or
    drawn out externally, which is the net of their grid flows.
    """
    v = potential.values
    h, w = v.shape
    pad_v = np.full((h + 2, w + 2), np.nan)
    pad_v[1:-1, 1:-1] = v
    pad_open = np.zeros((h + 2, w + 2), dtype=bool)
    pad_open[1:-1, 1:-1] = maze.open
    total_abs = np.zeros((h, w))
    net = np.zeros((h, w))
    for dr, dc in ((-1, 0), (0, 1), (1, 0), (0, -1)):
        nb_open = pad_open[1 + dr : h + 1 + dr, 1 + dc : w + 1 + dc]
        nb_v = pad_v[1 + dr : h + 1 + dr, 1 + dc : w + 1 + dc]
        if bc is DirichletWalls:
            flow = np.where(nb_open, v - nb_v, v)
        else:
            flow = np.where(nb_open, v - nb_v, 0.0)
        total_abs += np.abs(flow)
        net += flow
    mag = (total_abs + np.abs(net)) / 2.0
    mag = np.where(maze.open, mag, np.nan)
    return ScalarField(maze, mag, "current")


def extract_hot_path(currents: ScalarField, maze: Maze, quantile: float = 0.5) -> frozenset[Coord]:
    """Cells whose current magnitude reaches the given quantile of all channel magnitudes.

    Cells that carry no current are never hot.  Raises DisconnectedHotSet
    unless the hot cells connect source to destination.
    """
    if not 0.0 < quantile <= 1.0:
        raise ValueError("quantile must lie in (0, 1]")
    mags = currents.values
    chan = mags[maze.open & ~np.isnan(mags)]
    top = float(chan.max()) if chan.size else 0.0
    # magnitudes equal up to round-off must land on the same side of the threshold
    slack = 1e-9 * top
    threshold = float(np.quantile(chan, quantile)) - slack
    hot = maze.open & (np.nan_to_num(mags, nan=-1.0) >= threshold) & (np.nan_to_num(mags, nan=0.0) > slack)
    if not (hot[maze.source] and hot[maze.destination]):
        raise DisconnectedHotSet(f"terminals are not hot at quantile {quantile}")
    labels = _kernels.bfs_labels(hot, *maze.source)
    if labels[maze.destination] < 0:
        raise DisconnectedHotSet(f"hot set at quantile {quantile} does not connect source to destination")
    return frozenset(Coord(int(r), int(c)) for r, c in zip(*np.nonzero(hot)))


def hot_path(currents: ScalarField, maze: Maze, quantile: float = 0.5) -> list[Coord]:
    """Shortest tie-broken route through the hot set."""
    cells = extract_hot_path(currents, maze, quantile)
    return _route_within(maze, cells)


def _route_within(maze: Maze, cells) -> list[Coord]:
    mask = np.zeros(maze.open.shape, dtype=bool)
    for c in cells:
        mask[c] = True
    labels = _kernels.bfs_labels(mask, *maze.destination).astype(float)
    labels[labels < 0] = np.nan
    sub = Maze(mask, maze.source, maze.destination)
    return greedy_trace(labels, sub, maze.source, maze.destination, DescendToMin)


def trace_streamline(potential: ScalarField, maze: Maze, start=None, goal=None) -> list[Coord]:
    """Follow the steepest potential drop from ``start`` toward the destination.

    Direction (descent or ascent) follows the sign of the terminal
    potentials; plateaus raise LocalExtremum.
    """
    start = Coord(*(maze.source if start is None else start))
    goal = Coord(*(maze.destination if goal is None else goal))
    mode = DescendToMin if potential[goal] < potential[maze.source] else AscendToMax
    return greedy_trace(potential, maze, start, goal, mode)


@dataclass(frozen=True, eq=False)
class EdgeConductivity:
    """Conductivity ``D`` and length ``L`` per undirected channel edge ``(a, b)``, ``a`` before ``b`` row-major."""

    maze: Maze
    edges: tuple
    conductivity: np.ndarray
    length: np.ndarray

    def __post_init__(self):
        self.conductivity.setflags(write=False)

    def value(self, a, b) -> float:
        a, b = sorted((Coord(*a), Coord(*b)))
        return float(self.conductivity[self._lookup[(a, b)]])

    @cached_property
    def _lookup(self) -> dict:
        return {e: i for i, e in enumerate(self.edges)}

    def max(self) -> float:
        return float(self.conductivity.max())

    def dump(self) -> str:
        lines = [f"edges {len(self.edges)} kind conductivity"]
        for (a, b), d in zip(self.edges, self.conductivity.tolist()):
            lines.append(f"{a.row} {a.col} {b.row} {b.col} {d!r}")
        return "\n".join(lines) + "\n"


def _pressures(g: ChannelGraph, active: np.ndarray, cond: np.ndarray, s: int, d: int) -> np.ndarray:
    """Node pressures for unit in-flux at ``s`` and the outlet ``d`` grounded."""
    lap = g.laplacian(cond)
    keep = np.nonzero(active & (np.arange(g.n) != d))[0]
    a = lap[keep][:, keep].tocsc()
    rhs = np.zeros(len(keep))
    rhs[np.searchsorted(keep, s)] = 1.0
    # symmetric diagonal scaling keeps collapsed (tiny-D) edges from wrecking the pivots
    scale = 1.0 / np.sqrt(a.diagonal())
    scaled = sparse.diags(scale) @ a @ sparse.diags(scale)
    y = splinalg.splu(scaled.tocsc()).solve(rhs * scale)
    p = np.zeros(g.n)
    p[keep] = y * scale
    return p


def physarum_solve(
    maze: Maze, steps: int = 2000, dt: float = 0.1, tol: float = 1e-8
) -> tuple[EdgeConductivity, SolveDiagnostics]:
    """Flux-reinforcement dynamics on the channel edges.

    Each iteration solves the pressures for unit flux from source to
    destination with edge conductance D/L, takes the edge fluxes
    Q = D * dp / L, and relaxes D toward |Q| with step ``dt``.  Starts from
    D = 1 everywhere and stops once the largest update is at most ``tol``.
    """
    if not 0 < dt <= 1:
        raise ValueError("dt must lie in (0, 1]")
    if maze.source == maze.destination:
        raise InvalidEndpoints("source and destination must differ")
    if not is_connected(maze):
        raise Unreachable("destination is not reachable from source")
    g = channel_graph(maze)
    active = _kernels.bfs_labels(maze.open, *maze.source)[g.rows, g.cols] >= 0
    s, d = g.of(maze.source), g.of(maze.destination)
    length = np.ones(len(g.edge_a))
    cond = np.ones(len(g.edge_a))
    # edges in pockets cut off from the terminals never carry flux
    on = active[g.edge_a]
    cond[~on] = 0.0
    change = math.inf
    it = 0
    while it < steps:
        p = _pressures(g, active, np.where(on, cond, 0.0) / length, s, d)
        flux = cond * (p[g.edge_a] - p[g.edge_b]) / length
        delta = dt * (np.abs(flux) - cond)
        delta[~on] = 0.0
        cond = np.maximum(cond + delta, _FLOOR)
        cond[~on] = 0.0
        it += 1
        change = float(np.max(np.abs(delta))) if len(delta) else 0.0
        if change <= tol:
            break
    edges = tuple(
        (Coord(int(g.rows[a]), int(g.cols[a])), Coord(int(g.rows[b]), int(g.cols[b])))
        for a, b in zip(g.edge_a, g.edge_b)
    )
    result = EdgeConductivity(maze, edges, cond, length)
    diag = SolveDiagnostics(it, change, change <= tol)
    if not diag.converged:
        raise NotConverged(f"largest conductivity update {change:.3e} above tol after {it} steps", field=result, diagnostics=diag)
    return result, diag


# keeps the pressure system nonsingular once dead-end tubes have collapsed
_FLOOR = 1e-250


def edge_fluxes(cond: EdgeConductivity) -> np.ndarray:
    """Flux on every edge (positive from ``a`` to ``b``) for the current conductivities."""
    g = channel_graph(cond.maze)
    active = _kernels.bfs_labels(cond.maze.open, *cond.maze.source)[g.rows, g.cols] >= 0
    p = _pressures(g, active, cond.conductivity / cond.length, g.of(cond.maze.source), g.of(cond.maze.destination))
    return cond.conductivity * (p[g.edge_a] - p[g.edge_b]) / cond.length


def thickest_path(cond: EdgeConductivity, maze: Maze, threshold_ratio: float = 0.5) -> list[Coord]:
    """The source-destination route through edges with D >= ratio * max(D).

    Raises DisconnectedHotSet if the kept edges do not join the terminals and
    AmbiguousPath if they still contain a loop around the terminals' component.
    """
    keep = cond.conductivity >= threshold_ratio * cond.max()
    adj: dict[Coord, list[Coord]] = {}
    kept_edges = [e for e, k in zip(cond.edges, keep) if k]
    for a, b in kept_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    component = _component(adj, maze.source)
    if maze.destination not in component:
        raise DisconnectedHotSet(f"edges above {threshold_ratio} of max do not join source and destination")
    n_edges = sum(1 for a, b in kept_edges if a in component)
    if n_edges != len(component) - 1:
        raise AmbiguousPath("more than one thick route survives between source and destination")
    return _tree_route(adj, maze.source, maze.destination)


def _tree_route(adj: dict, start: Coord, goal: Coord) -> list[Coord]:
    parent = {start: None}
    stack = [start]
    while stack:
        c = stack.pop()
        for n in adj.get(c, ()):
            if n not in parent:
                parent[n] = c
                stack.append(n)
    path = [goal]
    while path[-1] != start:
        path.append(parent[path[-1]])
    return path[::-1]


def _component(adj: dict, start: Coord) -> set:
    seen = {start}
    stack = [start]
    while stack:
        c = stack.pop()
        for n in adj.get(c, ()):
            if n not in seen:
                seen.add(n)
                stack.append(n)
    return seen
