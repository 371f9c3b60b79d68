"""Engine pipelines (gradient + tracer) and the single-line solve report."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, fields
from typing import Callable, Optional

import numpy as np

from . import diffusion, netflow, oracle, wavefront
from .errors import (
    AmbiguousPath,
    CycleDetected,
    DisconnectedHotSet,
    InvalidEndpoints,
    LocalExtremum,
    NotConverged,
    NotQuiescent,
    StepBudgetExceeded,
    Unreachable,
)
from .fields import ScalarField
from .maze import Maze

REPORT_VERSION = "v1"

OK = "Ok"
LOCAL_EXTREMUM = "LocalExtremum"
NOT_CONVERGED = "NotConverged"
UNREACHABLE = "Unreachable"
STATUSES = (OK, LOCAL_EXTREMUM, NOT_CONVERGED, UNREACHABLE)
EXIT_CODES = {OK: 0, UNREACHABLE: 2, NOT_CONVERGED: 3, LOCAL_EXTREMUM: 4}

# tracer got stuck or the read-out was not a single route
_STUCK = (LocalExtremum, StepBudgetExceeded, DisconnectedHotSet, AmbiguousPath, CycleDetected)


@dataclass(frozen=True)
class EngineParams:
    """Every tunable engine knob, at module defaults.  Field names double as config keys."""

    tol: float = netflow.DEFAULT_TOL
    max_iter: Optional[int] = None
    method: str = "direct"
    quantile: float = 0.5
    steps: int = 2000
    dt: float = 0.1
    physarum_tol: float = 1e-8
    ratio: float = 0.5
    decay: float = diffusion.DEFAULT_DECAY
    diffusion_steps: int = 100_000
    refractory: int = 3
    threshold: int = 1
    delay_seed: Optional[int] = None
    delay_max: int = 9

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def coerce(cls, key: str, text: str):
        """Convert a config-file string to the type of ``key``."""
        default = cls.__dataclass_fields__[key].default
        if key in ("max_iter", "delay_seed"):
            return None if text.lower() in ("", "none") else int(text)
        return type(default)(text)


@dataclass
class EngineRun:
    path: Optional[list] = None
    iterations: int = 0
    residual: float = 0.0
    status: str = OK
    field: Optional[object] = None
    message: str = ""


@dataclass(frozen=True)
class SolveReport:
    engine: str
    path_len: int
    oracle_len: int
    optimal: bool
    iterations: int
    residual: float
    wall_time: float  # milliseconds
    status: str

    def to_line(self, timing: bool = True) -> str:
        ms = f"{self.wall_time:.3f}" if timing else "-"
        return (
            f"{REPORT_VERSION} engine={self.engine} len={self.path_len} oracle={self.oracle_len} "
            f"optimal={str(self.optimal).lower()} iters={self.iterations} resid={self.residual!r} "
            f"ms={ms} status={self.status}"
        )


def parse_report(line: str) -> dict:
    version, *pairs = line.split()
    if version != REPORT_VERSION:
        raise ValueError(f"unsupported report version {version!r}")
    return dict(p.split("=", 1) for p in pairs)


# Each pipeline fills ``run`` as it goes, so a tracer failure still reports
# the gradient stage's iterations and residual.


def _lee(maze, p, run):
    f = oracle.lee_label(maze)
    run.field, run.iterations = f, int(f.labels.max())
    run.path = oracle.lee_trace(f)


def _laplace(bc):
    def pipeline(maze, p, run):
        pot, diag = netflow.solve_potential(maze, bc, tol=p.tol, max_iter=p.max_iter, method=p.method)
        run.field, run.iterations, run.residual = pot, diag.iterations, diag.final_residual
        run.path = netflow.trace_streamline(pot, maze)

    return pipeline


def _current_hot(maze, p, run):
    pot, diag = netflow.solve_potential(maze, netflow.NeumannWalls, tol=p.tol, max_iter=p.max_iter, method=p.method)
    run.iterations, run.residual = diag.iterations, diag.final_residual
    run.field = netflow.current_field(pot, maze, netflow.NeumannWalls)
    run.path = netflow.hot_path(run.field, maze, p.quantile)


def _physarum(maze, p, run):
    cond, diag = netflow.physarum_solve(maze, steps=p.steps, dt=p.dt, tol=p.physarum_tol)
    run.iterations, run.residual = diag.iterations, diag.final_residual
    run.field = conductivity_cells(cond)
    run.path = netflow.thickest_path(cond, maze, p.ratio)


def conductivity_cells(cond: netflow.EdgeConductivity) -> ScalarField:
    """Largest incident edge conductivity per cell, for rendering."""
    m = cond.maze
    v = np.where(m.open, 0.0, np.nan)
    for (a, b), d in zip(cond.edges, cond.conductivity.tolist()):
        v[a] = max(v[a], d)
        v[b] = max(v[b], d)
    return ScalarField(m, v, "conductivity")


def _diffusion(maze, p, run):
    f = diffusion.diffuse(maze, params=diffusion.DiffusionParams(decay=p.decay, steps=p.diffusion_steps))
    run.field, run.iterations, run.residual = f, f.diagnostics.iterations, f.diagnostics.final_residual
    run.path = diffusion.chemotactic_trace(f, maze)


def _delays(maze, p):
    if p.delay_seed is None:
        return None
    return wavefront.DelayMap.random(maze, 1, p.delay_max, p.delay_seed)


def _pointer_pipeline(make_field):
    def pipeline(maze, p, run):
        f = make_field(maze, p)
        run.field, run.iterations = f, int(f.arrival.max())
        run.path = wavefront.pointer_trace(f)

    return pipeline


def _isochrone(maze, p, run):
    from_src = wavefront.weighted_wavefront(maze, origin=maze.source)
    from_dst = wavefront.weighted_wavefront(maze, origin=maze.destination)
    run.iterations = int(from_src.arrival.max())
    total = np.where(from_src.reached & from_dst.reached, from_src.arrival + from_dst.arrival, np.nan)
    run.field = ScalarField(maze, total, "arrival")
    _, run.path = wavefront.isochrone_intersection_path(maze, from_src, from_dst)


_wavefront = _pointer_pipeline(lambda maze, p: wavefront.weighted_wavefront(maze, _delays(maze, p)))
_ca = _pointer_pipeline(
    lambda maze, p: wavefront.excitable_ca(maze, params=wavefront.CaParams(p.refractory, p.threshold))
)
_crystal = _pointer_pipeline(lambda maze, p: wavefront.weighted_wavefront(maze, origin=maze.destination))


@dataclass(frozen=True)
class Engine:
    id: str
    prototypes: str
    summary: str
    run: Callable = field(repr=False)


ENGINES = {
    e.id: e
    for e in (
        Engine("lee", "-", "breadth-first wave labels, lowest-label descent", _lee),
        Engine("laplace-neumann", "GLOW, FLUIDIC", "insulating-wall potential, steepest-descent streamline", _laplace(netflow.NeumannWalls)),
        Engine("laplace-dirichlet", "(potential method)", "grounded-wall potential, steepest-descent streamline", _laplace(netflow.DirichletWalls)),
        Engine("current-hot", "THERMO", "cells above a current-magnitude quantile, routed through", _current_hot),
        Engine("physarum", "PHYSARUM I", "flux-reinforced tube conductivity, thickest route", _physarum),
        Engine("diffusion", "MARANGONI, PHYSARUM II, EPITHELIUM, TEMPERATURE", "decaying attractant, greedy climb", _diffusion),
        Engine("wavefront", "VLSI", "delay-weighted wave, stored incoming directions", _wavefront),
        Engine("ca", "WAVE", "excitable cellular automaton, first-excitation pointers", _ca),
        Engine("isochrone", "WAVE", "two-wave isochrone intersection", _isochrone),
        Engine("crystal", "CRYSTALL", "front-set pointer field read from the source", _crystal),
    )
}


def path_is_valid(maze: Maze, path) -> tuple[bool, str]:
    """Structural check: channel cells, unit steps, no repeats, S first and D last."""
    if not path:
        return False, "empty path"
    for c in path:
        if not maze.is_channel(c):
            return False, f"cell {tuple(c)} is not a channel"
    if len(set(map(tuple, path))) != len(path):
        return False, "path revisits a cell"
    for a, b in zip(path, path[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            return False, f"{tuple(a)} -> {tuple(b)} is not a single step"
    if tuple(path[0]) != tuple(maze.source) or tuple(path[-1]) != tuple(maze.destination):
        return False, "path does not run from S to D"
    return True, "ok"


def oracle_length(maze: Maze) -> Optional[int]:
    return oracle.lee_label(maze).label(maze.source)


def solve(maze: Maze, engine: str, params: EngineParams = EngineParams()) -> tuple[SolveReport, EngineRun]:
    """Run one engine pipeline and score its path against the Lee oracle."""
    spec = ENGINES[engine]
    oracle_len = oracle_length(maze)
    run = EngineRun()
    start = time.perf_counter()
    if oracle_len is None:
        run.status, run.message = UNREACHABLE, "destination unreachable"
    else:
        try:
            spec.run(maze, params, run)
        except (Unreachable, InvalidEndpoints) as exc:
            run.status, run.message = UNREACHABLE, str(exc)
        except (NotConverged, NotQuiescent) as exc:
            run.status, run.message = NOT_CONVERGED, str(exc)
            diag = getattr(exc, "diagnostics", None)
            if diag is not None:
                run.iterations, run.residual = diag.iterations, diag.final_residual
        except _STUCK as exc:
            run.status, run.message = LOCAL_EXTREMUM, str(exc)
    elapsed = (time.perf_counter() - start) * 1e3
    if run.status == OK:
        valid, why = path_is_valid(maze, run.path)
        if not valid:
            run.status, run.message = LOCAL_EXTREMUM, why
    path_len = len(run.path) - 1 if run.path and run.status == OK else -1
    o_len = -1 if oracle_len is None else oracle_len
    report = SolveReport(
        engine, path_len, o_len, run.status == OK and path_len == o_len, run.iterations, float(run.residual), elapsed, run.status
    )
    return report, run
