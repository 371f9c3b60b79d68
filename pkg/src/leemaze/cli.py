"""Command-line front end: ``leemaze gen|solve|verify|render|bench``."""
from __future__ import annotations

import argparse
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import engines
from .engines import ENGINES, EXIT_CODES, EngineParams
from .errors import DegenerateRange, InvalidDimensions, MalformedInput, PathOutsideMaze
from .maze import generate_maze, parse_kind, parse_maze
from .render import RenderSpec, dump_path, load_path, render_ascii, render_field_image, render_vector

EXIT_USAGE = 1
EXIT_SUBOPTIMAL = 5
EXIT_INVALID = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError as exc:
        raise UsageError(f"size must look like 21x21, got {text!r}") from exc


def parse_seeds(text: str) -> list[int]:
    """``0-19``, ``3``, or ``1,4,9`` (ranges inclusive)."""
    seeds = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        seeds.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return seeds


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in EngineParams.keys():
            raise UsageError(f"{path}:{n}: unknown or malformed setting {raw.strip()!r}")
        out[key] = EngineParams.coerce(key, value.strip())
    return out


def _add_engine_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("engine parameters (defaults from the engine modules)")
    g.add_argument("--config", help="key = value file; flags override it")
    g.add_argument("--tol", type=float)
    g.add_argument("--max-iter", type=int)
    g.add_argument("--method", choices=("direct", "jacobi", "sor"))
    g.add_argument("--quantile", type=float)
    g.add_argument("--steps", type=int, help="physarum iterations")
    g.add_argument("--dt", type=float)
    g.add_argument("--physarum-tol", type=float)
    g.add_argument("--ratio", type=float, help="thickest-path threshold ratio")
    g.add_argument("--decay", type=float)
    g.add_argument("--diffusion-steps", type=int)
    g.add_argument("--refractory", type=int)
    g.add_argument("--threshold", type=int)
    g.add_argument("--delay-seed", type=int, help="random delays 1..delay-max for the wavefront engine")
    g.add_argument("--delay-max", type=int)


def engine_params(args) -> EngineParams:
    settings = read_config(args.config) if args.config else {}
    for key in EngineParams.keys():
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return replace(EngineParams(), **settings)


def _load_maze(path: str):
    return parse_maze(Path(path).read_text(encoding="ascii"))


def cmd_gen(args) -> int:
    w, h = parse_size(args.size)
    maze = generate_maze(w, h, parse_kind(args.kind), args.seed)
    text = maze.to_text()
    if args.output:
        Path(args.output).write_text(text, encoding="ascii")
        print(args.output)
    else:
        sys.stdout.write(text)
    return 0


def _engine_field(run):
    return getattr(run, "field", None)


def _write_renders(prefix: str, maze, run, scale: int) -> None:
    path = run.path if run.status == engines.OK else None
    Path(prefix + ".txt").write_text(render_ascii(maze, path), encoding="ascii")
    field = _engine_field(run)
    Path(prefix + ".svg").write_text(render_vector(maze, path, None, scale=scale), encoding="ascii")
    if field is not None:
        try:
            Path(prefix + ".pgm").write_bytes(render_field_image(field, maze, RenderSpec(scale=scale)))
        except DegenerateRange:
            pass


def cmd_solve(args) -> int:
    maze = _load_maze(args.maze)
    report, run = engines.solve(maze, args.engine, engine_params(args))
    print(report.to_line(timing=not args.no_timing))
    if run.message and report.status != engines.OK:
        print(f"# {run.message}", file=sys.stderr)
    if args.path_out and run.path and report.status == engines.OK:
        Path(args.path_out).write_text(dump_path(run.path), encoding="ascii")
    if args.render:
        _write_renders(args.render, maze, run, args.scale)
    return EXIT_CODES[report.status]


def cmd_verify(args) -> int:
    maze = _load_maze(args.maze)
    try:
        path = load_path(Path(args.path).read_text(encoding="ascii"))
    except MalformedInput as exc:
        print(f"invalid: {exc}")
        return EXIT_INVALID
    ok, why = engines.path_is_valid(maze, path)
    if not ok:
        print(f"invalid: {why}")
        return EXIT_INVALID
    best = engines.oracle_length(maze)
    length = len(path) - 1
    if length == best:
        print(f"valid optimal len={length} oracle={best}")
        return 0
    print(f"valid suboptimal len={length} oracle={best}")
    return EXIT_SUBOPTIMAL


def cmd_render(args) -> int:
    maze = _load_maze(args.maze)
    path = load_path(Path(args.path).read_text(encoding="ascii")) if args.path else None
    field = None
    if args.engine:
        _, run = engines.solve(maze, args.engine, engine_params(args))
        field = _engine_field(run)
        if path is None and run.status == engines.OK:
            path = run.path
    normalize = tuple(args.fixed) if args.fixed else "minmax"
    if args.format == "ascii":
        out = render_ascii(maze, path).encode("ascii")
    elif args.format == "svg":
        out = render_vector(maze, path, field, scale=args.scale, normalize=normalize).encode("ascii")
    else:
        if field is None:
            raise UsageError("pgm output needs --engine to supply a field")
        out = render_field_image(field, maze, RenderSpec(scale=args.scale, normalize=normalize))
    if args.output:
        Path(args.output).write_bytes(out)
    else:
        sys.stdout.write(out.decode("ascii"))
    return 0


def _bench_task(task):
    index, engine, w, h, kind, seed, params = task
    maze = generate_maze(w, h, parse_kind(kind), seed)
    report, _ = engines.solve(maze, engine, params)
    return index, report


BENCH_COLUMNS = (
    "engine", "prototypes", "runs", "optimal_rate", "median_ms", "ok", "local_extremum", "not_converged", "unreachable",
)


def run_bench(engine_ids, sizes, kinds, seeds, params: EngineParams, jobs: int = 1):
    """Per-engine reports over the whole suite, in engine then maze order."""
    tasks = []
    for engine in engine_ids:
        for w, h in sizes:
            for kind in kinds:
                for seed in seeds:
                    tasks.append((len(tasks), engine, w, h, kind, seed, params))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_bench_task, tasks))
    else:
        results = [_bench_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    by_engine = {e: [] for e in engine_ids}
    for (_, engine, *_rest), (_, report) in zip(tasks, results):
        by_engine[engine].append(report)
    return by_engine


def bench_table(by_engine, timing: bool = True) -> str:
    lines = ["\t".join(BENCH_COLUMNS)]
    for engine, reports in by_engine.items():
        n = len(reports)
        count = {s: sum(r.status == s for r in reports) for s in engines.STATUSES}
        rate = sum(r.optimal for r in reports) / n if n else 0.0
        median = f"{statistics.median(r.wall_time for r in reports):.3f}" if timing and n else "-"
        lines.append(
            "\t".join(
                map(
                    str,
                    (
                        engine, ENGINES[engine].prototypes.replace(" ", ""), n, f"{rate:.4f}", median,
                        count[engines.OK], count[engines.LOCAL_EXTREMUM], count[engines.NOT_CONVERGED],
                        count[engines.UNREACHABLE],
                    ),
                )
            )
        )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    engine_ids = [e for e in args.engines.split(",") if e] if args.engines != "all" else list(ENGINES)
    if not engine_ids:
        raise UsageError("bench needs at least one engine")
    unknown = [e for e in engine_ids if e not in ENGINES]
    if unknown:
        raise UsageError(f"unknown engines: {', '.join(unknown)}")
    sizes = [parse_size(s) for s in args.sizes.split(",")]
    kinds = args.kinds.split(",")
    for w, h in sizes:
        generate_maze(w, h, parse_kind(kinds[0]), 0)  # validate dimensions before the run
    by_engine = run_bench(engine_ids, sizes, kinds, parse_seeds(args.seeds), engine_params(args), args.jobs)
    table = bench_table(by_engine, timing=not args.no_timing)
    if args.output:
        Path(args.output).write_text(table)
    sys.stdout.write(table)
    if args.reports:
        lines = [r.to_line(timing=not args.no_timing) for reports in by_engine.values() for r in reports]
        Path(args.reports).write_text("\n".join(lines) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leemaze", description="Gradient-based maze solvers checked against the Lee algorithm.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a maze")
    g.add_argument("--size", default="21x21")
    g.add_argument("--kind", default="perfect", help="perfect, braided or braided:<fraction>")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one engine on a maze file")
    s.add_argument("maze")
    s.add_argument("--engine", required=True, choices=list(ENGINES))
    s.add_argument("--path-out")
    s.add_argument("--render", metavar="PREFIX", help="write PREFIX.txt, PREFIX.svg and PREFIX.pgm")
    s.add_argument("--scale", type=int, default=4)
    s.add_argument("--no-timing", action="store_true", help="print ms=- for byte-stable output")
    _add_engine_flags(s)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a path file against a maze")
    v.add_argument("maze")
    v.add_argument("path")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("render", help="render a maze, path or engine field")
    r.add_argument("maze")
    r.add_argument("--format", choices=("ascii", "pgm", "svg"), default="ascii")
    r.add_argument("--path")
    r.add_argument("--engine", choices=list(ENGINES), help="field (and path) source")
    r.add_argument("--scale", type=int, default=4)
    r.add_argument("--fixed", type=float, nargs=2, metavar=("LO", "HI"))
    r.add_argument("-o", "--output")
    _add_engine_flags(r)
    r.set_defaults(func=cmd_render)

    b = sub.add_parser("bench", help="run engines over a maze suite")
    b.add_argument("--engines", default="all", help="comma list or 'all'")
    b.add_argument("--sizes", default="21x21")
    b.add_argument("--kinds", default="perfect")
    b.add_argument("--seeds", default="0-19")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--no-timing", action="store_true")
    b.add_argument("--reports", help="also write every report line here")
    b.add_argument("-o", "--output")
    _add_engine_flags(b)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidDimensions, MalformedInput, PathOutsideMaze, FileNotFoundError, ValueError) as exc:
        print(f"leemaze: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
