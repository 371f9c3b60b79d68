import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from conftest import corridor
from leemaze import Perfect, generate_maze, lee_label, lee_trace, parse_maze
from leemaze.errors import DegenerateRange, MalformedInput, PathOutsideMaze
from leemaze.netflow import current_field, solve_potential
from leemaze.render import (
    RenderSpec,
    Target,
    dump_path,
    gray_levels,
    load_path,
    read_pgm,
    render_ascii,
    render_field_image,
    render_vector,
)

GOLDEN = Path(__file__).parent / "golden"
SVG = "{http://www.w3.org/2000/svg}"


def test_ascii_overlay_keeps_terminals():
    m = parse_maze("S.D")
    assert render_ascii(m, [(0, 0), (0, 1), (0, 2)]) == "S*D\n"
    assert render_ascii(m) == "S.D\n"
    with pytest.raises(PathOutsideMaze):
        render_ascii(parse_maze("S#D"), [(0, 0), (0, 1), (0, 2)])


def test_ascii_without_path_round_trips():
    m = generate_maze(15, 9, Perfect(), 2)
    assert parse_maze(render_ascii(m)) == m


def test_constant_field_needs_fixed_bounds():
    m = corridor(4)
    with pytest.raises(DegenerateRange):
        render_field_image(np.ones((1, 4)), m)
    img = read_pgm(render_field_image(np.ones((1, 4)), m, RenderSpec(normalize=(0.0, 2.0))))
    assert img.tolist() == [[128] * 4]


def test_linear_potential_gives_increasing_grays():
    m = corridor(9)
    pot, _ = solve_potential(m)
    img = read_pgm(render_field_image(pot, m))
    assert np.all(np.diff(img[0][::-1]) > 0)
    assert img.min() == 1 and img.max() == 255


def test_walls_are_black_and_scale_replicates():
    m = parse_maze("S#D")
    v = np.array([[0.0, 5.0, 1.0]])
    assert gray_levels(v, m).tolist() == [[1, 0, 255]]
    img = read_pgm(render_field_image(v, m, RenderSpec(scale=3)))
    assert img.shape == (3, 9)
    assert img[:, 3:6].max() == 0


def test_pgm_lines_stay_short():
    m = generate_maze(41, 41, Perfect(), 1)
    pot, _ = solve_potential(m)
    data = render_field_image(pot, m, RenderSpec(scale=3))
    assert max(len(line) for line in data.split(b"\n")) <= 70
    assert read_pgm(data).shape == (123, 123)


def test_read_pgm_rejects_garbage():
    with pytest.raises(MalformedInput):
        read_pgm(b"P5\n1 1\n255\n0\n")
    with pytest.raises(MalformedInput):
        read_pgm(b"P2\n2 2\n255\n0 0 0\n")


def test_spec_validation():
    with pytest.raises(ValueError):
        RenderSpec(scale=0)
    with pytest.raises(ValueError):
        RenderSpec(normalize=(1.0, 1.0))
    with pytest.raises(ValueError):
        render_field_image(np.zeros((1, 3)), corridor(3), RenderSpec(target=Target.Vector))


def test_svg_corridor_polyline():
    m = corridor(5)
    root = ET.fromstring(render_vector(m, m.channel_cells(), scale=10))
    lines = root.findall(f"{SVG}polyline")
    assert len(lines) == 1
    points = lines[0].get("points").split()
    assert points == ["5,5", "15,5", "25,5", "35,5", "45,5"]


def test_svg_wall_count():
    m = generate_maze(11, 11, Perfect(), 0)
    root = ET.fromstring(render_vector(m))
    black = [r for r in root.findall(f"{SVG}rect") if r.get("fill") == "#000000"]
    assert len(black) == int((~m.open).sum())


def _golden_case():
    m = generate_maze(9, 9, Perfect(), 0)
    pot, _ = solve_potential(m)
    return m, current_field(pot, m)


def test_golden_maze_pgm_and_svg():
    m, cur = _golden_case()
    assert m.to_text() == (GOLDEN / "maze_9x9_seed0.txt").read_text()
    assert render_field_image(cur, m, RenderSpec(scale=2)) == (GOLDEN / "current_9x9_seed0.pgm").read_bytes()
    svg = render_vector(m, lee_trace(lee_label(m)), cur, scale=10)
    assert svg == (GOLDEN / "path_9x9_seed0.svg").read_text()


def test_golden_current_image_shape():
    # route cells at full brightness, dead ends at the floor level
    m, cur = _golden_case()
    gray = gray_levels(cur, m)
    route = set(lee_trace(lee_label(m)))
    for c in m.channel_cells():
        assert gray[c] == (255 if c in route else 1)


def test_path_file_round_trip():
    path = [(0, 0), (0, 1), (0, 2)]
    assert load_path(dump_path(path)) == path
    for bad in ("", "path 3\n0 0\n", "route 1\n0 0\n", "path 1\n0 x\n"):
        with pytest.raises(MalformedInput):
            load_path(bad)
