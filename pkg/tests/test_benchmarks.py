import numpy as np
import pytest

from trajrefine import benchmarks
from trajrefine.grid_map import build_sdf
from trajrefine.initializer import plan_global_path
from trajrefine.oracle import free_components


def test_standard_suite_composition():
    maps = benchmarks.standard_suite()
    assert len(maps) >= 50
    names = [m.name for m in maps]
    assert len(set(names)) == len(names)
    for family in ("corridor", "doorway", "corner", "zigzag"):
        assert any(n.startswith(family) for n in names)
    widths = {int(n.split("_w")[1][:2]) for n in names if n.startswith("corridor")}
    assert widths == set(range(2, 9))


def test_suite_is_seed_deterministic():
    a = benchmarks.standard_suite(seed=4)
    b = benchmarks.standard_suite(seed=4)
    assert [m.name for m in a] == [m.name for m in b]
    assert all(np.array_equal(x.grid.occupancy, y.grid.occupancy) for x, y in zip(a, b))


@pytest.mark.parametrize("bm", benchmarks.standard_suite() + benchmarks.narrow_turns(), ids=lambda m: m.name)
def test_start_and_goal_connected(bm):
    g = bm.grid
    lab = free_components(~g.occupancy)
    s, t = g.cell_of(bm.start[:2]), g.cell_of(bm.goal[:2])
    assert lab[s[1], s[0]] >= 0 and lab[s[1], s[0]] == lab[t[1], t[0]]


def test_corridor_width():
    bm = benchmarks.corridor(3)
    x0, y0, x1, y1 = bm.regions["passage"]
    cs = bm.grid.cell_size
    assert round((y1 - y0) / cs) == round(bm.robot_r / cs) + 3
    assert round((x1 - x0) / cs) == 40


def test_sealed_has_no_path():
    bm = benchmarks.sealed()
    lab = free_components(~bm.grid.occupancy)
    s, t = bm.grid.cell_of(bm.start[:2]), bm.grid.cell_of(bm.goal[:2])
    assert lab[s[1], s[0]] != lab[t[1], t[0]]


def test_blob_field_density():
    g = benchmarks.blob_field(64, 0.2, seed=1)
    assert 0.2 <= g.occupancy.mean() < 0.25
    assert np.array_equal(g.occupancy, benchmarks.blob_field(64, 0.2, seed=1).occupancy)


def test_robot_must_be_whole_cells():
    with pytest.raises(ValueError):
        benchmarks.corridor(2, robot_r=0.45)


def test_open_field_path():
    bm = benchmarks.open_field()
    path = plan_global_path(bm.grid, bm.start[:2], bm.goal[:2], build_sdf(bm.grid))
    assert path[0] == bm.grid.center(bm.grid.cell_of(bm.start[:2]))
