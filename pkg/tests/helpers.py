"""Map builders shared by the test modules."""

import numpy as np

from trajrefine.grid_map import GridMap


def random_grid(rng: np.random.Generator, size: int = 64, density: float = 0.2, cell: float = 0.1) -> GridMap:
    """Independent random cells plus a few rectangles, so both speckle and walls occur."""
    occ = rng.random((size, size)) < density / 2
    while occ.mean() < density:
        w, h = rng.integers(2, 9, size=2)
        x0, y0 = rng.integers(0, size - 1, size=2)
        occ[y0:y0 + h, x0:x0 + w] = True
    return GridMap(occ, cell)


def single_obstacle() -> GridMap:
    occ = np.zeros((5, 5), dtype=bool)
    occ[2, 2] = True
    return GridMap(occ, 1.0)


def left_wall(width: int = 12, height: int = 8, wall_cols: int = 3, cell: float = 1.0) -> GridMap:
    occ = np.zeros((height, width), dtype=bool)
    occ[:, :wall_cols] = True
    return GridMap(occ, cell)


def write_scenario(directory, bm, **extra):
    """Save a benchmark map plus its scenario JSON; returns the JSON path."""
    import json
    from pathlib import Path

    from trajrefine.harness import Scenario
    from trajrefine.mapio import save_map

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_map(bm.grid, directory / f"{bm.name}.map")
    doc = Scenario(bm.name, directory / f"{bm.name}.map", bm.start, bm.goal, bm.robot_r,
                   regions=bm.regions).to_dict(directory)
    doc.update(extra)
    path = directory / f"{bm.name}.json"
    path.write_text(json.dumps(doc))
    return path
