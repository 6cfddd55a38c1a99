"""Synthetic narrow-passage maps: corridors, doorways, corners and zig-zags.

Every generator returns a :class:`BenchmarkMap` with start/goal positions on
the passage axis and, where meaningful, the bounding box of the passage
region (used for the adaptive-density check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid_map import GridMap

DEFAULT_CELL = 0.1
DEFAULT_ROBOT = 0.4


@dataclass
class BenchmarkMap:
    name: str
    grid: GridMap
    start: tuple[float, float, float]
    goal: tuple[float, float, float]
    robot_r: float
    regions: dict[str, list[float]] = field(default_factory=dict)


def _cells(robot_r: float, cell: float) -> int:
    n = robot_r / cell
    if abs(n - round(n)) > 1e-9:
        raise ValueError("robot size must be a whole number of cells")
    return int(round(n))


def _world(cell: float, ix: float, iy: float) -> tuple[float, float]:
    return ix * cell, iy * cell


def _box(cell: float, x0: int, y0: int, x1: int, y1: int) -> list[float]:
    """World bbox of the cell block ``[x0, x1) x [y0, y1)``."""
    h = cell / 2
    return [x0 * cell - h, y0 * cell - h, x1 * cell - h, y1 * cell - h]


def _axis(lo: int, n: int) -> float:
    return lo + (n - 1) / 2


def corridor(extra_cells: int, length: int = 40, robot_r: float = DEFAULT_ROBOT,
             cell: float = DEFAULT_CELL) -> BenchmarkMap:
    """Two open rooms joined by a straight corridor ``robot_r + extra_cells`` wide."""
    n = _cells(robot_r, cell) + extra_cells
    room = 30
    w = 2 * room + length + 2
    h = max(40, n + 20)
    occ = np.zeros((h, w), dtype=bool)
    occ[0, :] = occ[-1, :] = occ[:, 0] = occ[:, -1] = True
    y0 = (h - n) // 2
    x0, x1 = room + 1, room + 1 + length
    occ[:, x0:x1] = True
    occ[y0:y0 + n, x0:x1] = False
    yc = _axis(y0, n)
    start = (*_world(cell, room // 3, yc), 0.0)
    goal = (*_world(cell, w - 1 - room // 3, yc), 0.0)
    return BenchmarkMap(
        f"corridor_w{extra_cells:02d}_l{length:03d}", GridMap(occ, cell), start, goal, robot_r,
        {"passage": _box(cell, x0, y0, x1, y0 + n)},
    )


def doorway(extra_cells: int, thickness: int = 2, offset: int = 0, robot_r: float = DEFAULT_ROBOT,
            cell: float = DEFAULT_CELL) -> BenchmarkMap:
    """A room split by a wall of ``thickness`` cells with one door."""
    n = _cells(robot_r, cell) + extra_cells
    w, h = 90, 60
    occ = np.zeros((h, w), dtype=bool)
    occ[0, :] = occ[-1, :] = occ[:, 0] = occ[:, -1] = True
    x0 = w // 2 - thickness // 2
    occ[:, x0:x0 + thickness] = True
    y0 = (h - n) // 2 + offset
    occ[y0:y0 + n, x0:x0 + thickness] = False
    start = (*_world(cell, 12, h // 2), 0.0)
    goal = (*_world(cell, w - 13, h // 2), 0.0)
    return BenchmarkMap(
        f"doorway_w{extra_cells:02d}_t{thickness}_o{offset:+d}", GridMap(occ, cell), start, goal, robot_r,
        {"passage": _box(cell, x0, y0, x0 + thickness, y0 + n)},
    )


def _carve_polyline(occ: np.ndarray, pts: list[tuple[int, int]], n: int) -> None:
    """Clear an ``n``-cell-wide channel whose lower-left corner cell follows ``pts``."""
    for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
        xa, xb = sorted((ax, bx))
        ya, yb = sorted((ay, by))
        occ[ya:yb + n, xa:xb + n] = False


def corner(extra_cells: int, turn: int = 1, robot_r: float = DEFAULT_ROBOT,
           cell: float = DEFAULT_CELL) -> BenchmarkMap:
    """L-shaped corridor with one right-angle turn (``turn=+1`` left, ``-1`` right)."""
    n = _cells(robot_r, cell) + extra_cells
    leg = 40
    w = leg + n + 12
    h = leg + n + 12
    occ = np.ones((h, w), dtype=bool)
    if turn > 0:
        pts = [(6, 6), (6 + leg, 6), (6 + leg, 6 + leg)]
    else:
        pts = [(6, 6 + leg), (6 + leg, 6 + leg), (6 + leg, 6)]
    _carve_polyline(occ, pts, n)
    c = (n - 1) / 2
    (sx, sy), (gx, gy) = pts[0], pts[-1]
    start = (*_world(cell, sx + c, sy + c), 0.0)
    goal = (*_world(cell, gx + c, gy + c), math.copysign(math.pi / 2, turn))
    cx, cy = pts[1]
    return BenchmarkMap(
        f"corner_w{extra_cells:02d}_{'left' if turn > 0 else 'right'}", GridMap(occ, cell), start, goal,
        robot_r, {"passage": _box(cell, cx - 2 * n, cy - 2 * n, cx + 3 * n, cy + 3 * n)},
    )


def zigzag(extra_cells: int, legs: int = 4, leg: int = 24, robot_r: float = DEFAULT_ROBOT,
           cell: float = DEFAULT_CELL) -> BenchmarkMap:
    """Corridor alternating between +x and +y legs, ``legs`` straight pieces in total."""
    n = _cells(robot_r, cell) + extra_cells
    pts = [(6, 6)]
    for k in range(legs):
        x, y = pts[-1]
        pts.append((x + leg, y) if k % 2 == 0 else (x, y + leg))
    w = max(p[0] for p in pts) + n + 7
    h = max(p[1] for p in pts) + n + 7
    occ = np.ones((h, w), dtype=bool)
    _carve_polyline(occ, pts, n)
    c = (n - 1) / 2
    start = (*_world(cell, pts[0][0] + c, pts[0][1] + c), 0.0)
    goal = (*_world(cell, pts[-1][0] + c, pts[-1][1] + c), 0.0)
    return BenchmarkMap(f"zigzag_w{extra_cells:02d}_k{legs}", GridMap(occ, cell), start, goal, robot_r)


def sealed(robot_r: float = DEFAULT_ROBOT, cell: float = DEFAULT_CELL) -> BenchmarkMap:
    """Goal room cut off by a solid wall."""
    w, h = 60, 30
    occ = np.zeros((h, w), dtype=bool)
    occ[0, :] = occ[-1, :] = occ[:, 0] = occ[:, -1] = True
    occ[:, 30:33] = True
    return BenchmarkMap("sealed", GridMap(occ, cell), (1.0, 1.5, 0.0), (5.0, 1.5, 0.0), robot_r)


def open_field(size: int = 32, robot_r: float = DEFAULT_ROBOT, cell: float = DEFAULT_CELL) -> BenchmarkMap:
    occ = np.zeros((size, size), dtype=bool)
    start = (*_world(cell, 2, 2), 0.0)
    goal = (*_world(cell, size - 3, size - 3), 0.0)
    return BenchmarkMap(f"open_{size}", GridMap(occ, cell), start, goal, robot_r)


def blob_field(size: int, density: float, seed: int, robot_r: float = DEFAULT_ROBOT,
               cell: float = DEFAULT_CELL, max_blob: int = 8) -> GridMap:
    """Random axis-aligned rectangles until ``density`` of the cells are occupied."""
    rng = np.random.default_rng(seed)
    occ = np.zeros((size, size), dtype=bool)
    target = density * occ.size
    while occ.sum() < target:
        bw, bh = rng.integers(2, max_blob + 1, size=2)
        x0 = rng.integers(0, size - bw + 1)
        y0 = rng.integers(0, size - bh + 1)
        occ[y0:y0 + bh, x0:x0 + bw] = True
    return GridMap(occ, cell)


def standard_suite(robot_r: float = DEFAULT_ROBOT, cell: float = DEFAULT_CELL,
                   seed: int = 0) -> list[BenchmarkMap]:
    """The built-in benchmark set (53 maps).

    Corridors and doorways use widths ``robot_r + 2 .. robot_r + 8`` cells.
    Corners and zig-zags start at ``robot_r + 3``: at ``robot_r + 2`` the
    best lattice clearance is a quarter cell, too little for the rotation
    term of the bound at a 45 degree heading change (see
    :func:`narrow_turns`).
    """
    rng = np.random.default_rng(seed)
    maps = []
    for length in (20, 40, 60):
        maps += [corridor(k, length, robot_r, cell) for k in range(2, 9)]
    for thickness in (2, 6):
        maps += [doorway(k, thickness, int(rng.integers(-8, 9)), robot_r, cell) for k in range(2, 9)]
    for turn in (1, -1):
        maps += [corner(k, turn, robot_r, cell) for k in range(3, 9)]
    maps += [zigzag(k, 4, robot_r=robot_r, cell=cell) for k in range(3, 9)]
    return maps


def narrow_turns(robot_r: float = DEFAULT_ROBOT, cell: float = DEFAULT_CELL) -> list[BenchmarkMap]:
    """Turning passages only ``robot_r + 2`` cells wide; refinement is expected to stop uncertified."""
    return [corner(2, 1, robot_r, cell), corner(2, -1, robot_r, cell), zigzag(2, 4, robot_r=robot_r, cell=cell)]


def corridor_family(robot_r: float = DEFAULT_ROBOT, cell: float = DEFAULT_CELL, length: int = 40):
    return [corridor(k, length, robot_r, cell) for k in range(2, 9)]
