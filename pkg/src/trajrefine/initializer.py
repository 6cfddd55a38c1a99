"""Coarse initial trajectory: grid A* followed by arc-length downsampling."""

from __future__ import annotations

import heapq
import math
from typing import Sequence

import numpy as np

from .errors import NoPathError, OutOfMapError
from .grid_map import Cell, GridMap, SignedDistanceField, Vec
from .trajectory import Pose, RobotModel, Trajectory

_SQRT2 = math.sqrt(2.0)
_MOVES = (
    (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0),
    (1, 1, _SQRT2), (1, -1, _SQRT2), (-1, 1, _SQRT2), (-1, -1, _SQRT2),
)


def _free_cell(grid: GridMap, x: Sequence[float], what: str) -> Cell:
    cell = grid.cell_of(x)
    if not grid.in_grid(cell):
        raise OutOfMapError(f"{what} ({x[0]:.6g}, {x[1]:.6g}) is outside the map")
    if grid.is_occupied(cell):
        raise NoPathError(f"{what} ({x[0]:.6g}, {x[1]:.6g}) lies in an occupied cell")
    return cell


def astar_cells(grid: GridMap, start: Cell, goal: Cell, penalty=None, blocked=None) -> list[Cell]:
    """8-connected A* over free cells, in cell units.

    ``blocked`` optionally marks further ``[iy, ix]`` cells as impassable.
    Diagonal moves may not cut between two blocked orthogonal neighbours.
    ``penalty`` is an optional ``[iy, ix]`` array of non-negative factors; a
    move into a cell costs ``step * (1 + penalty[cell])``.  Ties in f are
    broken by the larger g-cost (deeper first) and then by cell index, so
    results are deterministic.
    """
    occ = grid.occupancy if blocked is None else grid.occupancy | blocked
    w, h = grid.width, grid.height
    gx, gy = goal

    def heuristic(c):
        return math.hypot(c[0] - gx, c[1] - gy)

    g_cost = {start: 0.0}
    parent: dict[Cell, Cell] = {}
    heap = [(heuristic(start), 0.0, start)]
    closed = set()
    while heap:
        _, g, cell = heapq.heappop(heap)
        if cell in closed:
            continue
        if cell == goal:
            path = [cell]
            while cell in parent:
                cell = parent[cell]
                path.append(cell)
            return path[::-1]
        closed.add(cell)
        g = -g
        cx, cy = cell
        for dx, dy, step in _MOVES:
            nx, ny = cx + dx, cy + dy
            if not (0 <= nx < w and 0 <= ny < h) or occ[ny, nx]:
                continue
            if dx and dy and (occ[cy, nx] or occ[ny, cx]):
                continue
            ng = g + (step if penalty is None else step * (1.0 + penalty[ny, nx]))
            nb = (nx, ny)
            if ng < g_cost.get(nb, math.inf) - 1e-12:
                g_cost[nb] = ng
                parent[nb] = cell
                heapq.heappush(heap, (ng + heuristic(nb), -ng, nb))
    raise NoPathError(f"no free 8-connected path from cell {start} to cell {goal}")


def clearance_penalty(sdf: SignedDistanceField, radius: float, weight: float) -> np.ndarray:
    """Per-cell cost factor ``weight * (1 - phi / radius)`` for free cells with ``phi < radius``."""
    phi = np.where(np.isfinite(sdf.phi), sdf.phi, radius)
    return weight * np.clip(1.0 - phi / radius, 0.0, None)


def plan_global_path(
    grid: GridMap,
    start: Sequence[float],
    goal: Sequence[float],
    sdf: SignedDistanceField | None = None,
    clearance_weight: float = 0.0,
    clearance_radius: float | None = None,
    min_clearance: float = 0.0,
) -> list[Vec]:
    """World-coordinate cell centers of an optimal 8-connected path.

    By default the cost is plain path length.  Given ``sdf`` and a positive
    ``clearance_weight``, entering a cell closer than ``clearance_radius``
    to an obstacle costs extra (see :func:`clearance_penalty`), which pulls
    the path toward the middle of passages.  A positive ``min_clearance``
    (needs ``sdf``) also blocks every cell with ``phi <= min_clearance``
    except the start and goal cells, so the path avoids gaps the robot
    cannot pass.
    """
    s = _free_cell(grid, start, "start")
    g = _free_cell(grid, goal, "goal")
    blocked = None
    if min_clearance > 0:
        if sdf is None:
            raise ValueError("min_clearance needs a distance field")
        blocked = sdf.phi <= min_clearance
        blocked[s[1], s[0]] = blocked[g[1], g[0]] = False
    penalty = None
    if sdf is not None and clearance_weight > 0:
        if not clearance_radius or clearance_radius <= 0:
            raise ValueError("clearance_radius must be positive")
        penalty = clearance_penalty(sdf, clearance_radius, clearance_weight)
    return [grid.center(c) for c in astar_cells(grid, s, g, penalty, blocked)]


def path_length(path: Sequence[Vec]) -> float:
    return math.fsum(math.dist(a, b) for a, b in zip(path[:-1], path[1:]))


def _turn_vertices(path: Sequence[Vec]) -> list[int]:
    out = []
    for i in range(1, len(path) - 1):
        ax, ay = path[i][0] - path[i - 1][0], path[i][1] - path[i - 1][1]
        bx, by = path[i + 1][0] - path[i][0], path[i + 1][1] - path[i][1]
        if abs(ax * by - ay * bx) > 1e-9 * math.hypot(ax, ay) * math.hypot(bx, by):
            out.append(i)
    return out


def seed_trajectory(
    path: Sequence[Vec],
    robot: RobotModel,
    v_ref: float,
    coarse_spacing: float | None = None,
    keep_turns: bool = False,
) -> Trajectory:
    """Downsample ``path`` to waypoints roughly ``coarse_spacing`` apart (default ``4 r``).

    Waypoints are path vertices, endpoints always kept.  With ``keep_turns``
    every vertex where the path changes direction is kept as well, so the
    chords between waypoints never cut a corner of the path.  Each heading
    points to the next waypoint, the last repeats the previous one.  Time
    intervals are segment length over ``v_ref``.
    """
    if not path:
        raise ValueError("path is empty")
    if not v_ref > 0:
        raise ValueError("v_ref must be positive")
    spacing = 4 * robot.r if coarse_spacing is None else coarse_spacing
    if not spacing > 0:
        raise ValueError("coarse_spacing must be positive")
    if len(path) < 2 or path[0] == path[-1] and len(set(map(tuple, path))) == 1:
        raise ValueError("path has a single distinct point; cannot form a trajectory")

    cum = [0.0]
    for a, b in zip(path[:-1], path[1:]):
        cum.append(cum[-1] + math.dist(a, b))
    total = cum[-1]
    n_seg = max(1, round(total / spacing))
    picks = [0]
    v = 0
    for k in range(1, n_seg):
        target = total * k / n_seg
        while v + 1 < len(path) and abs(cum[v + 1] - target) <= abs(cum[v] - target):
            v += 1
        if v > picks[-1] and v < len(path) - 1:
            picks.append(v)
    picks.append(len(path) - 1)
    if keep_turns:
        picks = sorted(set(picks) | set(_turn_vertices(path)))

    pts = [tuple(path[i]) for i in picks]
    headings = [math.atan2(b[1] - a[1], b[0] - a[0]) for a, b in zip(pts[:-1], pts[1:])]
    headings.append(headings[-1])
    poses = tuple(Pose(p[0], p[1], th) for p, th in zip(pts, headings))
    dts = tuple(math.dist(a, b) / v_ref for a, b in zip(pts[:-1], pts[1:]))
    return Trajectory(poses, dts)
