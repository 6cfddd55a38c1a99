"""Brute-force reference computations.

These are deliberately simple and slow.  They share no code with the fast
paths they check beyond the :class:`GridMap` container itself.
"""

from __future__ import annotations

import math

import numpy as np

from .grid_map import GridMap, SignedDistanceField
from .trajectory import Pose, RobotModel, shortest_angle

MAX_EXACT_CELLS = 128 * 128


def exact_sdf(grid: GridMap) -> SignedDistanceField:
    """All-pairs signed Euclidean distance between cell centers.

    ``nearest`` follows the lowest-``(iy, ix)`` tie rule.  Raises
    ``ValueError`` for maps larger than 128 x 128 cells.
    """
    h, w = grid.occupancy.shape
    if h * w > MAX_EXACT_CELLS:
        raise ValueError(f"exact_sdf is limited to {MAX_EXACT_CELLS} cells, map has {h * w}")
    occ = grid.occupancy.ravel()
    iy, ix = np.divmod(np.arange(h * w), w)
    phi = np.empty(h * w)
    nearest = np.full((h * w, 2), -1, dtype=np.int64)
    if occ.all() or not occ.any():
        phi[:] = -math.inf if occ.all() else math.inf
    else:
        for cls in (False, True):
            src = np.flatnonzero(occ != cls)  # candidates of the opposite class, row-major
            dst = np.flatnonzero(occ == cls)
            for chunk in np.array_split(dst, max(1, len(dst) // 512)):
                d2 = (ix[chunk, None] - ix[None, src]) ** 2 + (iy[chunk, None] - iy[None, src]) ** 2
                # argmin returns the first minimum, i.e. the lowest row-major index.
                k = np.argmin(d2, axis=1)
                phi[chunk] = np.sqrt(d2[np.arange(len(chunk)), k]) * (-1.0 if cls else 1.0)
                nearest[chunk, 0] = ix[src[k]]
                nearest[chunk, 1] = iy[src[k]]
        phi *= grid.cell_size
    return SignedDistanceField(phi.reshape(h, w), nearest.reshape(h, w, 2), grid)


def point_obstacle_distance(grid: GridMap, points: np.ndarray) -> np.ndarray:
    """Distance from each world point (rows of ``points``) to the nearest occupied square."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    oy, ox = np.nonzero(grid.occupancy)
    if len(ox) == 0:
        return np.full(len(pts), math.inf)
    cs = grid.cell_size
    cx = grid.origin[0] + ox * cs
    cy = grid.origin[1] + oy * cs
    out = np.empty(len(pts))
    for s in range(0, len(pts), 256):
        p = pts[s:s + 256]
        ex = np.maximum(np.abs(p[:, 0, None] - cx[None, :]) - cs / 2, 0.0)
        ey = np.maximum(np.abs(p[:, 1, None] - cy[None, :]) - cs / 2, 0.0)
        out[s:s + 256] = np.sqrt(ex * ex + ey * ey).min(axis=1)
    return out


def interpolate(p_a: Pose, p_b: Pose, s: float) -> Pose:
    dth = shortest_angle(p_a.theta, p_b.theta)
    return Pose(p_a.x + s * (p_b.x - p_a.x), p_a.y + s * (p_b.y - p_a.y), p_a.theta + s * dth)


def sweep_collision_check(
    p_a: Pose, p_b: Pose, grid: GridMap, robot: RobotModel, step: float = 1e-3
) -> bool:
    """True if the disc robot hits an occupied cell anywhere on the straight motion.

    The motion is sampled at ``s = 0, step, 2 step, ..., 1``.  A sample
    collides when its distance to an occupied square is below ``robot.r / 2``.
    """
    if not 0 < step <= 1:
        raise ValueError("step must lie in (0, 1]")
    n = int(math.floor(1.0 / step + 1e-9))
    s = np.arange(n + 1) * step
    if s[-1] < 1.0:
        s = np.append(s, 1.0)
    xs = p_a.x + s * (p_b.x - p_a.x)
    ys = p_a.y + s * (p_b.y - p_a.y)
    radius = robot.r / 2
    # Only squares within reach of the swept disc can matter.
    cs = grid.cell_size
    pad = radius + cs
    lo = grid.cell_of((min(p_a.x, p_b.x) - pad, min(p_a.y, p_b.y) - pad))
    hi = grid.cell_of((max(p_a.x, p_b.x) + pad, max(p_a.y, p_b.y) + pad))
    x0, y0 = max(lo[0], 0), max(lo[1], 0)
    x1, y1 = min(hi[0] + 1, grid.width), min(hi[1] + 1, grid.height)
    if x0 >= x1 or y0 >= y1:
        return False
    oy, ox = np.nonzero(grid.occupancy[y0:y1, x0:x1])
    if len(ox) == 0:
        return False
    cx = grid.origin[0] + (ox + x0) * cs
    cy = grid.origin[1] + (oy + y0) * cs
    for k in range(0, len(s), 512):
        ex = np.maximum(np.abs(xs[k:k + 512, None] - cx[None, :]) - cs / 2, 0.0)
        ey = np.maximum(np.abs(ys[k:k + 512, None] - cy[None, :]) - cs / 2, 0.0)
        if (ex * ex + ey * ey < radius * radius).any():
            return True
    return False


def trajectory_collides(poses, grid: GridMap, robot: RobotModel, step: float = 1e-3) -> list[int]:
    """Indices of segments whose swept motion collides."""
    return [
        i for i in range(len(poses) - 1)
        if sweep_collision_check(poses[i], poses[i + 1], grid, robot, step)
    ]


def free_components(free: np.ndarray) -> np.ndarray:
    """4-connected component labels of ``free`` by plain BFS (``-1`` on blocked cells)."""
    h, w = free.shape
    labels = np.full((h, w), -1, dtype=np.int64)
    current = 0
    for sy in range(h):
        for sx in range(w):
            if not free[sy, sx] or labels[sy, sx] >= 0:
                continue
            stack = [(sx, sy)]
            labels[sy, sx] = current
            while stack:
                x, y = stack.pop()
                for nx, ny in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                    if 0 <= nx < w and 0 <= ny < h and free[ny, nx] and labels[ny, nx] < 0:
                        labels[ny, nx] = current
                        stack.append((nx, ny))
            current += 1
    return labels
