"""Occupancy grid, signed distance field and grid queries.

Cells are addressed as ``(ix, iy)`` (column, row); arrays are stored
row-major as ``array[iy, ix]``.  ``origin`` is the world position of the
*center* of cell ``(0, 0)``, so cell ``(ix, iy)`` covers the half-open square
``[ox + (ix - 1/2) cs, ox + (ix + 1/2) cs) x [oy + (iy - 1/2) cs, ...)``.
A point on a shared edge belongs to the higher-index cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateGradientError, NoBoundaryError, OutOfMapError

Cell = tuple[int, int]
Vec = tuple[float, float]

_SQRT1_2 = math.sqrt(0.5)

# Dead-reckoning window split into the causal halves of the two raster passes.
_FORWARD = ((-1, -1), (0, -1), (1, -1), (-1, 0))
_BACKWARD = ((1, 0), (-1, 1), (0, 1), (1, 1))


@dataclass(frozen=True, eq=False)
class GridMap:
    occupancy: np.ndarray
    cell_size: float = 1.0
    origin: Vec = (0.0, 0.0)

    def __post_init__(self):
        occ = np.array(self.occupancy, dtype=bool, copy=True)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise ValueError(f"occupancy must be a non-empty 2D array, got shape {occ.shape}")
        if not self.cell_size > 0:
            raise ValueError(f"cell_size must be positive, got {self.cell_size}")
        occ.setflags(write=False)
        object.__setattr__(self, "occupancy", occ)
        object.__setattr__(self, "cell_size", float(self.cell_size))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def width(self) -> int:
        return self.occupancy.shape[1]

    @property
    def height(self) -> int:
        return self.occupancy.shape[0]

    @property
    def n_occupied(self) -> int:
        return int(self.occupancy.sum())

    @property
    def has_boundary(self) -> bool:
        n = self.n_occupied
        return 0 < n < self.occupancy.size

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """World extent ``(xmin, ymin, xmax, ymax)``; the max edges are exclusive."""
        h = self.cell_size / 2
        ox, oy = self.origin
        return (ox - h, oy - h, ox - h + self.width * self.cell_size, oy - h + self.height * self.cell_size)

    def cell_of(self, x: Sequence[float]) -> Cell:
        """Containing cell of a world point; may lie outside the grid."""
        ix = math.floor((x[0] - self.origin[0]) / self.cell_size + 0.5)
        iy = math.floor((x[1] - self.origin[1]) / self.cell_size + 0.5)
        return ix, iy

    def in_grid(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.width and 0 <= cell[1] < self.height

    def contains(self, x: Sequence[float]) -> bool:
        return self.in_grid(self.cell_of(x))

    def center(self, cell: Cell) -> Vec:
        return (self.origin[0] + cell[0] * self.cell_size, self.origin[1] + cell[1] * self.cell_size)

    def is_occupied(self, cell: Cell) -> bool:
        return bool(self.occupancy[cell[1], cell[0]])

    def checked_cell(self, x: Sequence[float]) -> Cell:
        cell = self.cell_of(x)
        if not self.in_grid(cell):
            raise OutOfMapError(f"position ({x[0]:.6g}, {x[1]:.6g}) is outside the map")
        return cell


@dataclass(frozen=True, eq=False)
class SignedDistanceField:
    """Per-cell signed distance (meters, positive in free space).

    ``nearest[iy, ix]`` holds the ``(ix, iy)`` of the opposite-class cell the
    construction settled on, or ``(-1, -1)`` on a uniform map.
    """

    phi: np.ndarray
    nearest: np.ndarray
    built_from: GridMap = field(repr=False)

    @property
    def grid(self) -> GridMap:
        return self.built_from

    def value(self, cell: Cell) -> float:
        return float(self.phi[cell[1], cell[0]])


def build_sdf(grid: GridMap) -> SignedDistanceField:
    """Signed distance field by two-pass dead reckoning.

    Each cell keeps a pointer to the opposite-class cell nearest to it and
    inherits candidates from its already-visited 8-neighbours; distances are
    recomputed exactly from the pointers, which keeps the error of the
    classic chamfer masks out of the result.
    """
    occ = grid.occupancy
    h, w = occ.shape
    n_occ = int(occ.sum())
    if n_occ == 0 or n_occ == occ.size:
        sentinel = math.inf if n_occ == 0 else -math.inf
        phi = np.full((h, w), sentinel)
        nearest = np.full((h, w, 2), -1, dtype=np.int64)
        phi.setflags(write=False)
        nearest.setflags(write=False)
        return SignedDistanceField(phi, nearest, grid)

    cls = occ.ravel().tolist()
    n = h * w
    big = 1 << 62
    d2 = [big] * n
    px = [-1] * n
    py = [-1] * n

    def sweep(rows, cols, offsets):
        for iy in rows:
            base = iy * w
            for ix in cols:
                k = base + ix
                ck = cls[k]
                best = d2[k]
                bx = px[k]
                by = py[k]
                for dx, dy in offsets:
                    jx = ix + dx
                    jy = iy + dy
                    if jx < 0 or jx >= w or jy < 0 or jy >= h:
                        continue
                    j = jy * w + jx
                    if cls[j] != ck:
                        cx, cy = jx, jy
                    else:
                        cx = px[j]
                        if cx < 0:
                            continue
                        cy = py[j]
                    ex = cx - ix
                    ey = cy - iy
                    dd = ex * ex + ey * ey
                    if dd < best:
                        best, bx, by = dd, cx, cy
                d2[k] = best
                px[k] = bx
                py[k] = by

    sweep(range(h), range(w), _FORWARD)
    sweep(range(h - 1, -1, -1), range(w - 1, -1, -1), _BACKWARD)
    # A second round settles pointers that had to travel against both scans.
    sweep(range(h), range(w), _FORWARD)
    sweep(range(h - 1, -1, -1), range(w - 1, -1, -1), _BACKWARD)

    dist = np.sqrt(np.array(d2, dtype=float)).reshape(h, w) * grid.cell_size
    phi = np.where(occ, -dist, dist)
    nearest = np.stack([np.array(px).reshape(h, w), np.array(py).reshape(h, w)], axis=-1)
    phi.setflags(write=False)
    nearest.setflags(write=False)
    return SignedDistanceField(phi, nearest, grid)


def phi_at(sdf: SignedDistanceField, x: Sequence[float]) -> float:
    """phi of the cell containing ``x`` (no interpolation)."""
    return sdf.value(sdf.grid.checked_cell(x))


def nearest_boundary_cell(sdf: SignedDistanceField, cell: Cell) -> Cell:
    """Nearest opposite-class cell to ``cell``, lowest ``(iy, ix)`` on ties.

    The stored pointer only bounds the search radius; the answer comes from
    an exhaustive scan of the window that bound admits, so it is exact.
    """
    grid = sdf.grid
    if not grid.has_boundary:
        raise NoBoundaryError("map has no boundary between free and occupied cells")
    ix, iy = cell
    nx, ny = (int(v) for v in sdf.nearest[iy, ix])
    r2 = (nx - ix) ** 2 + (ny - iy) ** 2
    r = math.isqrt(r2)
    x0, x1 = max(ix - r, 0), min(ix + r + 1, grid.width)
    y0, y1 = max(iy - r, 0), min(iy + r + 1, grid.height)
    window = grid.occupancy[y0:y1, x0:x1] != grid.occupancy[iy, ix]
    jy, jx = np.nonzero(window)
    jx = jx + x0
    jy = jy + y0
    dd = (jx - ix) ** 2 + (jy - iy) ** 2
    # lexsort: last key is primary -> distance, then row, then column
    k = np.lexsort((jx, jy, dd))[0]
    return int(jx[k]), int(jy[k])


def nearest_boundary(sdf: SignedDistanceField, x: Sequence[float]) -> Vec:
    """World center of the nearest opposite-class cell to ``c(x)``."""
    cell = sdf.grid.checked_cell(x)
    return sdf.grid.center(nearest_boundary_cell(sdf, cell))


def sdf_gradient(sdf: SignedDistanceField, x: Sequence[float]) -> Vec:
    """Unit central-difference gradient of phi at ``c(x)``.

    One-sided differences are used on the map border.  Raises
    :class:`DegenerateGradientError` when the gradient is zero or undefined.
    """
    grid = sdf.grid
    ix, iy = grid.checked_cell(x)
    phi = sdf.phi

    def diff(lo_cell, hi_cell, span):
        return (phi[hi_cell[1], hi_cell[0]] - phi[lo_cell[1], lo_cell[0]]) / span

    if grid.width == 1:
        gx = 0.0
    else:
        lo = max(ix - 1, 0)
        hi = min(ix + 1, grid.width - 1)
        gx = diff((lo, iy), (hi, iy), (hi - lo) * grid.cell_size)
    if grid.height == 1:
        gy = 0.0
    else:
        lo = max(iy - 1, 0)
        hi = min(iy + 1, grid.height - 1)
        gy = diff((ix, lo), (ix, hi), (hi - lo) * grid.cell_size)
    norm = math.hypot(gx, gy)
    if not math.isfinite(norm) or norm == 0.0:
        raise DegenerateGradientError(f"gradient vanishes at cell {(ix, iy)}")
    return gx / norm, gy / norm


def raster_ray(
    grid: GridMap, x: Sequence[float], v: Sequence[float], d_max: float
) -> list[Cell]:
    """Cells crossed by the ray ``x + t v/|v|``, ``0 <= t < d_max``, in order.

    Grid traversal in the style of Amanatides and Woo: every cell whose
    interior the ray passes through is reported, so consecutive cells share
    an edge.  Where the ray crosses a grid vertex exactly it steps diagonally
    (the two side cells are touched in a single point only).  The walk stops
    at ``d_max`` or at the map border; a ray starting off-map yields ``[]``.
    """
    norm = math.hypot(v[0], v[1])
    if norm == 0.0 or not d_max > 0:
        raise ValueError("raster_ray needs a non-zero direction and positive length")
    ux, uy = v[0] / norm, v[1] / norm
    cs = grid.cell_size
    gx = (x[0] - grid.origin[0]) / cs + 0.5
    gy = (x[1] - grid.origin[1]) / cs + 0.5
    ix, iy = math.floor(gx), math.floor(gy)
    if not grid.in_grid((ix, iy)):
        return []
    limit = d_max / cs

    def axis(g, i, u):
        if u > 0:
            return 1, (i + 1 - g) / u, 1 / u
        if u < 0:
            return -1, (g - i) / -u, -1 / u
        return 0, math.inf, math.inf

    sx, tx, dtx = axis(gx, ix, ux)
    sy, ty, dty = axis(gy, iy, uy)
    cells = [(ix, iy)]
    while True:
        t = min(tx, ty)
        if t >= limit:
            break
        if math.isclose(tx, ty, rel_tol=1e-9, abs_tol=1e-12):
            ix += sx
            iy += sy
            tx += dtx
            ty += dty
        elif tx < ty:
            ix += sx
            tx += dtx
        else:
            iy += sy
            ty += dty
        if not grid.in_grid((ix, iy)):
            break
        cells.append((ix, iy))
    return cells


def obstacle_distance(sdf: SignedDistanceField, x: Sequence[float]) -> float:
    """Exact Euclidean distance from point ``x`` to the union of occupied cells.

    Occupied cells are treated as closed squares.  Returns ``inf`` on an
    obstacle-free map and ``0`` inside an occupied cell.
    """
    grid = sdf.grid
    ix, iy = grid.checked_cell(x)
    if grid.occupancy[iy, ix]:
        return 0.0
    if grid.n_occupied == 0:
        return math.inf
    cs = grid.cell_size
    gx = (x[0] - grid.origin[0]) / cs
    gy = (x[1] - grid.origin[1]) / cs
    nx, ny = (int(v) for v in sdf.nearest[iy, ix])
    upper = math.hypot(max(abs(gx - nx) - 0.5, 0.0), max(abs(gy - ny) - 0.5, 0.0))
    # Any square closer than ``upper`` has its center within upper + half diagonal.
    reach = upper + _SQRT1_2
    x0 = max(math.floor(gx - reach), 0)
    x1 = min(math.ceil(gx + reach) + 1, grid.width)
    y0 = max(math.floor(gy - reach), 0)
    y1 = min(math.ceil(gy + reach) + 1, grid.height)
    jy, jx = np.nonzero(grid.occupancy[y0:y1, x0:x1])
    ex = np.maximum(np.abs(jx + (x0 - gx)) - 0.5, 0.0)
    ey = np.maximum(np.abs(jy + (y0 - gy)) - 0.5, 0.0)
    best = float(np.sqrt((ex * ex + ey * ey).min()))
    return min(best, upper) * cs
