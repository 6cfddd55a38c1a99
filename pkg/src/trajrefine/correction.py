"""Relocating collision-risky poses along a separation direction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    CorrectionFailed,
    DegenerateDirectionError,
    DegenerateGradientError,
    NoCorrectionNeeded,
)
from .grid_map import (
    Cell,
    SignedDistanceField,
    Vec,
    nearest_boundary,
    obstacle_distance,
    phi_at,
    raster_ray,
    sdf_gradient,
)
from .kinematics import update_orientations
from .trajectory import Pose, RobotModel, Trajectory

INSIDE = "inside"
BOUNDARY = "boundary"
NEAR = "near"


@dataclass(frozen=True)
class CorrectionConfig:
    """``None`` fields resolve to ``2 r`` (ray length) and one cell size (band)."""

    d_max: float | None = None
    boundary_band: float | None = None

    def __post_init__(self):
        if self.d_max is not None and not self.d_max > 0:
            raise ValueError("d_max must be positive")
        if self.boundary_band is not None and self.boundary_band < 0:
            raise ValueError("boundary_band must be non-negative")

    def ray_length(self, robot: RobotModel) -> float:
        return 2 * robot.r if self.d_max is None else self.d_max

    def band(self, sdf: SignedDistanceField) -> float:
        return sdf.grid.cell_size if self.boundary_band is None else self.boundary_band


@dataclass(frozen=True)
class Correction:
    pose: Pose
    case: str
    direction: Vec
    visited: tuple[Cell, ...]
    visited_phi: tuple[float, ...] = field(repr=False)


def needs_correction(
    sdf: SignedDistanceField, x: Sequence[float], robot: RobotModel, margin: float = 0.0
) -> bool:
    """Whether the disc at ``x`` may touch an obstacle.

    True when the containing cell has ``phi <= r/2`` or the exact distance
    from ``x`` to the occupied squares is at most ``r/2 + margin``.
    """
    return phi_at(sdf, x) <= robot.radius or obstacle_distance(sdf, x) <= robot.radius + margin


def _unit(dx: float, dy: float) -> Vec:
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise DegenerateDirectionError("position coincides with its nearest boundary cell")
    return dx / n, dy / n


def classify(sdf: SignedDistanceField, x: Sequence[float], band: float) -> str:
    phi = phi_at(sdf, x)
    if phi < -band:
        return INSIDE
    if abs(phi) <= band:
        return BOUNDARY
    return NEAR


def separation_direction(
    x: Sequence[float],
    sdf: SignedDistanceField,
    robot: RobotModel,
    *,
    boundary_band: float | None = None,
    force: bool = False,
) -> Vec:
    """Unit direction that moves ``x`` toward deeper free space.

    Inside an obstacle the direction points at the nearest free cell; in the
    boundary band it follows the SDF gradient (falling back to the outward
    direction when the gradient vanishes); just outside it points away from
    the nearest occupied cell.  Raises :class:`NoCorrectionNeeded` once
    ``phi >= r/2`` unless ``force`` is set.
    """
    return _direction(x, sdf, robot, boundary_band, force)[0]


def _direction(x, sdf, robot, boundary_band, force) -> tuple[Vec, str]:
    band = sdf.grid.cell_size if boundary_band is None else boundary_band
    phi = phi_at(sdf, x)
    if phi >= robot.radius and not force:
        raise NoCorrectionNeeded(f"phi={phi:.6g} already clears r/2={robot.radius:.6g}")
    case = classify(sdf, x, band)
    b = nearest_boundary(sdf, x)
    if case == INSIDE:
        return _unit(b[0] - x[0], b[1] - x[1]), case
    if case == BOUNDARY:
        try:
            return sdf_gradient(sdf, x), case
        except DegenerateGradientError:
            pass
    # Outward direction; for a free cell b is the nearest occupied center,
    # for an occupied boundary cell it is the nearest free one.
    if phi < 0:
        return _unit(b[0] - x[0], b[1] - x[1]), case
    return _unit(x[0] - b[0], x[1] - b[1]), case


def hill_climb(sdf: SignedDistanceField, cells: Sequence[Cell]) -> list[Cell]:
    """Cells of strictly increasing phi met while walking ``cells`` in order.

    The walk steps over equal values (the side steps of a supercover line
    along an iso-distance wall) and ends at the first decrease or when the
    ray is exhausted.  The last returned cell is where the climb settles.
    """
    if not cells:
        return []
    path = [cells[0]]
    best = prev = sdf.value(cells[0])
    for cell in cells[1:]:
        value = sdf.value(cell)
        if value < prev:
            break
        if value > best:
            path.append(cell)
            best = value
        prev = value
    return path


def correct_pose_detailed(
    p: Pose,
    sdf: SignedDistanceField,
    robot: RobotModel,
    cfg: CorrectionConfig = CorrectionConfig(),
    margin: float = 0.0,
) -> Correction:
    if not needs_correction(sdf, p.position, robot, margin):
        raise NoCorrectionNeeded("pose is already clear of obstacles")
    return relocate(p, sdf, robot, cfg, margin)


def relocate(
    p: Pose,
    sdf: SignedDistanceField,
    robot: RobotModel,
    cfg: CorrectionConfig = CorrectionConfig(),
    margin: float = 0.0,
) -> Correction:
    """Ray cast and hill climb from ``p`` without first checking that it needs correction."""
    x = p.position
    v, case = _direction(x, sdf, robot, cfg.band(sdf), force=True)
    cells = raster_ray(sdf.grid, x, v, cfg.ray_length(robot))
    visited = hill_climb(sdf, cells)
    end = visited[-1]
    cx, cy = sdf.grid.center(end)
    phi_end = sdf.value(end)
    if not (phi_end > robot.radius and obstacle_distance(sdf, (cx, cy)) > robot.radius + margin):
        raise CorrectionFailed(
            f"hill climb from ({p.x:.6g}, {p.y:.6g}) stopped at cell {end} with phi={phi_end:.6g}"
        )
    return Correction(
        pose=Pose(cx, cy, p.theta),
        case=case,
        direction=v,
        visited=tuple(visited),
        visited_phi=tuple(sdf.value(c) for c in visited),
    )


def correct_pose(
    p: Pose,
    sdf: SignedDistanceField,
    robot: RobotModel,
    cfg: CorrectionConfig = CorrectionConfig(),
    margin: float = 0.0,
) -> Pose:
    """Move ``p`` to the cell center where clearance stops growing along its separation ray.

    The heading is kept.  Raises :class:`CorrectionFailed` when the final
    cell is still within ``r/2 + margin`` of an obstacle.
    """
    return correct_pose_detailed(p, sdf, robot, cfg, margin).pose


@dataclass
class PassResult:
    trajectory: Trajectory
    corrected: list[int]
    orientation_updates: list[tuple[tuple[Pose, Pose, Pose], tuple[Pose, Pose, Pose]]]


def correct_trajectory(
    t: Trajectory,
    sdf: SignedDistanceField,
    robot: RobotModel,
    cfg: CorrectionConfig = CorrectionConfig(),
    margin: float = 0.0,
    pin_endpoints: bool = False,
) -> PassResult:
    """Correct every pose that needs it, in order, re-fitting headings around each one.

    After pose ``i`` moves, the triple centred on ``i`` (clamped to the
    interior for the first and last pose) gets :func:`update_orientations`;
    ``pin_endpoints`` keeps the headings of the first and last pose.
    Time intervals are kept.  Raises :class:`CorrectionFailed` (or
    :class:`DegenerateDirectionError`) when a pose cannot be cleared.
    """
    poses = list(t.poses)
    corrected = []
    updates = []
    for i in range(len(poses)):
        if not needs_correction(sdf, poses[i].position, robot, margin):
            continue
        poses[i] = correct_pose(poses[i], sdf, robot, cfg, margin)
        corrected.append(i)
        if len(poses) >= 3:
            c = min(max(i, 1), len(poses) - 2)
            before = (poses[c - 1], poses[c], poses[c + 1])
            after = update_orientations(
                *before,
                pin_prev=pin_endpoints and c - 1 == 0,
                pin_next=pin_endpoints and c + 1 == len(poses) - 1,
            )
            poses[c - 1], poses[c], poses[c + 1] = after
            updates.append((before, after))
    return PassResult(Trajectory(tuple(poses), t.intervals), corrected, updates)
