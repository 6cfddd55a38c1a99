"""Certified refinement of coarse robot trajectories on occupancy grids.

A coarse trajectory is checked segment by segment with a conservative
continuous collision test; failing segments are bisected, colliding poses
are pushed out along a separation direction, and headings are re-fitted to
constant-curvature arcs.
"""

from .ccd import (
    RefinementConfig,
    RefinementReport,
    ccd_segment_test,
    certify,
    clearance,
    displacement_bound,
    refine,
)
from .correction import CorrectionConfig, correct_pose, correct_trajectory, separation_direction
from .grid_map import GridMap, SignedDistanceField, build_sdf, nearest_boundary, raster_ray, sdf_gradient
from .initializer import plan_global_path, seed_trajectory
from .kinematics import arc_residual, update_orientations
from .trajectory import Pose, RobotModel, Trajectory, midpoint, total_duration

__version__ = "0.1.0"

__all__ = [
    "CorrectionConfig", "GridMap", "Pose", "RefinementConfig", "RefinementReport", "RobotModel",
    "SignedDistanceField", "Trajectory", "arc_residual", "build_sdf", "ccd_segment_test", "certify",
    "clearance", "correct_pose", "correct_trajectory", "displacement_bound", "midpoint",
    "nearest_boundary", "plan_global_path", "raster_ray", "refine", "sdf_gradient", "seed_trajectory",
    "separation_direction", "total_duration", "update_orientations",
]
