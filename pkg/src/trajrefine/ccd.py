"""Conservative segment-wise CCD and adaptive bisection refinement."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Any

from .correction import CorrectionConfig, correct_pose, needs_correction
from .errors import CorrectionFailed, DegenerateDirectionError, OutOfMapError, RejectedInput
from .grid_map import SignedDistanceField, obstacle_distance, phi_at
from .kinematics import update_orientations
from .trajectory import Pose, RobotModel, Trajectory, midpoint, pose_delta

CERTIFIED = "certified"
DEPTH_EXHAUSTED = "depth_exhausted"
CORRECTION_FAILED = "correction_failed"


def displacement_bound(p_a: Pose, p_b: Pose, robot: RobotModel) -> float:
    """Upper bound on how far any point of the robot travels: ``dd + (r/2) dtheta``."""
    dd, dth = pose_delta(p_a, p_b)
    return dd + robot.radius * dth


def nominal_clearance(p: Pose, sdf: SignedDistanceField, robot: RobotModel) -> float:
    """Cell-level clearance ``max(phi(c(x)) - r/2, 0)``.

    Useful for reporting; it can overstate the true clearance by up to a
    cell diagonal, so the CCD test does not use it.
    """
    return max(phi_at(sdf, p.position) - robot.radius, 0.0)


def clearance(p: Pose, sdf: SignedDistanceField, robot: RobotModel) -> float:
    """Distance between the robot disc at ``p`` and the occupied cells, clamped at 0.

    Raises :class:`OutOfMapError` off the map.  ``inf`` on an obstacle-free map.
    """
    return max(obstacle_distance(sdf, p.position) - robot.radius, 0.0)


def default_epsilon(sdf: SignedDistanceField) -> float:
    return sdf.grid.cell_size / 4


def passes_ccd(bound: float, c_a: float, c_b: float, epsilon: float) -> bool:
    return c_a > 0 and c_b > 0 and bound < c_a + c_b - epsilon


def ccd_segment_test(
    p_a: Pose,
    p_b: Pose,
    sdf: SignedDistanceField,
    robot: RobotModel,
    epsilon: float | None = None,
) -> bool:
    """Certify the straight motion between two poses as collision-free.

    Accepts iff both endpoint clearances are positive and the displacement
    bound is below their sum minus ``epsilon`` (default a quarter cell).
    ``True`` is a certificate; ``False`` only means "not proven".
    """
    eps = default_epsilon(sdf) if epsilon is None else epsilon
    return passes_ccd(
        displacement_bound(p_a, p_b, robot),
        clearance(p_a, sdf, robot),
        clearance(p_b, sdf, robot),
        eps,
    )


@dataclass(frozen=True)
class RefinementConfig:
    max_depth: int = 12
    max_total_poses: int = 4096
    epsilon_clearance: float | None = None
    correction: CorrectionConfig = field(default_factory=CorrectionConfig)
    pin_endpoints: bool = False
    record_trace: bool = False

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.max_total_poses < 2:
            raise ValueError("max_total_poses must be at least 2")
        if self.epsilon_clearance is not None and self.epsilon_clearance < 0:
            raise ValueError("epsilon_clearance must be non-negative")

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> RefinementConfig:
        doc = dict(doc)
        corr = doc.pop("correction", None)
        if corr is not None:
            doc["correction"] = CorrectionConfig(**corr)
        return cls(**doc)


@dataclass(frozen=True)
class SegmentEntry:
    start_index: int
    end_index: int
    dt: float
    bound_L: float
    depth: int = 0


@dataclass
class RefinementReport:
    trajectory: Trajectory
    status: str
    segments_tested: int = 0
    bisections: int = 0
    corrections: int = 0
    max_depth: int = 0
    message: str = ""
    corrected_indices: tuple[int, ...] = ()
    trace: list[dict] | None = field(default=None, repr=False)

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status,
            "message": self.message,
            "segments_tested": self.segments_tested,
            "bisections": self.bisections,
            "corrections": self.corrections,
            "max_depth": self.max_depth,
            "pose_count": len(self.trajectory),
            "corrected_indices": list(self.corrected_indices),
            "trajectory": self.trajectory.to_records(),
        }


class _Chain:
    """Doubly linked pose list; segment ``k`` runs from node ``k`` to ``nxt[k]``."""

    def __init__(self, poses, dts, clear):
        n = len(poses)
        self.poses = list(poses)
        self.clear = list(clear)
        self.nxt = list(range(1, n)) + [-1]
        self.prv = [-1] + list(range(n - 1))
        # Node order keys; halving stays exact in binary floats for realistic depths.
        self.key = [float(i) for i in range(n)]
        self.dt = list(dts) + [0.0]
        self.depth = [0] * n
        self.version = [0] * n

    def add(self, pose, clear, key):
        self.poses.append(pose)
        self.clear.append(clear)
        self.nxt.append(-1)
        self.prv.append(-1)
        self.key.append(key)
        self.dt.append(0.0)
        self.depth.append(0)
        self.version.append(0)
        return len(self.poses) - 1

    def order(self):
        k = 0
        out = []
        while k >= 0:
            out.append(k)
            k = self.nxt[k]
        return out


def refine(
    t: Trajectory,
    sdf: SignedDistanceField,
    robot: RobotModel,
    cfg: RefinementConfig = RefinementConfig(),
) -> RefinementReport:
    """Refine ``t`` until every segment passes the conservative CCD test.

    Segments are processed longest bound first.  A rejected segment is split
    at its SE(2) midpoint; a midpoint within ``r/2`` of an obstacle is moved
    by pose correction, the triple's headings are re-fitted to arcs and the
    parent's time interval is shared in proportion to the two new bounds.

    Raises :class:`RejectedInput` if an input pose is off-map or in contact.
    Failures while refining are reported through ``status``.
    """
    eps = default_epsilon(sdf) if cfg.epsilon_clearance is None else cfg.epsilon_clearance
    clear = []
    for i, p in enumerate(t.poses):
        try:
            c = clearance(p, sdf, robot)
        except OutOfMapError as exc:
            raise RejectedInput(f"pose {i} is outside the map") from exc
        if not c > 0:
            raise RejectedInput(f"pose {i} at ({p.x:.6g}, {p.y:.6g}) is not collision-free")
        clear.append(c)

    ch = _Chain(t.poses, t.intervals, clear)
    last_original = len(t.poses) - 1
    trace: list[dict] | None = [] if cfg.record_trace else None
    heap: list[tuple[float, float, int, int]] = []
    corrected: set[int] = set()

    def bound(k):
        return displacement_bound(ch.poses[k], ch.poses[ch.nxt[k]], robot)

    def push(k, L=None):
        ch.version[k] += 1
        heapq.heappush(heap, (-(bound(k) if L is None else L), ch.key[k], ch.version[k], k))

    for k in range(len(t.poses) - 1):
        push(k)

    status = CERTIFIED
    message = ""
    tested = bisections = n_corr = deepest = 0

    while heap:
        negL, _, ver, k = heapq.heappop(heap)
        if ver != ch.version[k]:
            continue
        L = -negL
        j = ch.nxt[k]
        tested += 1
        if trace is not None:
            live = [-e[0] for e in heap if e[2] == ch.version[e[3]]]
            trace.append({"event": "pop", "L": L, "max_remaining": max(live, default=-math.inf)})
        if passes_ccd(L, ch.clear[k], ch.clear[j], eps):
            continue

        d = ch.depth[k]
        if d >= cfg.max_depth:
            status = DEPTH_EXHAUSTED
            message = (
                f"segment ({ch.poses[k].x:.6g}, {ch.poses[k].y:.6g}) -> "
                f"({ch.poses[j].x:.6g}, {ch.poses[j].y:.6g}) still uncertified at depth {d}"
            )
            break
        if len(ch.poses) >= cfg.max_total_poses:
            status = DEPTH_EXHAUSTED
            message = f"pose budget of {cfg.max_total_poses} exhausted"
            break

        p_a, p_b = ch.poses[k], ch.poses[j]
        mid = midpoint(p_a, p_b)
        was_corrected = False
        try:
            # A midpoint whose clearance is within the slack could never be
            # certified, so it is corrected like a colliding one.
            if needs_correction(sdf, mid.position, robot, eps):
                moved = correct_pose(mid, sdf, robot, cfg.correction, eps)
                if trace is not None:
                    trace.append({"event": "correct", "before": mid, "after": moved})
                mid = moved
                was_corrected = True
                n_corr += 1
        except (CorrectionFailed, DegenerateDirectionError, OutOfMapError) as exc:
            status = CORRECTION_FAILED
            message = str(exc)
            break

        pin_a = cfg.pin_endpoints and k == 0
        pin_b = cfg.pin_endpoints and j == last_original
        new_a, new_mid, new_b = update_orientations(p_a, mid, p_b, pin_prev=pin_a, pin_next=pin_b)
        if trace is not None:
            trace.append({"event": "orient", "before": (p_a, mid, p_b), "after": (new_a, new_mid, new_b)})

        m = ch.add(new_mid, clearance(new_mid, sdf, robot), (ch.key[k] + ch.key[j]) / 2)
        if was_corrected:
            corrected.add(m)
        ch.poses[k] = new_a
        ch.poses[j] = new_b
        ch.nxt[k], ch.prv[m], ch.nxt[m], ch.prv[j] = m, k, j, m

        L1 = displacement_bound(new_a, new_mid, robot)
        L2 = displacement_bound(new_mid, new_b, robot)
        dt = ch.dt[k]
        dt1 = dt * L1 / (L1 + L2) if L1 > 0 and L2 > 0 else 0.0
        if not 0 < dt1 < dt:
            dt1 = dt / 2
        ch.dt[k] = dt1
        ch.dt[m] = dt - dt1
        ch.depth[k] = ch.depth[m] = d + 1
        deepest = max(deepest, d + 1)
        push(k, L1)
        push(m, L2)
        bisections += 1

        # Heading changes at the outer poses invalidate the neighbouring
        # segments' bounds, accepted or queued; re-test them.
        if new_a.theta != p_a.theta and ch.prv[k] >= 0:
            push(ch.prv[k])
        if new_b.theta != p_b.theta and ch.nxt[j] >= 0:
            push(j)

    order = ch.order()
    index = {node: i for i, node in enumerate(order)}
    traj = Trajectory(tuple(ch.poses[k] for k in order), tuple(ch.dt[k] for k in order[:-1]))
    return RefinementReport(
        trajectory=traj,
        status=status,
        segments_tested=tested,
        bisections=bisections,
        corrections=n_corr,
        max_depth=deepest,
        message=message,
        corrected_indices=tuple(sorted(index[c] for c in corrected)),
        trace=trace,
    )


def certify(t: Trajectory, sdf: SignedDistanceField, robot: RobotModel, epsilon: float | None = None) -> list[int]:
    """Indices of segments of ``t`` that fail the CCD test (empty means certified)."""
    return [
        i for i in range(t.n_segments)
        if not ccd_segment_test(t.poses[i], t.poses[i + 1], sdf, robot, epsilon)
    ]
