"""Poses, trajectories and SE(2) helpers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import SchemaError

TWO_PI = 2.0 * math.pi


def normalize_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.remainder(theta, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def shortest_angle(theta_a: float, theta_b: float) -> float:
    """Signed shortest rotation taking ``theta_a`` to ``theta_b``, in (-pi, pi]."""
    return normalize_angle(theta_b - theta_a)


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    def with_position(self, x: float, y: float) -> Pose:
        return Pose(x, y, self.theta)

    def with_theta(self, theta: float) -> Pose:
        return Pose(self.x, self.y, theta)


@dataclass(frozen=True)
class RobotModel:
    """Disc robot of diameter ``r``."""

    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"robot size must be positive, got {self.r}")

    @property
    def radius(self) -> float:
        return self.r / 2


@dataclass(frozen=True)
class Trajectory:
    poses: tuple[Pose, ...]
    intervals: tuple[float, ...]

    def __post_init__(self):
        poses = tuple(self.poses)
        intervals = tuple(float(dt) for dt in self.intervals)
        if len(poses) < 2:
            raise ValueError("a trajectory needs at least two poses")
        if len(intervals) != len(poses) - 1:
            raise ValueError(
                f"expected {len(poses) - 1} time intervals for {len(poses)} poses, got {len(intervals)}"
            )
        bad = [dt for dt in intervals if not (dt > 0 and math.isfinite(dt))]
        if bad:
            raise ValueError(f"time intervals must be positive and finite, got {bad[0]!r}")
        object.__setattr__(self, "poses", poses)
        object.__setattr__(self, "intervals", intervals)

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def n_segments(self) -> int:
        return len(self.intervals)

    def segments(self) -> Iterable[tuple[Pose, Pose, float]]:
        return zip(self.poses[:-1], self.poses[1:], self.intervals)

    def to_records(self) -> list[dict]:
        records = []
        for i, p in enumerate(self.poses):
            rec = {"x": p.x, "y": p.y, "theta": p.theta}
            if i < len(self.intervals):
                rec["dt_to_next"] = self.intervals[i]
            records.append(rec)
        return records

    @classmethod
    def from_records(cls, records: Sequence[dict]) -> Trajectory:
        if not isinstance(records, list) or len(records) < 2:
            raise SchemaError("trajectory document must be a JSON array of at least two records")
        poses, dts = [], []
        for i, rec in enumerate(records):
            try:
                poses.append(Pose(rec["x"], rec["y"], rec["theta"]))
                if i < len(records) - 1:
                    dts.append(rec["dt_to_next"])
            except (KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad trajectory record {i}: {exc}") from exc
        try:
            return cls(tuple(poses), tuple(dts))
        except ValueError as exc:
            raise SchemaError(str(exc)) from exc

    def dumps(self) -> str:
        # repr-precision floats so a reload is bit-identical
        return json.dumps(self.to_records(), indent=1)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps() + "\n")

    @classmethod
    def load(cls, path: str | Path) -> Trajectory:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
        return cls.from_records(doc)


def pose_delta(p_a: Pose, p_b: Pose) -> tuple[float, float]:
    """Euclidean position difference and unsigned shortest-arc heading difference."""
    return math.hypot(p_b.x - p_a.x, p_b.y - p_a.y), abs(shortest_angle(p_a.theta, p_b.theta))


def midpoint(p_a: Pose, p_b: Pose) -> Pose:
    """Linear midpoint of position; heading halfway along the shortest arc.

    For exactly opposite headings the arc is +pi, so the midpoint heading is
    ``theta_a + pi/2``.
    """
    dth = shortest_angle(p_a.theta, p_b.theta)
    return Pose((p_a.x + p_b.x) / 2, (p_a.y + p_b.y) / 2, p_a.theta + dth / 2)


def total_duration(t: Trajectory) -> float:
    return math.fsum(t.intervals)
