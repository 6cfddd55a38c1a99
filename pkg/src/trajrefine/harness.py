"""Scenario files, the plan -> correct -> refine pipeline, and suite aggregation.

Scenario JSON (one object per file)::

    {
      "name": "corridor_w04_l040",          # optional, defaults to the file stem
      "map": "corridor_w04_l040.map",       # path relative to the scenario file
      "map_format": {"cell_size": 0.1, "origin": [0, 0]},   # PGM maps only
      "start": [x, y, theta],
      "goal": [x, y, theta],
      "robot_r": 0.4,                       # robot diameter, meters
      "v_ref": 0.5,                         # m/s, sets the seed time intervals
      "coarse_spacing": null,               # meters, null -> 4 * robot_r
      "planner": {"clearance_weight": 2.0, "clearance_radius": null, "keep_turns": true,
                  "min_clearance": 0.0},
      "refinement": {"max_depth": 12, "max_total_poses": 4096,
                     "epsilon_clearance": null, "pin_endpoints": false,
                     "correction": {"d_max": null, "boundary_band": null}},
      "seed": 0,
      "regions": {"passage": [xmin, ymin, xmax, ymax]}
    }

Only ``map``, ``start``, ``goal`` and ``robot_r`` are required.
"""

from __future__ import annotations

import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

from .ccd import CORRECTION_FAILED, RefinementConfig, RefinementReport, default_epsilon, refine
from .correction import correct_trajectory
from .errors import (
    CorrectionFailed,
    DegenerateDirectionError,
    MapFormatError,
    NoPathError,
    OutOfMapError,
    RejectedInput,
    SchemaError,
)
from .grid_map import GridMap, SignedDistanceField, build_sdf
from .initializer import plan_global_path, seed_trajectory
from .mapio import load_map
from .oracle import trajectory_collides
from .trajectory import RobotModel, Trajectory, total_duration

NO_PATH = "no_path"
INVALID_INPUT = "invalid_input"
ORACLE_STEP = 1e-3


@dataclass(frozen=True)
class PlannerConfig:
    """Global path options; ``clearance_radius`` ``None`` means twice the robot size."""

    clearance_weight: float = 2.0
    clearance_radius: float | None = None
    keep_turns: bool = True
    min_clearance: float = 0.0


@dataclass
class Scenario:
    name: str
    map_path: Path
    start: tuple[float, float, float]
    goal: tuple[float, float, float]
    robot_r: float
    v_ref: float = 0.5
    coarse_spacing: float | None = None
    refinement: RefinementConfig = field(default_factory=RefinementConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    seed: int = 0
    cell_size: float | None = None
    origin: tuple[float, float] | None = None
    regions: dict[str, list[float]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Any, base_dir: str | Path = ".", name: str = "scenario") -> Scenario:
        if not isinstance(doc, dict):
            raise SchemaError("scenario must be a JSON object")
        missing = {"map", "start", "goal", "robot_r"} - doc.keys()
        if missing:
            raise SchemaError(f"scenario is missing {sorted(missing)}")
        known = {"name", "map", "map_format", "start", "goal", "robot_r", "v_ref", "coarse_spacing",
                 "planner", "refinement", "seed", "regions"}
        extra = doc.keys() - known
        if extra:
            raise SchemaError(f"unknown scenario fields {sorted(extra)}")
        try:
            fmt = doc.get("map_format") or {}
            sc = cls(
                name=str(doc.get("name", name)),
                map_path=Path(base_dir) / doc["map"],
                start=_pose3(doc["start"], "start"),
                goal=_pose3(doc["goal"], "goal"),
                robot_r=_positive(doc["robot_r"], "robot_r"),
                v_ref=_positive(doc.get("v_ref", 0.5), "v_ref"),
                coarse_spacing=None if doc.get("coarse_spacing") is None
                else _positive(doc["coarse_spacing"], "coarse_spacing"),
                refinement=RefinementConfig.from_dict(doc.get("refinement") or {}),
                planner=PlannerConfig(**(doc.get("planner") or {})),
                seed=int(doc.get("seed", 0)),
                cell_size=None if fmt.get("cell_size") is None else _positive(fmt["cell_size"], "cell_size"),
                origin=None if fmt.get("origin") is None else tuple(float(v) for v in fmt["origin"]),
                regions={k: [float(v) for v in box] for k, box in (doc.get("regions") or {}).items()},
            )
        except SchemaError:
            raise
        except (TypeError, ValueError, KeyError) as exc:
            raise SchemaError(f"bad scenario value: {exc}") from exc
        for key, box in sc.regions.items():
            if len(box) != 4:
                raise SchemaError(f"region {key!r} must be [xmin, ymin, xmax, ymax]")
        return sc

    @classmethod
    def load(cls, path: str | Path) -> Scenario:
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_dict(doc, path.parent, path.stem)

    def to_dict(self, base_dir: str | Path | None = None) -> dict[str, Any]:
        ref = self.refinement
        doc: dict[str, Any] = {
            "name": self.name,
            "map": str(self.map_path if base_dir is None else _relative(self.map_path, base_dir)),
            "start": list(self.start),
            "goal": list(self.goal),
            "robot_r": self.robot_r,
            "v_ref": self.v_ref,
            "coarse_spacing": self.coarse_spacing,
            "planner": asdict(self.planner),
            "refinement": {
                "max_depth": ref.max_depth,
                "max_total_poses": ref.max_total_poses,
                "epsilon_clearance": ref.epsilon_clearance,
                "pin_endpoints": ref.pin_endpoints,
                "correction": asdict(ref.correction),
            },
            "seed": self.seed,
        }
        if self.cell_size is not None or self.origin is not None:
            doc["map_format"] = {"cell_size": self.cell_size, "origin": list(self.origin or (0.0, 0.0))}
        if self.regions:
            doc["regions"] = self.regions
        return doc


def _relative(path: Path, base: str | Path) -> Path:
    try:
        return Path(path).relative_to(base)
    except ValueError:
        return Path(path)


def _pose3(v, what) -> tuple[float, float, float]:
    if not isinstance(v, (list, tuple)) or len(v) not in (2, 3):
        raise SchemaError(f"{what} must be [x, y] or [x, y, theta]")
    out = tuple(float(a) for a in v)
    return out if len(out) == 3 else (*out, 0.0)


def _positive(v, what) -> float:
    x = float(v)
    if not x > 0 or not math.isfinite(x):
        raise SchemaError(f"{what} must be a positive number")
    return x


@dataclass
class RunMetrics:
    name: str
    status: str
    message: str = ""
    trial: int = 0
    seed: int = 0
    planning_time_ms: float = 0.0
    pose_count_initial: int = 0
    pose_count_final: int = 0
    bisections: int = 0
    corrections: int = 0
    oracle_verified: bool = False
    total_duration_initial: float = 0.0
    total_duration: float = 0.0
    spacing_inside: float | None = None
    spacing_outside: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def counters(self) -> dict[str, Any]:
        """Everything except wall-clock timing."""
        d = self.to_dict()
        d.pop("planning_time_ms")
        return d


@dataclass
class RunResult:
    """Full outcome of one pipeline run; ``metrics`` is the summary row."""

    metrics: RunMetrics
    scenario: Scenario
    grid: GridMap | None = None
    seed_trajectory: Trajectory | None = None
    corrected_seed: Trajectory | None = None
    report: RefinementReport | None = None
    seed_corrections: list[int] = field(default_factory=list)
    orientation_updates: list = field(default_factory=list, repr=False)

    @property
    def final(self) -> Trajectory | None:
        return None if self.report is None else self.report.trajectory


def mean_spacing(t: Trajectory, box: list[float]) -> tuple[float | None, float | None]:
    """Mean pose-to-pose distance for segments whose midpoint lies inside / outside ``box``."""
    x0, y0, x1, y1 = box
    inside, outside = [], []
    for a, b, _ in t.segments():
        mx, my = (a.x + b.x) / 2, (a.y + b.y) / 2
        d = math.dist(a.position, b.position)
        (inside if x0 <= mx <= x1 and y0 <= my <= y1 else outside).append(d)
    return (statistics.fmean(inside) if inside else None, statistics.fmean(outside) if outside else None)


def execute(
    sc: Scenario,
    grid: GridMap | None = None,
    sdf: SignedDistanceField | None = None,
    trial: int = 0,
    verify: bool = True,
    record_trace: bool = False,
) -> RunResult:
    """Run one scenario end to end; every pipeline failure ends up in ``metrics.status``."""
    metrics = RunMetrics(name=sc.name, status=INVALID_INPUT, trial=trial, seed=sc.seed)
    res = RunResult(metrics, sc)
    try:
        if grid is None:
            grid = load_map(sc.map_path, sc.cell_size, sc.origin)
        if sdf is None:
            sdf = build_sdf(grid)
        res.grid = grid
        robot = RobotModel(sc.robot_r)
        pc = sc.planner
        radius = pc.clearance_radius if pc.clearance_radius is not None else 2 * robot.r
        path = plan_global_path(grid, sc.start[:2], sc.goal[:2], sdf, pc.clearance_weight, radius, pc.min_clearance)
        seed = seed_trajectory(path, robot, sc.v_ref, sc.coarse_spacing, keep_turns=pc.keep_turns)
        if sc.refinement.pin_endpoints:
            # Pinned ends take the scenario's headings instead of the chord directions.
            seed = Trajectory(
                (seed.poses[0].with_theta(sc.start[2]), *seed.poses[1:-1], seed.poses[-1].with_theta(sc.goal[2])),
                seed.intervals,
            )
    except NoPathError as exc:
        metrics.status, metrics.message = NO_PATH, str(exc)
        return res
    except (OutOfMapError, ValueError) as exc:
        metrics.status, metrics.message = INVALID_INPUT, str(exc)
        return res

    res.seed_trajectory = seed
    metrics.pose_count_initial = len(seed)
    metrics.total_duration_initial = total_duration(seed)
    cfg = sc.refinement
    if record_trace:
        cfg = replace(cfg, record_trace=True)
    eps = default_epsilon(sdf) if cfg.epsilon_clearance is None else cfg.epsilon_clearance

    tic = time.perf_counter()
    try:
        fixed = correct_trajectory(seed, sdf, robot, cfg.correction, eps, cfg.pin_endpoints)
        report = refine(fixed.trajectory, sdf, robot, cfg)
    except (CorrectionFailed, DegenerateDirectionError, OutOfMapError, RejectedInput) as exc:
        metrics.planning_time_ms = (time.perf_counter() - tic) * 1e3
        metrics.status, metrics.message = CORRECTION_FAILED, str(exc)
        return res
    metrics.planning_time_ms = (time.perf_counter() - tic) * 1e3

    res.corrected_seed = fixed.trajectory
    res.seed_corrections = fixed.corrected
    res.orientation_updates = fixed.orientation_updates
    res.report = report
    final = report.trajectory
    metrics.status, metrics.message = report.status, report.message
    metrics.pose_count_final = len(final)
    metrics.bisections = report.bisections
    metrics.corrections = len(fixed.corrected) + report.corrections
    metrics.total_duration = total_duration(final)
    if "passage" in sc.regions:
        metrics.spacing_inside, metrics.spacing_outside = mean_spacing(final, sc.regions["passage"])
    if verify and report.certified:
        metrics.oracle_verified = not trajectory_collides(final.poses, grid, robot, ORACLE_STEP)
    return res


def run_scenario(sc: Scenario, **kwargs) -> RunMetrics:
    return execute(sc, **kwargs).metrics


@dataclass
class SuiteReport:
    rows: list[RunMetrics]

    @property
    def aggregate(self) -> dict[str, Any]:
        n = len(self.rows)
        ok = [r for r in self.rows if r.status == "certified"]
        times = [r.planning_time_ms for r in self.rows]
        return {
            "runs": n,
            "certified": len(ok),
            "verified": sum(r.oracle_verified for r in ok),
            "success_rate": len(ok) / n if n else 0.0,
            "mean_planning_time_ms": statistics.fmean(times) if times else 0.0,
            "max_planning_time_ms": max(times, default=0.0),
        }

    def to_dict(self) -> dict[str, Any]:
        return {"aggregate": self.aggregate, "rows": [r.to_dict() for r in self.rows]}


def load_scenarios(directory: str | Path) -> list[Scenario]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"scenario directory {d} does not exist")
    return [Scenario.load(p) for p in sorted(d.glob("*.json"))]


def run_suite(directory: str | Path, trials: int = 1, seed: int | None = None, verify: bool = True) -> SuiteReport:
    """Run every ``*.json`` scenario in ``directory`` ``trials`` times.

    Maps and their distance fields are loaded once and shared between runs.
    ``seed`` overrides the scenario seeds (trial ``k`` uses ``seed + k``).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    scenarios = load_scenarios(directory)
    cache: dict[tuple, tuple[GridMap, SignedDistanceField]] = {}
    rows = []
    for sc in scenarios:
        key = (str(sc.map_path), sc.cell_size, sc.origin)
        try:
            if key not in cache:
                grid = load_map(sc.map_path, sc.cell_size, sc.origin)
                cache[key] = (grid, build_sdf(grid))
        except (OSError, MapFormatError) as exc:
            for k in range(trials):
                rows.append(RunMetrics(sc.name, INVALID_INPUT, str(exc), trial=k, seed=sc.seed))
            continue
        grid, sdf = cache[key]
        for k in range(trials):
            if seed is not None:
                sc.seed = seed + k
            rows.append(execute(sc, grid, sdf, trial=k, verify=verify).metrics)
    return SuiteReport(rows)


def trajectory_document(res: RunResult) -> dict[str, Any]:
    doc: dict[str, Any] = {"metrics": res.metrics.to_dict()}
    if res.report is not None:
        doc["corrected_indices"] = list(res.report.corrected_indices)
        doc["trajectory"] = res.report.trajectory.to_records()
    if res.seed_trajectory is not None:
        doc["initial_trajectory"] = res.seed_trajectory.to_records()
    return doc

