"""Command-line entry point: ``trajrefine run | suite | gen-maps | verify``.

Exit codes: 0 when the command ran to completion (whatever the refinement
status), 1 on I/O errors, 2 on malformed scenario, map or trajectory files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import benchmarks
from .ccd import certify
from .errors import MapFormatError, SchemaError
from .grid_map import build_sdf
from .harness import RunMetrics, Scenario, execute, run_suite, trajectory_document
from .mapio import load_map, save_map
from .oracle import trajectory_collides
from .trajectory import RobotModel, Trajectory

EXIT_OK, EXIT_IO, EXIT_SCHEMA = 0, 1, 2


def _write_json(path: str, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def _summary(m: RunMetrics) -> str:
    verified = "verified" if m.oracle_verified else "unverified"
    line = (f"{m.name}: {m.status} ({verified}) poses {m.pose_count_initial}->{m.pose_count_final} "
            f"bisections={m.bisections} corrections={m.corrections} time={m.planning_time_ms:.2f} ms")
    return line + (f" [{m.message}]" if m.message else "")


def cmd_run(args) -> int:
    sc = Scenario.load(args.scenario)
    if args.seed is not None:
        sc.seed = args.seed
    grid = load_map(sc.map_path, sc.cell_size, sc.origin)
    res = execute(sc, grid, build_sdf(grid))
    print(_summary(res.metrics))
    if args.json:
        _write_json(args.json, trajectory_document(res))
    if args.svg:
        from .plotting import plot_run

        corrected = res.report.corrected_indices if res.report else ()
        plot_run(grid, res.final, args.svg, res.seed_trajectory, corrected, sc.name)
    return EXIT_OK


def write_csv(rows, path: str | Path) -> None:
    names = [f.name for f in fields(RunMetrics)]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names)
        w.writeheader()
        for r in rows:
            w.writerow(r.to_dict())


def cmd_suite(args) -> int:
    report = run_suite(args.directory, args.trials, args.seed)
    for r in report.rows:
        print(_summary(r))
    agg = report.aggregate
    print(f"success {agg['certified']}/{agg['runs']} ({100 * agg['success_rate']:.1f}%), "
          f"verified {agg['verified']}, mean {agg['mean_planning_time_ms']:.2f} ms, "
          f"max {agg['max_planning_time_ms']:.2f} ms")
    if args.json:
        _write_json(args.json, report.to_dict())
    if args.csv:
        write_csv(report.rows, args.csv)
    if args.svg:
        from .plotting import plot_suite

        plot_suite(report.rows, args.svg)
    return EXIT_OK


def cmd_gen_maps(args) -> int:
    out = Path(args.directory)
    out.mkdir(parents=True, exist_ok=True)
    maps = benchmarks.standard_suite(seed=args.seed or 0)
    if args.with_narrow_turns:
        maps += benchmarks.narrow_turns()
    for bm in maps:
        save_map(bm.grid, out / f"{bm.name}.map")
        sc = Scenario(bm.name, out / f"{bm.name}.map", bm.start, bm.goal, bm.robot_r,
                      seed=args.seed or 0, regions=bm.regions)
        _write_json(out / f"{bm.name}.json", sc.to_dict(out))
    print(f"wrote {len(maps)} maps and scenarios to {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    doc = json.loads(Path(args.trajectory).read_text())
    if isinstance(doc, dict):
        if "trajectory" not in doc:
            raise SchemaError("trajectory document needs a 'trajectory' list")
        doc = doc["trajectory"]
    t = Trajectory.from_records(doc)
    grid = load_map(args.map, args.cell_size, args.origin)
    robot = RobotModel(args.robot_r)
    rejected = certify(t, build_sdf(grid), robot)
    colliding = trajectory_collides(t.poses, grid, robot)
    result = {"segments": t.n_segments, "ccd_rejected": rejected, "oracle_colliding": colliding,
              "certified": not rejected, "collision_free": not colliding}
    print(f"{t.n_segments} segments: certificate {'holds' if not rejected else f'fails on {len(rejected)}'}, "
          f"oracle {'clear' if not colliding else f'collides on {len(colliding)}'}")
    if args.json:
        _write_json(args.json, result)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trajrefine", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one scenario")
    p.add_argument("scenario")
    p.add_argument("--json", metavar="OUT", help="write metrics and trajectories")
    p.add_argument("--svg", metavar="OUT", help="write a plot of the run")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="run every *.json scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--json", metavar="OUT", help="write rows and aggregate")
    p.add_argument("--csv", metavar="OUT", help="write one row per run")
    p.add_argument("--svg", metavar="OUT", help="write a summary figure")
    p.add_argument("--seed", type=int, help="override scenario seeds (trial k uses seed + k)")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("gen-maps", help="write the built-in benchmark maps and scenarios")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, help="seed for the doorway offsets")
    p.add_argument("--with-narrow-turns", action="store_true",
                   help="also write the r+2 corner and zig-zag maps that do not certify")
    p.set_defaults(func=cmd_gen_maps)

    p = sub.add_parser("verify", help="check a trajectory file against a map")
    p.add_argument("trajectory")
    p.add_argument("map")
    p.add_argument("--robot-r", type=float, default=benchmarks.DEFAULT_ROBOT)
    p.add_argument("--cell-size", type=float, help="PGM maps only")
    p.add_argument("--origin", type=float, nargs=2, help="PGM maps only")
    p.add_argument("--json", metavar="OUT")
    p.add_argument("--seed", type=int, help="accepted for symmetry; verification is deterministic")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, MapFormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
