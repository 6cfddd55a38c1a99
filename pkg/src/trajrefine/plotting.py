"""Figures for single runs and suites (matplotlib, headless)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .grid_map import GridMap  # noqa: E402
from .trajectory import Trajectory  # noqa: E402

STATUS_COLORS = {"certified": "tab:green", "depth_exhausted": "tab:orange", "correction_failed": "tab:red"}


def _extent(grid: GridMap):
    x0, y0, x1, y1 = grid.bounds
    return (x0, x1, y0, y1)


def draw_map(ax, grid: GridMap) -> None:
    ax.imshow(grid.occupancy.astype(float), origin="lower", extent=_extent(grid),
              cmap="Greys", vmin=0, vmax=1.6, interpolation="nearest")
    ax.set_aspect("equal")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")


def draw_trajectory(ax, t: Trajectory, **kw) -> None:
    xy = np.array([p.position for p in t.poses])
    ax.plot(xy[:, 0], xy[:, 1], **kw)


def plot_run(
    grid: GridMap,
    final: Trajectory | None,
    path: str | Path,
    initial: Trajectory | None = None,
    corrected: Sequence[int] = (),
    title: str = "",
) -> Path:
    """Map cells, initial trajectory (thin), final trajectory (thick, with poses), corrected poses ringed."""
    fig, ax = plt.subplots(figsize=(6, 6 * grid.height / max(grid.width, 1) + 0.6))
    draw_map(ax, grid)
    if initial is not None:
        draw_trajectory(ax, initial, color="tab:blue", lw=0.8, ls="--", marker="o", ms=2.5, label="initial")
    if final is not None:
        draw_trajectory(ax, final, color="tab:green", lw=2.0, marker=".", ms=4, label="refined")
        if corrected:
            xy = np.array([final.poses[i].position for i in corrected])
            ax.scatter(xy[:, 0], xy[:, 1], s=40, facecolors="none", edgecolors="tab:red", lw=1.2,
                       label="corrected", zorder=3)
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_suite(rows, path: str | Path) -> Path:
    """Planning time per run (bars coloured by status) above final pose counts."""
    names = [f"{r.name}#{r.trial}" if r.trial else r.name for r in rows]
    x = np.arange(len(rows))
    colors = [STATUS_COLORS.get(r.status, "tab:gray") for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(max(6, 0.18 * len(rows) + 2), 6), sharex=True)
    ax1.bar(x, [r.planning_time_ms for r in rows], color=colors)
    ax1.set_ylabel("correct + refine [ms]")
    ax2.bar(x, [r.pose_count_final for r in rows], color=colors)
    ax2.bar(x, [r.pose_count_initial for r in rows], color="white", edgecolor="k", lw=0.5, width=0.5)
    ax2.set_ylabel("poses (initial in white)")
    ax2.set_xticks(x)
    ax2.set_xticklabels(names, rotation=90, fontsize=6)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path
