"""Figure rendering for trajectories, censuses, and holonomy reports.

Used by the command line when ``--plot`` is passed: each report gets a PNG
next to its data output.  Rendering is headless (Agg) and deterministic.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .arm import ArmSpec, Configuration, critical_radii, eval_arm
from .holonomy import HolonomyReport
from .lift import LiftTrajectory
from .morse import CriticalPoint

__all__ = ["trajectory_figure", "census_figure", "holonomy_figure"]


def _joint_chain(spec: ArmSpec, config: Configuration) -> np.ndarray:
    """Vertex positions of the arm: origin, then one point per segment tip."""
    steps = spec.lengths_array[:, None] * config.vectors
    return np.vstack([np.zeros(spec.dim), np.cumsum(steps, axis=0)])


def _draw_rings(ax, spec: ArmSpec) -> None:
    theta = np.linspace(0.0, 2.0 * np.pi, 256)
    for r in critical_radii(spec):
        if r > 0:
            ax.plot(r * np.cos(theta), r * np.sin(theta), ls="--", lw=0.6, color="0.65")
    ax.plot([0.0], [0.0], marker="+", color="0.3")


def trajectory_figure(spec: ArmSpec, traj: LiftTrajectory, path) -> Path:
    """Workspace view plus diagnostic traces for a lifted trajectory."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 8))
    ws = axes[0, 0]
    if spec.dim == 2:
        _draw_rings(ws, spec)
        effector = np.array(
            [eval_arm(spec, traj.config_at(i)) for i in range(len(traj.times))]
        )
        ws.plot(effector[:, 0], effector[:, 1], color="tab:blue", lw=1.2, label="effector")
        for idx, alpha in ((0, 0.35), (len(traj.times) - 1, 1.0)):
            chain = _joint_chain(spec, traj.config_at(idx))
            ws.plot(chain[:, 0], chain[:, 1], marker="o", ms=3, color="tab:red", alpha=alpha)
        ws.set_aspect("equal")
        ws.legend(loc="upper right", fontsize=8)
    else:
        ws.text(0.5, 0.5, f"d = {spec.dim} arm", ha="center", va="center")
        ws.set_axis_off()
    ws.set_title("workspace")

    ang = axes[0, 1]
    if traj.planar:
        for j in range(spec.m):
            ang.plot(traj.times, traj.states[:, j], lw=1.0, label=f"q{j + 1}")
        ang.legend(fontsize=7)
        ang.set_title("joint angles")
    else:
        ang.plot(traj.times, traj.states.reshape(len(traj.times), -1), lw=0.8)
        ang.set_title("vector components")
    ang.set_xlabel("t")

    axes[1, 0].plot(traj.times, traj.tracking_error, color="tab:orange")
    axes[1, 0].set_title("tracking error")
    axes[1, 0].set_xlabel("t")
    axes[1, 0].set_yscale("symlog", linthresh=1e-12)

    axes[1, 1].plot(traj.times, traj.det_gram, color="tab:green")
    axes[1, 1].set_title("Gram determinant")
    axes[1, 1].set_xlabel("t")

    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def census_figure(m: int, b: float, points: tuple[CriticalPoint, ...], path) -> Path:
    """Bar chart of critical points per index beside their function levels."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    counts: dict[int, int] = {}
    for p in points:
        counts[p.index] = counts.get(p.index, 0) + 1
    if counts:
        ks = sorted(counts)
        left.bar([str(k) for k in ks], [counts[k] for k in ks], color="tab:blue")
    left.set_title(f"critical points by index (m={m}, b={b})")
    left.set_xlabel("Morse index")

    if points:
        right.scatter(
            [p.index for p in points],
            [p.level for p in points],
            s=18,
            color="tab:red",
        )
    right.set_title("angle-sum level per point")
    right.set_xlabel("Morse index")
    right.set_ylabel("level")

    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def holonomy_figure(spec: ArmSpec, report: HolonomyReport, path) -> Path:
    """Square loop, start/end arm poses, and the displacement decomposition."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4.5))
    _draw_rings(left, spec)
    ts = np.linspace(0.0, report.loop.duration, 241)
    pts = np.array([report.loop.point(float(t)) for t in ts])
    left.plot(pts[:, 0], pts[:, 1], color="tab:blue", lw=1.2, label="loop")
    start_chain = _joint_chain(spec, report.start)
    end_chain = _joint_chain(spec, report.end)
    left.plot(start_chain[:, 0], start_chain[:, 1], marker="o", ms=3, color="0.5", alpha=0.6, label="start")
    left.plot(end_chain[:, 0], end_chain[:, 1], marker="o", ms=3, color="tab:red", label="end")
    left.set_aspect("equal")
    left.legend(fontsize=8)
    left.set_title(f"square loop, side {report.side}")

    idx = np.arange(spec.m)
    width = 0.4
    right.bar(idx - width / 2, report.displacement, width, label="measured", color="tab:red")
    right.bar(idx + width / 2, report.commutator_prediction, width, label="bracket", color="tab:blue")
    right.set_xticks(idx, [f"q{j + 1}" for j in idx])
    right.set_title(f"per-joint displacement (gamma = {report.gamma_estimate:.4g})")
    right.legend(fontsize=8)

    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
