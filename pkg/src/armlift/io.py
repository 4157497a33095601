"""JSON and CSV input/output for arms, configurations, curves, trajectories.

All JSON output is emitted with sorted keys and two-space indentation so
identical inputs produce byte-identical reports.  Trajectory CSVs carry the
joint angles for planar arms (one column per joint) or the flattened unit
vectors otherwise, followed by the per-step tracking error and Gram
determinant.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .arm import ArmSpec, Configuration
from .curves import CurveSpec
from .lift import LiftTrajectory

__all__ = [
    "dump_json",
    "load_arm",
    "load_configuration",
    "load_curve",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "census_payload",
]


def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _load(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def load_arm(path) -> ArmSpec:
    """Read an arm from ``{"lengths": [...], "dim": d}`` (dim defaults to 2)."""
    return ArmSpec.from_dict(_load(path))


def load_configuration(path, dim: int | None = None) -> Configuration:
    """Read a configuration from ``{"angles": [...]}`` or ``{"vectors": [[...], ...]}``."""
    return Configuration.from_dict(_load(path), dim=dim)


def load_curve(path) -> CurveSpec:
    """Read a target curve from ``{"segments": [...]}``."""
    return CurveSpec.from_dict(_load(path))


def _trajectory_header(traj: LiftTrajectory) -> list[str]:
    spec = traj.spec
    if traj.planar:
        cols = [f"q_{j + 1}" for j in range(spec.m)]
    else:
        cols = [
            f"z_{j + 1}_{k + 1}" for j in range(spec.m) for k in range(spec.dim)
        ]
    return ["t", *cols, "tracking_error", "det_gram"]


def write_trajectory_csv(traj: LiftTrajectory, path) -> None:
    """Write one row per accepted step; floats go out at full precision."""
    states = traj.states.reshape(len(traj.times), -1)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_trajectory_header(traj))
        for t, row, err, det in zip(
            traj.times, states, traj.tracking_error, traj.det_gram
        ):
            writer.writerow(
                [repr(float(t))]
                + [repr(float(x)) for x in row]
                + [repr(float(err)), repr(float(det))]
            )


def read_trajectory_csv(path, spec: ArmSpec) -> LiftTrajectory:
    """Rebuild a trajectory written by :func:`write_trajectory_csv`."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path} holds no trajectory rows")
    planar_cols = ["t"] + [f"q_{j + 1}" for j in range(spec.m)]
    wide = np.asarray(rows)
    expected = len(planar_cols) + 2 if spec.dim == 2 else 1 + spec.m * spec.dim + 2
    if wide.shape[1] != expected or header[0] != "t":
        raise ValueError(f"{path} does not match the arm (m={spec.m}, d={spec.dim})")
    times = wide[:, 0]
    body = wide[:, 1:-2]
    if spec.dim == 2:
        states = body
    else:
        states = body.reshape(len(rows), spec.m, spec.dim)
    return LiftTrajectory(
        spec=spec,
        times=times,
        states=states,
        tracking_error=wide[:, -2],
        det_gram=wide[:, -1],
        step=float(times[1] - times[0]) if len(times) > 1 else 0.0,
    )


def census_payload(m: int, b: float, counts: dict[int, int]) -> dict:
    """Shape a census as the reportable JSON body with string index keys."""
    euler = int(sum((-1) ** k * c for k, c in counts.items()))
    return {
        "m": int(m),
        "b": float(b),
        "counts": {str(k): int(v) for k, v in sorted(counts.items())},
        "euler": euler,
    }


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
