"""Piecewise-smooth target curves for the end effector.

A curve is a chain of segments, each smooth on its own time interval:
polylines (arbitrary dimension), circular arcs, and axis-aligned square
loops (both planar).  Consecutive segments must join continuously in
position; corners inside a segment are exposed as breakpoints so that the
integrator never steps across a velocity jump.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

__all__ = ["Polyline", "Arc", "SquareLoop", "CurveSpec"]

_JOIN_TOL = 1e-9


@dataclass(frozen=True)
class Polyline:
    """Straight legs through ``points`` at the given strictly increasing times."""

    points: tuple[tuple[float, ...], ...]
    times: tuple[float, ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ts = np.asarray(self.times, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("a polyline needs at least two points")
        if ts.shape != (pts.shape[0],) or np.any(np.diff(ts) <= 0):
            raise ValueError("polyline times must be strictly increasing, one per point")
        object.__setattr__(self, "points", tuple(map(tuple, pts)))
        object.__setattr__(self, "times", tuple(float(t) for t in ts))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def duration(self) -> float:
        return self.times[-1] - self.times[0]

    @property
    def local_breakpoints(self) -> tuple[float, ...]:
        t0 = self.times[0]
        return tuple(t - t0 for t in self.times[1:-1])

    def point(self, tau: float) -> np.ndarray:
        ts = np.asarray(self.times) - self.times[0]
        pts = np.asarray(self.points)
        i = int(np.clip(np.searchsorted(ts, tau, side="right") - 1, 0, len(ts) - 2))
        frac = (tau - ts[i]) / (ts[i + 1] - ts[i])
        return pts[i] + frac * (pts[i + 1] - pts[i])

    def velocity(self, tau: float) -> np.ndarray:
        ts = np.asarray(self.times) - self.times[0]
        pts = np.asarray(self.points)
        i = int(np.clip(np.searchsorted(ts, tau, side="right") - 1, 0, len(ts) - 2))
        return (pts[i + 1] - pts[i]) / (ts[i + 1] - ts[i])

    def piece_velocity(self, lo: float, hi: float):
        """Velocity on a corner-free window, resolved once at the midpoint.

        Lets callers evaluate right up to a corner without the lookup
        flipping to the next leg at the boundary time.
        """
        v = self.velocity(0.5 * (lo + hi))
        return lambda tau: v.copy()

    def to_dict(self) -> dict:
        return {
            "type": "polyline",
            "points": [list(p) for p in self.points],
            "times": list(self.times),
        }


@dataclass(frozen=True)
class Arc:
    """Planar circular arc, angle interpolated linearly over ``duration``."""

    center: tuple[float, float]
    radius: float
    angles: tuple[float, float]
    duration: float

    def __post_init__(self):
        if self.radius <= 0 or self.duration <= 0:
            raise ValueError("arc radius and duration must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "angles", (float(self.angles[0]), float(self.angles[1])))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "duration", float(self.duration))

    dim = 2

    @property
    def local_breakpoints(self) -> tuple[float, ...]:
        return ()

    def _theta(self, tau: float) -> float:
        a0, a1 = self.angles
        return a0 + (a1 - a0) * tau / self.duration

    def point(self, tau: float) -> np.ndarray:
        th = self._theta(tau)
        return np.asarray(self.center) + self.radius * np.array([np.cos(th), np.sin(th)])

    def velocity(self, tau: float) -> np.ndarray:
        th = self._theta(tau)
        rate = (self.angles[1] - self.angles[0]) / self.duration
        return self.radius * rate * np.array([-np.sin(th), np.cos(th)])

    def piece_velocity(self, lo: float, hi: float):
        return self.velocity  # smooth: no corner to guard against

    def to_dict(self) -> dict:
        return {
            "type": "arc",
            "center": list(self.center),
            "radius": self.radius,
            "angles": list(self.angles),
            "duration": self.duration,
        }


@dataclass(frozen=True)
class SquareLoop:
    """The boundary of an axis-aligned square, traversed once at unit speed.

    Starts at ``corner``, runs east, north, west, south; total duration is
    four times the side.
    """

    corner: tuple[float, float]
    side: float

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("square side must be positive")
        object.__setattr__(self, "corner", (float(self.corner[0]), float(self.corner[1])))
        object.__setattr__(self, "side", float(self.side))

    dim = 2

    _DIRECTIONS = (
        np.array([1.0, 0.0]),
        np.array([0.0, 1.0]),
        np.array([-1.0, 0.0]),
        np.array([0.0, -1.0]),
    )

    @property
    def duration(self) -> float:
        return 4.0 * self.side

    @property
    def local_breakpoints(self) -> tuple[float, ...]:
        return (self.side, 2.0 * self.side, 3.0 * self.side)

    def _vertices(self) -> np.ndarray:
        x, y = self.corner
        s = self.side
        return np.array([[x, y], [x + s, y], [x + s, y + s], [x, y + s], [x, y]])

    def point(self, tau: float) -> np.ndarray:
        s = self.side
        edge = int(np.clip(tau // s, 0, 3))
        verts = self._vertices()
        return verts[edge] + (tau - edge * s) * self._DIRECTIONS[edge]

    def velocity(self, tau: float) -> np.ndarray:
        edge = int(np.clip(tau // self.side, 0, 3))
        return self._DIRECTIONS[edge].copy()

    def piece_velocity(self, lo: float, hi: float):
        edge = int(np.clip((0.5 * (lo + hi)) // self.side, 0, 3))
        v = self._DIRECTIONS[edge]
        return lambda tau: v.copy()

    def to_dict(self) -> dict:
        return {"type": "square_loop", "corner": list(self.corner), "side": self.side}


_SEGMENT_TYPES = {"polyline": Polyline, "arc": Arc, "square_loop": SquareLoop}


class CurveSpec:
    """A continuous chain of curve segments starting at time zero."""

    def __init__(self, segments):
        segs = tuple(segments)
        if not segs:
            raise ValueError("a curve needs at least one segment")
        dim = segs[0].dim
        starts = [0.0]
        for i, seg in enumerate(segs):
            if seg.dim != dim:
                raise DimensionMismatch("curve segments disagree on dimension")
            if i > 0:
                prev_end = segs[i - 1].point(segs[i - 1].duration)
                if np.linalg.norm(prev_end - seg.point(0.0)) > _JOIN_TOL:
                    raise ValueError(f"curve breaks between segments {i - 1} and {i}")
            starts.append(starts[-1] + seg.duration)
        self.segments = segs
        self._starts = np.asarray(starts)

    @property
    def dim(self) -> int:
        return self.segments[0].dim

    @property
    def duration(self) -> float:
        return float(self._starts[-1])

    @property
    def start_point(self) -> np.ndarray:
        return self.segments[0].point(0.0)

    @property
    def end_point(self) -> np.ndarray:
        return self.segments[-1].point(self.segments[-1].duration)

    def is_closed(self, tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.end_point - self.start_point) <= tol)

    @property
    def breakpoints(self) -> np.ndarray:
        """Sorted times (segment joints and interior corners) plus both ends."""
        knots = set(float(t) for t in self._starts)
        for seg, start in zip(self.segments, self._starts[:-1]):
            knots.update(float(start + b) for b in seg.local_breakpoints)
        return np.asarray(sorted(knots))

    def _locate(self, t: float) -> tuple[int, float]:
        t = float(np.clip(t, 0.0, self.duration))
        i = int(np.clip(np.searchsorted(self._starts, t, side="right") - 1, 0, len(self.segments) - 1))
        return i, t - float(self._starts[i])

    def point(self, t: float) -> np.ndarray:
        i, tau = self._locate(t)
        return self.segments[i].point(tau)

    def velocity(self, t: float) -> np.ndarray:
        i, tau = self._locate(t)
        return self.segments[i].velocity(tau)

    def piece_velocity(self, lo: float, hi: float):
        """Velocity restricted to a window free of interior breakpoints.

        The segment and, within it, the smooth piece are resolved once at
        the window midpoint, so evaluations at the window's endpoints stay
        on that piece instead of jumping across the corner.  Returns a
        callable of curve time.
        """
        i, _ = self._locate(0.5 * (lo + hi))
        start = float(self._starts[i])
        inner = self.segments[i].piece_velocity(lo - start, hi - start)
        return lambda t: inner(t - start)

    def to_dict(self) -> dict:
        return {"segments": [seg.to_dict() for seg in self.segments]}

    @classmethod
    def from_dict(cls, data: dict) -> "CurveSpec":
        segs = []
        for raw in data["segments"]:
            kind = raw.get("type")
            if kind not in _SEGMENT_TYPES:
                raise ValueError(f"unknown segment type {kind!r}")
            if kind == "polyline":
                segs.append(Polyline(tuple(map(tuple, raw["points"])), tuple(raw["times"])))
            elif kind == "arc":
                segs.append(
                    Arc(
                        center=tuple(raw["center"]),
                        radius=raw["radius"],
                        angles=tuple(raw["angles"]),
                        duration=raw["duration"],
                    )
                )
            else:
                segs.append(SquareLoop(corner=tuple(raw["corner"]), side=raw["side"]))
        return cls(segs)
