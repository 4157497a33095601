"""Articulated arms: the end-effector map, its Gram matrix, and the
critical-value geometry.

An arm is a list of segment lengths ``a_1 .. a_m`` together with an ambient
dimension ``d``.  A configuration places one unit vector per segment on the
sphere ``S^{d-1}``; the end effector sits at ``sum_j a_j z_j``.  Everything
downstream (lifting, reachability, holonomy) is built on the few functions
in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch

__all__ = [
    "ArmSpec",
    "Configuration",
    "GramMatrix",
    "eval_arm",
    "gram",
    "det_gram_closed_form",
    "is_aligned",
    "critical_radii",
    "nearest_critical_distance",
    "is_regular_value",
    "two_link_solutions",
]

#: inputs further than this from unit norm are rejected instead of renormalized
UNIT_TOL = 1e-6


@dataclass(frozen=True)
class ArmSpec:
    """Segment lengths plus the ambient dimension.

    Lengths must be finite and nonnegative; zero lengths are legal and mark
    segments that can never move the effector.  Two segments belong to the
    same value class exactly when their lengths are equal as floats.
    """

    lengths: tuple[float, ...]
    dim: int = 2

    def __post_init__(self):
        lengths = tuple(float(a) for a in self.lengths)
        if len(lengths) == 0:
            raise ValueError("an arm needs at least one segment")
        if any(not np.isfinite(a) or a < 0 for a in lengths):
            raise ValueError("segment lengths must be finite and >= 0")
        if int(self.dim) < 2:
            raise ValueError("ambient dimension must be >= 2")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def m(self) -> int:
        return len(self.lengths)

    @property
    def lengths_array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)

    @property
    def total_length(self) -> float:
        return float(sum(self.lengths))

    @property
    def scale(self) -> float:
        """``sum a_j^2``, the natural scale of the Gram matrix."""
        return float(sum(a * a for a in self.lengths))

    @cached_property
    def value_classes(self) -> tuple[tuple[float, tuple[int, ...]], ...]:
        """Distinct nonzero length values with their segment indices.

        Ordered by first occurrence; zero-length segments belong to no
        class.
        """
        seen: dict[float, list[int]] = {}
        for j, a in enumerate(self.lengths):
            if a == 0.0:
                continue
            seen.setdefault(a, []).append(j)
        return tuple((v, tuple(ix)) for v, ix in seen.items())

    @property
    def sharp(self) -> int:
        """Number of distinct nonzero length values."""
        return len(self.value_classes)

    def to_dict(self) -> dict:
        return {"lengths": list(self.lengths), "dim": self.dim}

    @classmethod
    def from_dict(cls, data: dict) -> "ArmSpec":
        return cls(lengths=tuple(data["lengths"]), dim=int(data.get("dim", 2)))


class Configuration:
    """One unit vector per segment.

    Stored as an ``(m, d)`` array whose rows are renormalized on
    construction (inputs further than ``UNIT_TOL`` from unit norm are
    rejected).  For planar arms an angle lift is carried alongside the
    vectors; it is *not* reduced mod 2*pi, so integrated trajectories keep a
    continuous angle history.
    """

    __slots__ = ("vectors", "angles")

    def __init__(self, vectors, angles=None):
        v = np.array(vectors, dtype=float)
        if v.ndim != 2 or v.shape[1] < 2:
            raise DimensionMismatch("configuration must be an (m, d) array with d >= 2")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ValueError("configuration rows are not unit vectors")
        v = v / norms[:, None]
        v.flags.writeable = False
        self.vectors = v
        if angles is not None:
            q = np.array(angles, dtype=float)
            if q.shape != (v.shape[0],):
                raise DimensionMismatch("angle lift has the wrong shape")
            rebuilt = np.stack([np.cos(q), np.sin(q)], axis=1)
            if v.shape[1] != 2 or np.max(np.abs(rebuilt - v)) > 1e-9:
                raise ValueError("angle lift disagrees with the stored vectors")
            q.flags.writeable = False
            self.angles = q
        elif v.shape[1] == 2:
            q = np.arctan2(v[:, 1], v[:, 0])
            q.flags.writeable = False
            self.angles = q
        else:
            self.angles = None

    @classmethod
    def from_angles(cls, angles) -> "Configuration":
        q = np.asarray(angles, dtype=float)
        if q.ndim != 1:
            raise DimensionMismatch("angles must be a flat sequence")
        return cls(np.stack([np.cos(q), np.sin(q)], axis=1), angles=q)

    @classmethod
    def from_vectors(cls, vectors) -> "Configuration":
        return cls(vectors)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def as_complex(self) -> np.ndarray:
        """Planar configuration as points of the unit circle in C."""
        if self.dim != 2:
            raise DimensionMismatch("complex view only exists for d = 2")
        return self.vectors[:, 0] + 1j * self.vectors[:, 1]

    def to_dict(self) -> dict:
        if self.angles is not None:
            return {"angles": [float(x) for x in self.angles]}
        return {"vectors": [[float(x) for x in row] for row in self.vectors]}

    @classmethod
    def from_dict(cls, data: dict, dim: int | None = None) -> "Configuration":
        if "angles" in data:
            if dim not in (None, 2):
                raise DimensionMismatch("angle input only makes sense for d = 2")
            return cls.from_angles(data["angles"])
        v = np.asarray(data["vectors"], dtype=float)
        if dim is not None and v.shape[1] != dim:
            raise DimensionMismatch(
                f"configuration has dimension {v.shape[1]}, arm wants {dim}"
            )
        return cls(v)

    def __repr__(self):
        return f"Configuration(m={self.m}, d={self.dim})"


def _check(spec: ArmSpec, config: Configuration):
    if config.m != spec.m or config.dim != spec.dim:
        raise DimensionMismatch(
            f"arm is ({spec.m}, {spec.dim}), configuration is ({config.m}, {config.dim})"
        )


@dataclass(frozen=True)
class GramMatrix:
    """``Df Df^T`` of the end-effector map, with its determinant."""

    entries: np.ndarray
    det: float

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def eval_arm(spec: ArmSpec, config: Configuration) -> np.ndarray:
    """End-effector position ``sum_j a_j z_j``."""
    _check(spec, config)
    return spec.lengths_array @ config.vectors


def gram(spec: ArmSpec, config: Configuration) -> GramMatrix:
    """Gram matrix ``P = sum_j a_j^2 (I - z_j z_j^T)`` of the arm map.

    ``P`` is ``Df Df^T`` for the product round metric on the configuration
    space, a ``d x d`` symmetric positive semidefinite matrix.  Its
    determinant vanishes exactly on the aligned configurations when the arm
    has at least two moving segments.
    """
    _check(spec, config)
    a2 = spec.lengths_array**2
    z = config.vectors
    p = float(a2.sum()) * np.eye(spec.dim) - (a2[:, None] * z).T @ z
    p = 0.5 * (p + p.T)  # symmetrize away roundoff
    return GramMatrix(entries=p, det=float(np.linalg.det(p)))


def det_gram_closed_form(spec: ArmSpec, config: Configuration) -> float:
    """Planar Gram determinant ``sum_{i<j} a_i^2 a_j^2 sin^2(q_i - q_j)``."""
    _check(spec, config)
    if spec.dim != 2:
        raise DimensionMismatch("closed form is planar only")
    q = config.angles
    a2 = spec.lengths_array**2
    diff = q[:, None] - q[None, :]
    s2 = np.sin(diff) ** 2
    return float(np.sum(np.triu(a2[:, None] * a2[None, :] * s2, k=1)))


def is_aligned(spec: ArmSpec, config: Configuration, tol: float = 1e-9) -> bool:
    """True when all moving segments are pairwise parallel or antiparallel.

    Zero-length segments are ignored: they do not constrain anything.
    """
    _check(spec, config)
    idx = [j for j, a in enumerate(spec.lengths) if a != 0.0]
    z = config.vectors
    for u in range(len(idx)):
        for v in range(u + 1, len(idx)):
            zi, zj = z[idx[u]], z[idx[v]]
            if min(np.linalg.norm(zi - zj), np.linalg.norm(zi + zj)) > tol:
                return False
    return True


def critical_radii(spec: ArmSpec, dedupe_tol: float = 1e-12) -> np.ndarray:
    """Sorted radii ``|sum_j e_j a_j|`` over sign patterns ``e_j = +-1``.

    The critical values of the arm map are exactly the spheres with these
    radii.  Duplicates closer than ``dedupe_tol`` are merged.
    """
    sums = {0.0}
    for a in spec.lengths:
        sums = {s + a for s in sums} | {s - a for s in sums}
    radii = sorted(abs(s) for s in sums)
    merged = [radii[0]]
    for r in radii[1:]:
        if r - merged[-1] > dedupe_tol:
            merged.append(r)
    return np.asarray(merged)


def nearest_critical_distance(spec: ArmSpec, point) -> float:
    """Distance from ``|point|`` to the nearest critical radius."""
    r = float(np.linalg.norm(np.asarray(point, dtype=float)))
    return float(np.min(np.abs(critical_radii(spec) - r)))


def is_regular_value(spec: ArmSpec, point, margin: float = 0.0) -> bool:
    """True when ``point`` clears every critical sphere by more than ``margin``."""
    p = np.asarray(point, dtype=float)
    if p.shape != (spec.dim,):
        raise DimensionMismatch(f"point must live in R^{spec.dim}")
    return nearest_critical_distance(spec, p) > margin


def two_link_solutions(a1: float, a2: float, target) -> tuple[Configuration, ...]:
    """All planar two-link configurations reaching ``target``.

    Classical law-of-cosines inverse kinematics.  Returns zero, one, or two
    configurations: empty when ``|target|`` falls outside
    ``[|a1 - a2|, a1 + a2]``, one on the boundary circles, two inside.
    Angles are reported in ``(-pi, pi]``.
    """
    if a1 <= 0 or a2 <= 0:
        raise ValueError("both segment lengths must be positive")
    if isinstance(target, complex):
        b = np.array([target.real, target.imag])
    elif np.isscalar(target):
        b = np.array([float(target), 0.0])
    else:
        b = np.asarray(target, dtype=float)
    if b.shape != (2,):
        raise DimensionMismatch("target must be a point of the plane")
    r = float(np.linalg.norm(b))
    if r == 0.0:
        if a1 == a2:
            raise ValueError("target at the origin with equal links: a continuum of solutions")
        return ()
    lo, hi = abs(a1 - a2), a1 + a2
    slack = 1e-12 * max(1.0, hi)
    if r < lo - slack or r > hi + slack:
        return ()
    cos_alpha = (a1 * a1 + r * r - a2 * a2) / (2.0 * a1 * r)
    cos_alpha = float(np.clip(cos_alpha, -1.0, 1.0))
    alpha = float(np.arccos(cos_alpha))
    phi = float(np.arctan2(b[1], b[0]))
    configs: list[Configuration] = []
    seen: list[np.ndarray] = []
    for sign in (+1.0, -1.0):
        q1 = phi + sign * alpha
        rest = b - a1 * np.array([np.cos(q1), np.sin(q1)])
        q2 = float(np.arctan2(rest[1], rest[0]))
        q = np.array([_wrap_pi(q1), q2])
        if any(np.max(np.abs(q - p)) < 1e-12 for p in seen):
            continue
        seen.append(q)
        configs.append(Configuration.from_angles(q))
    return tuple(configs)


def _wrap_pi(theta: float) -> float:
    """Reduce an angle to ``(-pi, pi]``."""
    out = float(np.arctan2(np.sin(theta), np.cos(theta)))
    return out if out != -np.pi else np.pi
