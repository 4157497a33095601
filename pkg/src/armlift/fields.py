"""Planar vector fields attached to an arm, and a finite-difference bracket.

On the configuration torus of a planar arm the useful fields are all of
the shape ``(a_j^k sin q_j)_j`` or ``(a_j^k cos q_j)_j`` plus the constant
fields ``(a_j^k)_j``.  They are named by compact tokens: ``"S"``, ``"C"``,
``"U"`` (all ones), ``"A"``, ``"A2"``, ``"A3S"``, ``"A2C"`` and so on,
where the digit is the power of the length vector.
"""

from __future__ import annotations

import re
from typing import Callable

import numpy as np

from .arm import ArmSpec
from .errors import DimensionMismatch

__all__ = [
    "planar_field",
    "gradient_x",
    "gradient_y",
    "lie_bracket_numeric",
    "vandermonde_rank",
]

_FIELD_TOKEN = re.compile(r"\A(?:A(?P<power>\d+)?)?(?P<trig>[SCU]?)\Z")


def planar_field(spec: ArmSpec, angles, which: str) -> np.ndarray:
    """Evaluate one of the named fields at a planar configuration.

    ``which`` is ``"U"`` (all ones), or ``"A<k>"`` optionally followed by
    ``"S"`` or ``"C"``; a bare ``"S"``/``"C"`` means power zero and a bare
    ``"A"`` means power one.  Examples: ``"S" -> (sin q_j)``,
    ``"A2" -> (a_j^2)``, ``"A3C" -> (a_j^3 cos q_j)``.
    """
    if spec.dim != 2:
        raise DimensionMismatch("planar fields require d = 2")
    q = np.asarray(angles, dtype=float)
    if q.shape != (spec.m,):
        raise DimensionMismatch("angle vector does not match the arm")
    m = _FIELD_TOKEN.match(which or "")
    if m is None or (m.group("power") is None and which == "") or which == "A0":
        raise ValueError(f"unknown field token {which!r}")
    trig = m.group("trig")
    has_a = which.startswith("A")
    if trig == "U" and has_a:
        raise ValueError("the constant field U takes no length prefix")
    power = 0
    if has_a:
        power = 1 if m.group("power") is None else int(m.group("power"))
    a_part = spec.lengths_array**power if power else np.ones(spec.m)
    if trig == "S":
        return a_part * np.sin(q)
    if trig == "C":
        return a_part * np.cos(q)
    if trig == "U" or (trig == "" and has_a):
        return a_part
    raise ValueError(f"unknown field token {which!r}")


def gradient_x(spec: ArmSpec, angles) -> np.ndarray:
    """Euclidean gradient of the effector abscissa: ``-(a_j sin q_j)_j``."""
    return -planar_field(spec, angles, "AS")


def gradient_y(spec: ArmSpec, angles) -> np.ndarray:
    """Euclidean gradient of the effector ordinate: ``(a_j cos q_j)_j``."""
    return planar_field(spec, angles, "AC")


def _jacobian(field: Callable, point: np.ndarray, h: float) -> np.ndarray:
    base = np.asarray(field(point), dtype=float)
    jac = np.empty((base.size, point.size))
    for j in range(point.size):
        bump = np.zeros_like(point)
        bump[j] = h
        hi = np.asarray(field(point + bump), dtype=float)
        lo = np.asarray(field(point - bump), dtype=float)
        jac[:, j] = (hi - lo) / (2.0 * h)
    return jac


def lie_bracket_numeric(field_f: Callable, field_g: Callable, point, h: float = 1e-5) -> np.ndarray:
    """Central-difference Lie bracket ``[F, G] = DG.F - DF.G`` at a point.

    Both fields must accept and return flat float arrays of the same size.
    Fields living on a product of spheres should be given as their smooth
    ambient extensions; the bracket of tangent extensions restricted to
    the manifold does not depend on the extension.
    """
    p = np.asarray(point, dtype=float)
    f0 = np.asarray(field_f(p), dtype=float)
    g0 = np.asarray(field_g(p), dtype=float)
    if f0.shape != p.shape or g0.shape != p.shape:
        raise DimensionMismatch("fields must map R^n to R^n")
    return _jacobian(field_g, p, h) @ f0 - _jacobian(field_f, p, h) @ g0


def vandermonde_rank(spec: ArmSpec) -> int:
    """Rank of the moment matrix ``(a_j^k)`` over the moving segments.

    Columns are the powers ``k = 1 .. sharp`` (number of distinct nonzero
    length values), rows the segments with nonzero length.  Equals
    ``sharp`` whenever the distinct values are genuinely distinct, which
    is the dimension count behind the bracket-generating family.
    """
    if spec.dim != 2:
        raise DimensionMismatch("the moment matrix is a planar construction")
    idx = [j for j, a in enumerate(spec.lengths) if a != 0.0]
    k = spec.sharp
    if k == 0 or not idx:
        return 0
    a = spec.lengths_array[idx]
    mat = np.stack([a**p for p in range(1, k + 1)], axis=1)
    return int(np.linalg.matrix_rank(mat))
