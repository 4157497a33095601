"""Reachability between configurations along horizontal paths.

Two configurations are mutually reachable exactly when one is carried to the
other by a per-length-class Moebius transformation.  The decision runs class
by class: coincidence patterns must match, and the distinct representatives
must share the invariants that classify point tuples up to Moebius maps
(orientation and real cross-ratios on the circle, complex cross-ratios on
the 2-sphere, absolute cross-ratios beyond, where they are only necessary).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .arm import ArmSpec, Configuration
from .errors import DimensionMismatch
from .moebius import (
    GroupElement,
    SU11Element,
    act_group,
    cross_ratio,
    cross_ratio_complex,
    cross_ratio_weak,
    moebius_through_triple,
    orientation,
)

__all__ = ["ClassReport", "ReachVerdict", "reachable"]

YES = "yes"
NO = "no"
NECESSARY_ONLY = "necessary-only-yes"


@dataclass(frozen=True)
class ClassReport:
    """Per-length-class outcome with the invariant values that decided it."""

    length: float
    indices: tuple[int, ...]
    verdict: str
    reason: str
    groups: int
    orientations: tuple | None = None
    invariants_start: tuple = ()
    invariants_goal: tuple = ()

    def to_dict(self) -> dict:
        out = {
            "length": self.length,
            "indices": [int(i) for i in self.indices],
            "verdict": self.verdict,
            "reason": self.reason,
            "groups": self.groups,
            "invariants_start": [_jsonable(v) for v in self.invariants_start],
            "invariants_goal": [_jsonable(v) for v in self.invariants_goal],
        }
        if self.orientations is not None:
            out["orientations"] = list(self.orientations)
        return out


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return float(v)


@dataclass(frozen=True)
class ReachVerdict:
    """Aggregate answer plus the per-class evidence and, when planar, a witness."""

    verdict: str
    classes: tuple[ClassReport, ...]
    witness: GroupElement | None
    witness_residual: float | None

    def __bool__(self) -> bool:
        return self.verdict == YES

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "classes": [c.to_dict() for c in self.classes],
            "witness": _witness_dict(self.witness),
            "witness_residual": self.witness_residual,
        }


def _witness_dict(witness: GroupElement | None):
    if witness is None:
        return None
    return [
        {"a": [g.a.real, g.a.imag], "b": [g.b.real, g.b.imag]}
        for g in witness.per_class
    ]


def _coincidence_groups(rows: np.ndarray, tol: float) -> list[list[int]]:
    """Partition row indices by pairwise distance below ``tol`` (transitively)."""
    n = rows.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if float(np.linalg.norm(rows[i] - rows[j])) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


def _class_verdict(
    dim: int,
    rows0: np.ndarray,
    rows1: np.ndarray,
    tol: float,
    coincidence_tol: float,
):
    """Decide one value class; returns (verdict, reason, reps0, reps1, extras)."""
    groups0 = _coincidence_groups(rows0, coincidence_tol)
    groups1 = _coincidence_groups(rows1, coincidence_tol)
    if [sorted(g) for g in groups0] != [sorted(g) for g in groups1]:
        return NO, "coincidence patterns differ", None, None, {}
    reps = [g[0] for g in groups0]
    reps0 = rows0[reps]
    reps1 = rows1[reps]
    n = len(reps)
    extras: dict = {"groups": n}

    if dim == 2:
        z0 = reps0[:, 0] + 1j * reps0[:, 1]
        z1 = reps1[:, 0] + 1j * reps1[:, 1]
        if n <= 2:
            return YES, "at most two distinct directions", reps0, reps1, extras
        o0 = orientation(z0[0], z0[1], z0[2])
        o1 = orientation(z1[0], z1[1], z1[2])
        extras["orientations"] = (o0, o1)
        if o0 != o1:
            return NO, "orientation of the leading triple differs", reps0, reps1, extras
        inv0 = tuple(cross_ratio(z0[0], z0[1], z0[2], z0[k]) for k in range(3, n))
        inv1 = tuple(cross_ratio(z1[0], z1[1], z1[2], z1[k]) for k in range(3, n))
        extras["invariants"] = (inv0, inv1)
        if any(abs(p - q) > tol for p, q in zip(inv0, inv1)):
            return NO, "cross-ratios differ", reps0, reps1, extras
        reason = "orientation and cross-ratios agree" if n > 3 else "orientation agrees"
        return YES, reason, reps0, reps1, extras

    if dim == 3:
        if n <= 3:
            return YES, "at most three distinct directions", reps0, reps1, extras
        inv0 = tuple(
            cross_ratio_complex(reps0[0], reps0[1], reps0[2], reps0[k])
            for k in range(3, n)
        )
        inv1 = tuple(
            cross_ratio_complex(reps1[0], reps1[1], reps1[2], reps1[k])
            for k in range(3, n)
        )
        extras["invariants"] = (inv0, inv1)
        if any(abs(p - q) > tol for p, q in zip(inv0, inv1)):
            return NO, "complex cross-ratios differ", reps0, reps1, extras
        return YES, "complex cross-ratios agree", reps0, reps1, extras

    # d >= 4: the absolute cross-ratios are necessary invariants but nothing
    # here certifies sufficiency, so a clean pass is not a definitive yes.
    if n >= 4:
        inv0 = tuple(
            cross_ratio_weak(reps0[0], reps0[1], reps0[2], reps0[k])
            for k in range(3, n)
        )
        inv1 = tuple(
            cross_ratio_weak(reps1[0], reps1[1], reps1[2], reps1[k])
            for k in range(3, n)
        )
        extras["invariants"] = (inv0, inv1)
        if any(abs(p - q) > tol for p, q in zip(inv0, inv1)):
            return NO, "absolute cross-ratios differ", reps0, reps1, extras
    return NECESSARY_ONLY, "necessary invariants pass", reps0, reps1, extras


def _planar_class_witness(reps0: np.ndarray, reps1: np.ndarray) -> SU11Element:
    """An element of the circle group carrying one representative tuple to the other."""
    z0 = [complex(r[0], r[1]) for r in reps0]
    z1 = [complex(r[0], r[1]) for r in reps1]
    n = len(z0)
    if n >= 3:
        return moebius_through_triple(z0[:3], z1[:3])
    if n == 1:
        return SU11Element.rotation(cmath.phase(z1[0] / z0[0]))
    # Two distinct points: complete each pair with the midpoint of its
    # counterclockwise arc; the completions sit identically relative to the
    # pair, so the triple map carries one pair to the other.
    w3 = z0[0] * cmath.exp(0.5j * (cmath.phase(z0[1] / z0[0]) % (2.0 * np.pi)))
    v3 = z1[0] * cmath.exp(0.5j * (cmath.phase(z1[1] / z1[0]) % (2.0 * np.pi)))
    return moebius_through_triple([z0[0], z0[1], w3], [z1[0], z1[1], v3])


def reachable(
    spec: ArmSpec,
    z0: Configuration,
    z1: Configuration,
    tol: float = 1e-8,
    coincidence_tol: float = 1e-9,
) -> ReachVerdict:
    """Decide whether the horizontal lift can steer ``z0`` into ``z1``.

    Zero-length segments must agree between the two configurations (they
    cannot move).  The verdict is definitive for d = 2 and d = 3; for
    d >= 4 a clean pass of the necessary invariants yields
    ``necessary-only-yes``.  For planar arms a ``yes`` comes with a witness
    group element; ``witness_residual`` is the largest distance between the
    transported start and the goal.
    """
    for cfg, name in ((z0, "z0"), (z1, "z1")):
        if cfg.m != spec.m or cfg.dim != spec.dim:
            raise DimensionMismatch(f"{name} does not match the arm (m={spec.m}, d={spec.dim})")

    reports: list[ClassReport] = []
    zero_idx = tuple(j for j, a in enumerate(spec.lengths) if a == 0.0)
    if zero_idx:
        worst = max(
            float(np.linalg.norm(z0.vectors[j] - z1.vectors[j])) for j in zero_idx
        )
        ok = worst <= coincidence_tol
        reports.append(
            ClassReport(
                length=0.0,
                indices=zero_idx,
                verdict=YES if ok else NO,
                reason="zero-length segments cannot move",
                groups=len(zero_idx),
            )
        )

    class_data = []
    for value, indices in spec.value_classes:
        rows0 = z0.vectors[list(indices)]
        rows1 = z1.vectors[list(indices)]
        verdict, reason, reps0, reps1, extras = _class_verdict(
            spec.dim, rows0, rows1, tol, coincidence_tol
        )
        inv0, inv1 = extras.get("invariants", ((), ()))
        reports.append(
            ClassReport(
                length=value,
                indices=indices,
                verdict=verdict,
                reason=reason,
                groups=extras.get("groups", 0),
                orientations=extras.get("orientations"),
                invariants_start=inv0,
                invariants_goal=inv1,
            )
        )
        class_data.append((verdict, reps0, reps1))

    verdicts = [r.verdict for r in reports]
    if NO in verdicts:
        overall = NO
    elif NECESSARY_ONLY in verdicts:
        overall = NECESSARY_ONLY
    else:
        overall = YES

    witness = None
    residual = None
    if overall == YES and spec.dim == 2 and spec.sharp > 0:
        members = tuple(
            _planar_class_witness(reps0, reps1) for _, reps0, reps1 in class_data
        )
        witness = GroupElement(dim=2, per_class=members)
        moved = act_group(witness, spec, z0)
        residual = float(np.max(np.linalg.norm(moved.vectors - z1.vectors, axis=1)))

    return ReachVerdict(
        verdict=overall,
        classes=tuple(reports),
        witness=witness,
        witness_residual=residual,
    )
