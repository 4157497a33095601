"""Holonomy of the horizontal distribution over closed loops of regular values.

Lifting a small square loop and measuring how far the joint angles land from
where they started exposes the curvature of the distribution: the displacement
is side**2 times the bracket of the two horizontal frame fields, up to higher
order in the side length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arm import ArmSpec, Configuration, det_gram_closed_form, eval_arm
from .curves import CurveSpec, SquareLoop
from .errors import DimensionMismatch, NearCritical
from .fields import lie_bracket_numeric, planar_field
from .lift import LiftOptions, lift_path

__all__ = [
    "HolonomyReport",
    "horizontal_frame_fields",
    "holonomy_map",
    "commutator_estimate",
]


def horizontal_frame_fields(spec: ArmSpec, singular_rel: float = 1e-10):
    """Return the pair of planar frame fields lifting the unit directions.

    Each returned callable maps a joint-angle array to the angle velocity of
    the horizontal lift of a unit end-effector velocity (east for the first
    field, north for the second).  Raises NearCritical when evaluated at a
    numerically aligned configuration.
    """
    if spec.dim != 2:
        raise DimensionMismatch("horizontal frame fields are defined for planar arms")
    a = spec.lengths_array
    floor = singular_rel * spec.scale**2

    def make(e1: float, e2: float):
        def field(q):
            q = np.asarray(q, dtype=float)
            if q.shape != (spec.m,):
                raise DimensionMismatch(f"expected {spec.m} joint angles, got shape {q.shape}")
            asv = a * np.sin(q)
            acv = a * np.cos(q)
            p11 = float(asv @ asv)
            p22 = float(acv @ acv)
            p12 = -float(asv @ acv)
            det = p11 * p22 - p12 * p12
            if det <= floor:
                raise NearCritical(
                    "frame field evaluated at a numerically aligned configuration",
                    det_gram=det,
                )
            u1 = (p22 * e1 - p12 * e2) / det
            u2 = (-p12 * e1 + p11 * e2) / det
            return -asv * u1 + acv * u2

        return field

    return make(1.0, 0.0), make(0.0, 1.0)


def holonomy_map(
    spec: ArmSpec,
    loop: CurveSpec,
    q0: Configuration,
    options: LiftOptions | None = None,
) -> Configuration:
    """Lift a closed loop of regular values and return the end configuration.

    The loop must return to its starting point; the result lies in the same
    fiber as ``q0`` up to integration tolerance.
    """
    if not loop.is_closed():
        raise ValueError("holonomy requires a closed loop")
    traj = lift_path(spec, q0, loop, options)
    return traj.final_config


@dataclass(frozen=True)
class HolonomyReport:
    """Measured square-loop holonomy together with its curvature prediction.

    ``displacement`` is the angle-space difference end minus start.  The
    prediction is side**2 times the numerical bracket of the two horizontal
    frame fields at the start.  ``gamma_estimate`` is the constant-component
    coefficient when displacement / side**2 is decomposed against the three
    fields (a_j sin q_j), (a_j cos q_j) and (a_j**2); by the curvature
    identity it converges to 1 / det P as the side shrinks.  The first two
    basis fields span the same plane as the gradient fields of the effector
    coordinates, so the decomposition is exact in the leading order for any
    segment lengths; ``basis_rank`` < 3 flags arms (m = 2) where the
    constant field is not independent and the estimate carries no information.
    """

    loop: CurveSpec
    start: Configuration
    end: Configuration
    displacement: np.ndarray
    commutator_prediction: np.ndarray
    gamma_estimate: float
    side: float
    det_gram: float
    basis_rank: int
    coefficients: np.ndarray
    residual: float

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "start": self.start.to_dict(),
            "end": self.end.to_dict(),
            "displacement": [float(x) for x in self.displacement],
            "commutator_prediction": [float(x) for x in self.commutator_prediction],
            "gamma_estimate": self.gamma_estimate,
            "det_gram": self.det_gram,
            "basis_rank": self.basis_rank,
            "coefficients": [float(x) for x in self.coefficients],
            "residual": self.residual,
        }


def commutator_estimate(
    spec: ArmSpec,
    q: Configuration,
    basepoint=None,
    side: float = 0.05,
    options: LiftOptions | None = None,
) -> HolonomyReport:
    """Lift the axis-aligned square of the given side at the effector point.

    ``basepoint``, when given, must coincide with the effector position of
    ``q`` within 1e-8 (it exists so callers can pin the corner they believe
    they are at).  The whole square must stay inside regular values or the
    lift raises NearCritical.
    """
    if spec.dim != 2:
        raise DimensionMismatch("commutator estimate is defined for planar arms")
    if side <= 0.0:
        raise ValueError("side must be positive")
    config = q if isinstance(q, Configuration) else Configuration.from_angles(np.asarray(q, dtype=float))
    base = eval_arm(spec, config)
    if basepoint is not None:
        want = np.asarray(
            [basepoint.real, basepoint.imag] if isinstance(basepoint, complex) else basepoint,
            dtype=float,
        )
        if want.shape != (2,):
            raise DimensionMismatch("basepoint must be a planar point")
        if float(np.hypot(*(want - base))) > 1e-8:
            raise ValueError("basepoint does not match the effector position of q")
        base = want

    loop = CurveSpec([SquareLoop(corner=(float(base[0]), float(base[1])), side=side)])
    traj = lift_path(spec, config, loop, options)
    start_angles = traj.states[0]
    displacement = traj.states[-1] - start_angles

    field_e, field_n = horizontal_frame_fields(spec)
    bracket = lie_bracket_numeric(field_e, field_n, start_angles)
    prediction = side**2 * bracket

    basis = np.stack(
        [
            planar_field(spec, start_angles, "AS"),
            planar_field(spec, start_angles, "AC"),
            planar_field(spec, start_angles, "A2"),
        ],
        axis=1,
    )
    coefficients, _, rank, _ = np.linalg.lstsq(basis, displacement / side**2, rcond=None)
    residual = float(np.linalg.norm(basis @ coefficients - displacement / side**2))

    return HolonomyReport(
        loop=loop,
        start=config,
        end=traj.final_config,
        displacement=displacement,
        commutator_prediction=prediction,
        gamma_estimate=float(coefficients[2]),
        side=float(side),
        det_gram=det_gram_closed_form(spec, config),
        basis_rank=int(rank),
        coefficients=np.asarray(coefficients, dtype=float),
        residual=residual,
    )
