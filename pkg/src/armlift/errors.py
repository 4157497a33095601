"""Exception types shared across the package."""

from __future__ import annotations


class ArmError(Exception):
    """Base class for everything raised on purpose by this package."""


class DimensionMismatch(ArmError, ValueError):
    """Inputs disagree on segment count or ambient dimension."""


class NearCritical(ArmError, RuntimeError):
    """The configuration is too close to an aligned (rank-deficient) one.

    Carries the offending Gram determinant, the distance from the current
    end-effector radius to the nearest critical radius, and -- when raised
    mid-integration -- the partial trajectory accumulated so far.
    """

    def __init__(self, message, det_gram=None, critical_distance=None, partial=None):
        super().__init__(message)
        self.det_gram = det_gram
        self.critical_distance = critical_distance
        self.partial = partial


class TrackingDiverged(ArmError, RuntimeError):
    """The lifted path stopped following the target curve."""

    def __init__(self, message, tracking_error=None, partial=None):
        super().__init__(message)
        self.tracking_error = tracking_error
        self.partial = partial


class OrientationMismatch(ArmError, ValueError):
    """No orientation-preserving circle map sends one triple to the other."""


class IndeterminateIndex(ArmError, RuntimeError):
    """A constrained Hessian eigenvalue sits inside the zero band."""


class NotAtBasepoint(ArmError, RuntimeError):
    """A holonomy snapshot was requested away from the session basepoint."""
