"""Critical structure of the angle-sum function on planar fibers.

For an equal-length planar arm the product of the joint directions descends
to a circle-valued function on each fiber of the effector map; its lift is
the plain sum of joint angles.  The critical points are the configurations
whose components take exactly two values, one angle for the components kept
"up" and one for the flipped subset, and the Morse index of such a point is
the size of the flipped subset minus one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .arm import ArmSpec, Configuration, eval_arm
from .errors import DimensionMismatch, IndeterminateIndex, NearCritical

__all__ = [
    "rho",
    "rho_lift",
    "grad_rho_b",
    "CriticalPoint",
    "critical_points",
    "morse_index",
    "morse_census",
    "euler_characteristic",
    "curvature_scales",
    "block_hessian_model",
    "chart_map",
    "chart_hessian",
]


def _angles_of(q) -> np.ndarray:
    if isinstance(q, Configuration):
        if q.angles is None:
            raise DimensionMismatch("angle lift only exists for planar configurations")
        return np.asarray(q.angles, dtype=float)
    out = np.asarray(q, dtype=float)
    if out.ndim != 1:
        raise DimensionMismatch("expected a flat sequence of joint angles")
    return out


def rho(config: Configuration) -> complex:
    """Product of the planar joint directions, a point of the unit circle."""
    if isinstance(config, Configuration):
        z = config.as_complex()
    else:
        z = np.exp(1j * _angles_of(config))
    return complex(np.prod(z))


def rho_lift(q) -> float:
    """Sum of joint angles: the lift of ``rho`` along a continuous angle history."""
    return float(np.sum(_angles_of(q)))


def grad_rho_b(spec: ArmSpec, q, b=None, singular_rel: float = 1e-10) -> np.ndarray:
    """Gradient of the angle sum restricted to the fiber through ``q``.

    Computed by orthogonally projecting the all-ones vector (the ambient
    gradient of the angle sum) onto the tangent space of the fiber, via the
    2x2 Gram solve for the effector coordinate gradients.  When ``b`` is
    given it must match the effector position of ``q`` within 1e-8.
    """
    if spec.dim != 2:
        raise DimensionMismatch("the fiber angle-sum function is planar")
    angles = _angles_of(q)
    if angles.shape != (spec.m,):
        raise DimensionMismatch(f"expected {spec.m} joint angles, got shape {angles.shape}")
    if b is not None:
        if isinstance(b, complex):
            want = np.array([b.real, b.imag])
        elif np.isscalar(b):
            want = np.array([float(b), 0.0])
        else:
            want = np.asarray(b, dtype=float)
        have = eval_arm(spec, Configuration.from_angles(angles))
        if float(np.hypot(*(have - want))) > 1e-8:
            raise ValueError("q does not lie over the stated basepoint")

    a = spec.lengths_array
    g1 = -a * np.sin(angles)  # gradient of the first effector coordinate
    g2 = a * np.cos(angles)
    p11 = float(g1 @ g1)
    p22 = float(g2 @ g2)
    p12 = float(g1 @ g2)
    det = p11 * p22 - p12 * p12
    if det <= singular_rel * spec.scale**2:
        raise NearCritical(
            "fiber tangent space is numerically degenerate", det_gram=det
        )
    r1 = float(np.sum(g1))
    r2 = float(np.sum(g2))
    c1 = (p22 * r1 - p12 * r2) / det
    c2 = (-p12 * r1 + p11 * r2) / det
    return np.ones(spec.m) - c1 * g1 - c2 * g2


@dataclass(frozen=True)
class CriticalPoint:
    """A two-valued critical configuration of the fiber angle sum.

    ``subset`` holds the 0-based indices of the flipped components (angle
    ``-eta``); the remaining components sit at ``xi``.  ``index`` is the
    verified Morse index, always ``len(subset) - 1``.
    """

    subset: tuple[int, ...]
    xi: float
    eta: float
    config: Configuration
    index: int

    @property
    def level(self) -> float:
        """Value of the lifted angle sum at the point."""
        return rho_lift(self.config)

    def to_dict(self) -> dict:
        return {
            "subset": [int(i) for i in self.subset],
            "xi": self.xi,
            "eta": self.eta,
            "index": self.index,
            "angles": [float(x) for x in self.config.angles],
            "level": self.level,
        }


def _unit_radii(m: int) -> list[float]:
    return sorted({float(abs(m - 2 * k)) for k in range(m + 1)})


def critical_points(m: int, b: float) -> tuple[CriticalPoint, ...]:
    """Enumerate the critical points of the angle sum over a real basepoint.

    The arm has ``m`` unit segments and ``b`` must be a positive regular
    value (distance > 1e-9 from every radius in {m, m-2, ...}).  For each
    subset K of flipped components with |m - 2|K|| < b < m the two angles
    come from the triangle with side lengths m - |K|, |K| and b.  Every
    emitted point is verified: it lies over ``b`` within 1e-10 and the
    projected gradient vanishes within 1e-8.
    """
    if m < 2 or int(m) != m:
        raise ValueError("m must be an integer >= 2")
    m = int(m)
    if not (b > 0.0) or not math.isfinite(b):
        raise ValueError("b must be a positive real number")
    if min(abs(b - r) for r in _unit_radii(m)) <= 1e-9:
        raise ValueError(f"b={b} is a critical value of the {m}-segment unit arm")

    spec = ArmSpec((1.0,) * m, 2)
    points: list[CriticalPoint] = []
    for size in range(1, m):
        if not (abs(m - 2 * size) < b < m):
            continue
        big = m - size  # components staying up
        cos_xi = (b * b + big * big - size * size) / (2.0 * b * big)
        cos_eta = (b * b - big * big + size * size) / (2.0 * b * size)
        xi = math.acos(max(-1.0, min(1.0, cos_xi)))
        eta = math.acos(max(-1.0, min(1.0, cos_eta)))
        for subset in itertools.combinations(range(m), size):
            angles = np.full(m, xi)
            angles[list(subset)] = -eta
            config = Configuration.from_angles(angles)
            closure = eval_arm(spec, config) - np.array([b, 0.0])
            if float(np.hypot(*closure)) > 1e-10:
                raise RuntimeError(
                    f"two-valued configuration for subset {subset} misses the basepoint"
                )
            grad = grad_rho_b(spec, config)
            if float(np.linalg.norm(grad)) > 1e-8:
                raise RuntimeError(
                    f"projected gradient does not vanish at subset {subset}"
                )
            idx = _tangent_index(spec, angles)
            if idx != size - 1:
                raise RuntimeError(
                    f"Hessian index {idx} disagrees with subset size {size}"
                )
            points.append(
                CriticalPoint(subset=subset, xi=xi, eta=eta, config=config, index=idx)
            )
    return tuple(points)


def _tangent_index(spec: ArmSpec, angles: np.ndarray, zero_band: float = 1e-8) -> int:
    """Morse index of the constrained angle sum via the multiplier-corrected Hessian."""
    a = spec.lengths_array
    g1 = -a * np.sin(angles)
    g2 = a * np.cos(angles)
    jac = np.stack([g1, g2])
    lam, *_ = np.linalg.lstsq(jac.T, np.ones(spec.m), rcond=None)
    # Hessians of the two constraint coordinates are diagonal; the angle sum
    # itself has no second derivative, so only the multiplier terms survive.
    hess_diag = lam[0] * a * np.cos(angles) + lam[1] * a * np.sin(angles)

    _, sing, vt = np.linalg.svd(jac)
    if sing.size < 2 or sing[1] < 1e-12 * max(1.0, sing[0]):
        raise NearCritical("constraint gradients are numerically dependent")
    tangent = vt[2:]  # orthonormal basis of the fiber tangent space
    if tangent.shape[0] == 0:
        return 0
    restricted = tangent @ np.diag(hess_diag) @ tangent.T
    eigs = np.linalg.eigvalsh(restricted)
    top = float(np.max(np.abs(eigs)))
    if top == 0.0 or np.any(np.abs(eigs) <= zero_band * top):
        raise IndeterminateIndex(
            "constrained Hessian has an eigenvalue inside the zero band"
        )
    return int(np.sum(eigs < 0.0))


def morse_index(spec: ArmSpec, b: float, cp) -> int:
    """Number of negative eigenvalues of the constrained Hessian at ``cp``.

    ``cp`` may be a CriticalPoint or a Configuration lying over ``b``.
    Raises IndeterminateIndex if the restricted Hessian has an eigenvalue
    indistinguishable from zero (relative band 1e-8).
    """
    config = cp.config if isinstance(cp, CriticalPoint) else cp
    angles = _angles_of(config)
    have = eval_arm(spec, Configuration.from_angles(angles))
    want = np.asarray([b.real, b.imag] if isinstance(b, complex) else [float(b), 0.0])
    if float(np.hypot(*(have - want))) > 1e-8:
        raise ValueError("critical point does not lie over the stated basepoint")
    return _tangent_index(spec, angles)


def morse_census(m: int, b: float) -> dict[int, int]:
    """Count critical points by Morse index for the m-segment unit arm over b."""
    counts: dict[int, int] = {}
    for point in critical_points(m, b):
        counts[point.index] = counts.get(point.index, 0) + 1
    return dict(sorted(counts.items()))


def euler_characteristic(counts: dict[int, int]) -> int:
    """Alternating sum of the census, the Euler characteristic of the fiber."""
    return int(sum((-1) ** k * c for k, c in counts.items()))


def curvature_scales(P: int, N: int, b: float) -> tuple[float, float]:
    """Second-derivative scales of the two chart blocks at a two-valued point.

    ``P`` and ``N`` are the sizes of the up and flipped groups; the relevant
    triangle has side lengths P, N and b.  The first scale (up block) is
    negative, the second is its negation: both have magnitude
    P*N*(1 + cos(gamma)) / (2*area) with gamma the angle opposite the side b.
    """
    if P < 1 or N < 1:
        raise ValueError("both groups must be nonempty")
    sq = (
        2.0 * (P * N) ** 2
        + 2.0 * (P * b) ** 2
        + 2.0 * (N * b) ** 2
        - float(P) ** 4
        - float(N) ** 4
        - float(b) ** 4
    )
    if sq <= 0.0:
        raise ValueError("degenerate triangle: b is a critical value for this split")
    area = math.sqrt(sq) / 4.0
    cos_gamma = (P * P + N * N - b * b) / (2.0 * P * N)
    s_u = -P * N * (1.0 + cos_gamma) / (2.0 * area)
    return s_u, -s_u


def _ones_block(k: int) -> np.ndarray:
    # k x k matrix with -2 on the diagonal and -1 elsewhere; eigenvalues
    # -(k + 1) once and -1 with multiplicity k - 1.
    return -(np.eye(k) + np.ones((k, k)))


def block_hessian_model(P: int, N: int, b: float) -> np.ndarray:
    """Predicted chart Hessian of the angle sum at a two-valued point.

    Block diagonal: the up block is ``s_u`` times the (P-1)-dimensional
    all-pairs matrix, the flipped block ``s_v`` times the (N-1)-dimensional
    one, with the scales from ``curvature_scales``.
    """
    s_u, s_v = curvature_scales(P, N, b)
    out = np.zeros((P + N - 2, P + N - 2))
    if P > 1:
        out[: P - 1, : P - 1] = s_u * _ones_block(P - 1)
    if N > 1:
        out[P - 1 :, P - 1 :] = s_v * _ones_block(N - 1)
    return out


def chart_map(m: int, b: float, n_flipped: int):
    """Local parametrization around the two-valued point with the given split.

    Returns a callable taking an (m - 2)-vector, the concatenation of P - 1
    perturbation angles for the up group and N - 1 for the flipped group,
    and producing the m joint angles.  The flipped components are the last
    ``n_flipped`` indices.  At the origin it reproduces the critical point;
    the two compensating angles (one per group) keep each group's chord
    length consistent to first order.
    """
    N = int(n_flipped)
    P = m - N
    if P < 1 or N < 1:
        raise ValueError("both groups must be nonempty")

    def phi(t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if t.shape != (m - 2,):
            raise DimensionMismatch(f"chart takes {m - 2} parameters")
        tq = t[: P - 1]
        tr = t[P - 1 :]
        sin_u = float(np.sum(np.sin(tq)))
        sin_v = float(np.sum(np.sin(tr)))
        u = float(np.sum(np.cos(tq))) + math.sqrt(max(0.0, 1.0 - sin_u * sin_u))
        v = float(np.sum(np.cos(tr))) + math.sqrt(max(0.0, 1.0 - sin_v * sin_v))
        xi = math.acos(max(-1.0, min(1.0, (b * b + u * u - v * v) / (2.0 * b * u))))
        eta = math.acos(max(-1.0, min(1.0, (b * b - u * u + v * v) / (2.0 * b * v))))
        q = np.empty(m)
        q[: P - 1] = xi + tq
        q[P - 1] = xi - math.asin(max(-1.0, min(1.0, sin_u)))
        q[P] = -eta - math.asin(max(-1.0, min(1.0, sin_v)))
        if N > 1:
            q[P + 1 :] = -eta + tr[::-1]
        return q

    return phi


def chart_hessian(m: int, b: float, n_flipped: int, h: float = 1e-4) -> np.ndarray:
    """Finite-difference Hessian of the angle sum in the two-valued chart."""
    phi = chart_map(m, b, n_flipped)
    n = m - 2

    def g(t) -> float:
        return float(np.sum(phi(t)))

    out = np.empty((n, n))
    g0 = g(np.zeros(n))
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        out[i, i] = (g(ei) - 2.0 * g0 + g(-ei)) / (h * h)
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            out[i, j] = (g(ei + ej) - g(ei - ej) - g(-ei + ej) + g(-ei - ej)) / (
                4.0 * h * h
            )
            out[j, i] = out[i, j]
    return out
