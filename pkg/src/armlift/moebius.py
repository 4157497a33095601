"""The Moebius machinery: SU(1,1) circle maps, gradient flows on spheres,
cross-ratio invariants, and the per-length-class group action.

Planar arms see the circle group directly: elements are matrices
``[[a, b], [conj(b), conj(a)]]`` with ``|a|^2 - |b|^2 = 1`` acting by
``z -> (a z + b) / (conj(b) z + conj(a))``.  In higher dimension the group
is handled as words in two generator kinds: gradient flows of the linear
height functions ``x -> <x, s>`` and rigid rotations.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .arm import ArmSpec, Configuration
from .errors import DimensionMismatch, OrientationMismatch

__all__ = [
    "SU11Element",
    "SU11Algebra",
    "GEN_C",
    "GEN_S",
    "GEN_U",
    "su11_exp",
    "gamma_element",
    "flow_gamma_planar",
    "sphere_gradient",
    "flow_gamma",
    "FlowGenerator",
    "RotationGenerator",
    "MoebiusWord",
    "GroupElement",
    "act_group",
    "orientation",
    "cross_ratio",
    "cross_ratio_complex",
    "cross_ratio_weak",
    "moebius_through_triple",
]


# ---------------------------------------------------------------------------
# SU(1,1) elements and their algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SU11Element:
    """A matrix ``[[a, b], [conj(b), conj(a)]]`` with ``|a|^2 - |b|^2 = 1``."""

    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        disc = abs(a) ** 2 - abs(b) ** 2
        # any positive rescale of a disk-preserving matrix is the same
        # homography, so normalize rather than insist on disc == 1 exactly;
        # hyperbolic elements at large times lose that equality to roundoff
        if not np.isfinite(disc) or disc <= 0:
            raise ValueError("not an SU(1,1) matrix: |a|^2 - |b|^2 must be positive")
        root = np.sqrt(disc)
        object.__setattr__(self, "a", a / root)
        object.__setattr__(self, "b", b / root)

    @classmethod
    def identity(cls) -> "SU11Element":
        return cls(1.0 + 0j, 0.0 + 0j)

    @classmethod
    def rotation(cls, theta: float) -> "SU11Element":
        """The rotation ``z -> exp(i theta) z``."""
        return cls(cmath.exp(0.5j * theta), 0.0 + 0j)

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.a, self.b], [np.conj(self.b), np.conj(self.a)]], dtype=complex
        )

    def act(self, z):
        """Homography ``(a z + b) / (conj(b) z + conj(a))``.

        Accepts a complex scalar or array; the denominator never vanishes
        on the closed unit disk.
        """
        z = np.asarray(z, dtype=complex)
        out = (self.a * z + self.b) / (np.conj(self.b) * z + np.conj(self.a))
        return complex(out) if out.ndim == 0 else out

    def compose(self, other: "SU11Element") -> "SU11Element":
        """``self`` after ``other`` (matrix product ``self @ other``)."""
        a = self.a * other.a + self.b * np.conj(other.b)
        b = self.a * other.b + self.b * np.conj(other.a)
        return SU11Element(a, b)

    def inverse(self) -> "SU11Element":
        return SU11Element(np.conj(self.a), -self.b)


@dataclass(frozen=True)
class SU11Algebra:
    """An element ``[[i u, b], [conj(b), -i u]]`` of the Lie algebra su(1,1)."""

    u: float
    b: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            [[1j * self.u, self.b], [np.conj(self.b), -1j * self.u]], dtype=complex
        )

    @classmethod
    def c_s(cls, s: complex) -> "SU11Algebra":
        """The infinitesimal generator ``C_s = [[0, s/2], [conj(s)/2, 0]]``."""
        return cls(u=0.0, b=complex(s) / 2.0)


#: the three standard generators; exp(t*GEN_U) is the rotation z -> exp(it) z
GEN_C = SU11Algebra(u=0.0, b=0.5j)
GEN_S = SU11Algebra(u=0.0, b=0.5 + 0j)
GEN_U = SU11Algebra(u=0.5, b=0.0 + 0j)


def su11_exp(gen: SU11Algebra, t: float = 1.0) -> SU11Element:
    """Matrix exponential ``exp(t * gen)``, in closed form.

    ``gen.matrix`` squares to ``(|b|^2 - u^2) I``, so the exponential is
    ``cosh(r) I + (sinh(r)/r) M`` with ``r = t sqrt(|b|^2 - u^2)`` taken as
    a complex square root (elliptic elements come out through cos/sin).
    """
    m = t * gen.matrix
    disc = complex(abs(t * gen.b) ** 2 - (t * gen.u) ** 2)
    r = np.sqrt(disc)
    if abs(r) < 1e-12:
        sinc = 1.0 + disc / 6.0  # sinh(r)/r for tiny r
        cosh = 1.0 + disc / 2.0
    else:
        sinc = np.sinh(r) / r
        cosh = np.cosh(r)
    mat = cosh * np.eye(2, dtype=complex) + sinc * m
    return SU11Element(mat[0, 0], mat[0, 1])


def gamma_element(s: complex, t: float) -> SU11Element:
    """The flow ``Gamma_t^s`` as an SU(1,1) element.

    ``s`` must be a unit complex number; the map is
    ``z -> (cosh(t/2) z + s sinh(t/2)) / (conj(s) sinh(t/2) z + cosh(t/2))``
    and fixes ``+-s``, attracting toward ``s``.
    """
    s = complex(s)
    if abs(abs(s) - 1.0) > 1e-9:
        raise ValueError("the flow parameter s must sit on the unit circle")
    return SU11Element(np.cosh(t / 2.0), s * np.sinh(t / 2.0))


def flow_gamma_planar(s: complex, t: float, z):
    """Apply ``Gamma_t^s`` to circle points given as complex numbers.

    Uses the tanh form ``(z + s tanh(t/2)) / (conj(s) tanh(t/2) z + 1)``,
    which stays finite for arbitrarily large ``|t|`` where the cosh/sinh
    matrix entries would overflow.
    """
    s = complex(s)
    if abs(abs(s) - 1.0) > 1e-9:
        raise ValueError("the flow parameter s must sit on the unit circle")
    th = np.tanh(t / 2.0)
    z = np.asarray(z, dtype=complex)
    out = (z + s * th) / (np.conj(s) * th * z + 1.0)
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Flows on S^{d-1} for any d
# ---------------------------------------------------------------------------


def sphere_gradient(s, x) -> np.ndarray:
    """Gradient of the height function ``<., s>`` on the sphere at ``x``.

    Equals ``s - <x, s> x``, the tangential part of the constant field
    ``s``.  The formula is a smooth extension to all of R^d, which is what
    the finite-difference bracket helpers differentiate.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    return s - float(x @ s) * x


def flow_gamma(s, t: float, x) -> np.ndarray:
    """Time-``t`` gradient flow of ``<., s>`` on the unit sphere.

    Writing ``x = cos(theta) s + sin(theta) w`` with ``w`` a unit vector
    orthogonal to ``s``, the flow keeps the plane spanned by ``s, w`` and
    contracts the angle through ``tan(theta'/2) = exp(-t) tan(theta/2)``.
    The antipode ``-s`` is the unstable fixed point and is returned
    unchanged, as is ``s`` itself.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    if s.shape != x.shape:
        raise DimensionMismatch("flow parameter and point must share a dimension")
    ns, nx = np.linalg.norm(s), np.linalg.norm(x)
    if abs(ns - 1.0) > 1e-6 or abs(nx - 1.0) > 1e-6:
        raise ValueError("flow_gamma expects unit vectors")
    s, x = s / ns, x / nx
    c = float(np.clip(x @ s, -1.0, 1.0))
    w = x - c * s
    sw = float(np.linalg.norm(w))
    if sw < 1e-15:
        return (s if c > 0 else -s).copy()
    w = w / sw
    # tan(theta/2) = sin/(1+cos) stays finite away from the exact antipode
    half = np.exp(-t) * (sw / (1.0 + c))
    theta = 2.0 * np.arctan(half)
    return np.cos(theta) * s + np.sin(theta) * w


# ---------------------------------------------------------------------------
# Words of generators for d >= 3, and the per-class group action
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowGenerator:
    """One ``Gamma_t^s`` factor of a word."""

    s: tuple[float, ...]
    t: float

    def apply(self, x: np.ndarray) -> np.ndarray:
        return flow_gamma(np.asarray(self.s, dtype=float), self.t, x)

    def inverse(self) -> "FlowGenerator":
        return FlowGenerator(self.s, -self.t)


@dataclass(frozen=True)
class RotationGenerator:
    """A rigid rotation factor of a word."""

    matrix_entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        r = self.rotation_matrix
        if np.max(np.abs(r.T @ r - np.eye(r.shape[0]))) > 1e-9:
            raise ValueError("rotation factor is not orthogonal")

    @property
    def rotation_matrix(self) -> np.ndarray:
        return np.asarray(self.matrix_entries, dtype=float)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.rotation_matrix @ x

    def inverse(self) -> "RotationGenerator":
        return RotationGenerator(tuple(map(tuple, self.rotation_matrix.T)))


@dataclass(frozen=True)
class MoebiusWord:
    """A Moebius transformation of S^{d-1} as a list of generator factors.

    Factors apply left to right: ``word.act(x)`` feeds ``x`` through
    ``factors[0]`` first.
    """

    factors: tuple = ()

    def act(self, x) -> np.ndarray:
        y = np.asarray(x, dtype=float).copy()
        for f in self.factors:
            y = f.apply(y)
        return y

    def compose(self, other: "MoebiusWord") -> "MoebiusWord":
        """``self`` after ``other``."""
        return MoebiusWord(tuple(other.factors) + tuple(self.factors))

    def inverse(self) -> "MoebiusWord":
        return MoebiusWord(tuple(f.inverse() for f in reversed(self.factors)))


@dataclass(frozen=True)
class GroupElement:
    """One Moebius transformation per length value class of an arm.

    ``per_class[i]`` acts on the segments of ``spec.value_classes[i]``;
    zero-length segments belong to no class and never move.  Planar
    entries are ``SU11Element``; higher-dimensional ones are
    ``MoebiusWord``.
    """

    dim: int
    per_class: tuple

    @classmethod
    def identity(cls, spec: ArmSpec) -> "GroupElement":
        if spec.dim == 2:
            members = tuple(SU11Element.identity() for _ in spec.value_classes)
        else:
            members = tuple(MoebiusWord() for _ in spec.value_classes)
        return cls(dim=spec.dim, per_class=members)


def act_group(g: GroupElement, spec: ArmSpec, config: Configuration) -> Configuration:
    """Apply a per-class group element to a configuration.

    Segments in the same class with the same position stay coincident
    exactly (the identical computation runs on identical inputs).
    """
    if g.dim != spec.dim:
        raise DimensionMismatch("group element dimension does not match the arm")
    if len(g.per_class) != spec.sharp:
        raise DimensionMismatch(
            f"expected {spec.sharp} per-class elements, got {len(g.per_class)}"
        )
    if config.m != spec.m or config.dim != spec.dim:
        raise DimensionMismatch("configuration does not match the arm")
    out = np.array(config.vectors, dtype=float)
    for (_, indices), elem in zip(spec.value_classes, g.per_class):
        if spec.dim == 2:
            z = config.as_complex()[list(indices)]
            w = np.asarray(elem.act(z), dtype=complex)
            out[list(indices), 0] = w.real
            out[list(indices), 1] = w.imag
        else:
            for j in indices:
                out[j] = elem.act(config.vectors[j])
    return Configuration(out)


# ---------------------------------------------------------------------------
# Orientation and cross-ratio invariants
# ---------------------------------------------------------------------------


def _require_distinct(points, tol: float = 1e-9):
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if abs(pts[i] - pts[j]) <= tol:
                raise ValueError("points must be pairwise distinct")


def orientation(z1: complex, z2: complex, z3: complex) -> int:
    """Cyclic orientation of a distinct triple on the unit circle.

    ``+1`` for counterclockwise, ``-1`` for clockwise; the sign of the
    signed area of the triangle, computed as
    ``Im(conj(z1) z2 + conj(z2) z3 + conj(z3) z1)``.
    """
    z1, z2, z3 = complex(z1), complex(z2), complex(z3)
    _require_distinct((z1, z2, z3))
    area2 = (np.conj(z1) * z2 + np.conj(z2) * z3 + np.conj(z3) * z1).imag
    if area2 == 0.0:
        raise ValueError("degenerate triple: zero signed area")
    return 1 if area2 > 0 else -1


def cross_ratio(zi: complex, zj: complex, zk: complex, zl: complex) -> float:
    """Real cross-ratio of four distinct cocircular points.

    ``(zi - zk)/(zi - zl) * (zj - zl)/(zj - zk)``; equivalently the image
    of ``zl``-free normalization: the Moebius map sending
    ``(zi, zj, zk) -> (inf, 0, 1)`` sends ``zl`` to this value.  The
    imaginary part (roundoff for genuinely cocircular inputs) is checked
    and discarded.
    """
    zi, zj, zk, zl = (complex(w) for w in (zi, zj, zk, zl))
    _require_distinct((zi, zj, zk, zl))
    value = (zi - zk) / (zi - zl) * (zj - zl) / (zj - zk)
    if abs(value.imag) > 1e-9 * max(1.0, abs(value)):
        raise ValueError("cross-ratio came out non-real; points are not cocircular")
    return float(value.real)


_POLE_CANDIDATES = (
    (0.0, 0.0, 1.0),
    (0.0, 0.0, -1.0),
    (1.0, 0.0, 0.0),
    (-1.0, 0.0, 0.0),
    (0.0, 1.0, 0.0),
    (0.0, -1.0, 0.0),
)


def _rotation_to_north(pole: np.ndarray) -> np.ndarray:
    """An SO(3) matrix sending ``pole`` to ``(0, 0, 1)``."""
    n = np.array([0.0, 0.0, 1.0])
    c = float(np.clip(pole @ n, -1.0, 1.0))
    if c > 1.0 - 1e-12:
        return np.eye(3)
    if c < -1.0 + 1e-12:
        return np.diag([1.0, -1.0, -1.0])
    axis = np.cross(pole, n)
    axis = axis / np.linalg.norm(axis)
    k = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    s = np.sqrt(max(0.0, 1.0 - c * c))
    return np.eye(3) + s * k + (1.0 - c) * (k @ k)


def _stereographic(points: np.ndarray, pole: np.ndarray) -> np.ndarray:
    rot = _rotation_to_north(pole)
    p = points @ rot.T
    return (p[:, 0] + 1j * p[:, 1]) / (1.0 - p[:, 2])


def cross_ratio_complex(x1, x2, x3, x4, pole_clearance: float = 1e-6) -> complex:
    """Complex cross-ratio of four points of S^2 via stereographic projection.

    The projection pole is chosen from a fixed candidate list so that no
    input sits within ``pole_clearance`` of it; the value is recomputed
    from a second admissible pole and the two must agree to ``1e-9``
    (stereographic projections from different poles differ by a Moebius
    map of the plane, which preserves the cross-ratio).
    """
    pts = np.stack([np.asarray(p, dtype=float) for p in (x1, x2, x3, x4)])
    if pts.shape != (4, 3):
        raise DimensionMismatch("complex cross-ratio needs four points of S^2")
    for i in range(4):
        for j in range(i + 1, 4):
            if np.linalg.norm(pts[i] - pts[j]) <= 1e-9:
                raise ValueError("points must be pairwise distinct")
    clearance = max(pole_clearance, 1e-3)
    poles = []
    for cand in _POLE_CANDIDATES:
        c = np.asarray(cand)
        if np.min(np.linalg.norm(pts - c, axis=1)) > clearance:
            poles.append(c)
        if len(poles) == 2:
            break
    if len(poles) < 2:
        raise ValueError("could not find projection poles clear of the inputs")
    values = []
    for pole in poles:
        w = _stereographic(pts, pole)
        values.append((w[0] - w[2]) / (w[0] - w[3]) * (w[1] - w[3]) / (w[1] - w[2]))
    if abs(values[0] - values[1]) > 1e-9 * max(1.0, abs(values[0])):
        raise ValueError("cross-ratio disagrees between projection poles")
    return complex(values[0])


def cross_ratio_weak(x1, x2, x3, x4) -> float:
    """Absolute cross-ratio from chordal distances, defined in any dimension.

    ``(|x1-x3| / |x1-x4|) * (|x2-x4| / |x2-x3|)``.  Restricted to the
    circle this is the absolute value of :func:`cross_ratio`.
    """
    p = [np.asarray(x, dtype=float) for x in (x1, x2, x3, x4)]
    d = {}
    for (i, j) in ((0, 2), (0, 3), (1, 3), (1, 2)):
        d[i, j] = float(np.linalg.norm(p[i] - p[j]))
        if d[i, j] <= 1e-12:
            raise ValueError("points must be pairwise distinct")
    return d[0, 2] / d[0, 3] * d[1, 3] / d[1, 2]


# ---------------------------------------------------------------------------
# The circle map through a corresponding triple
# ---------------------------------------------------------------------------


def moebius_through_triple(sources, targets) -> SU11Element:
    """The unique circle-preserving homography sending one triple to another.

    Both triples must be pairwise distinct points of the unit circle with
    the same cyclic orientation; otherwise the only fractional-linear
    solution swaps the disk with its exterior and
    :class:`OrientationMismatch` is raised.

    The conditions ``g(w_i) = v_i`` are linear in ``(Re a, Im a, Re b,
    Im b)``; the one-dimensional real null space of the resulting 6x4
    system is the solution ray, normalized here to ``|a|^2 - |b|^2 = 1``.
    """
    w = [complex(x) for x in sources]
    v = [complex(x) for x in targets]
    if len(w) != 3 or len(v) != 3:
        raise ValueError("exactly three source and three target points required")
    _require_distinct(w)
    _require_distinct(v)
    rows = []
    for wi, vi in zip(w, v):
        # a*wi + b - vi*conj(b)*wi - vi*conj(a) = 0
        coeff = (
            wi - vi,  # multiplies Re a
            1j * (wi + vi),  # multiplies Im a
            1.0 - vi * wi,  # multiplies Re b
            1j * (1.0 + vi * wi),  # multiplies Im b
        )
        rows.append([c.real for c in coeff])
        rows.append([c.imag for c in coeff])
    _, sing, vt = np.linalg.svd(np.asarray(rows))
    x = vt[-1]
    disc = (x[0] ** 2 + x[1] ** 2) - (x[2] ** 2 + x[3] ** 2)
    if abs(disc) < 1e-12:
        raise ValueError("degenerate triple correspondence")
    if disc < 0:
        raise OrientationMismatch(
            "triples have opposite cyclic orientation; no circle-preserving map"
        )
    root = np.sqrt(disc)
    g = SU11Element(complex(x[0], x[1]) / root, complex(x[2], x[3]) / root)
    residual = max(abs(g.act(wi) - vi) for wi, vi in zip(w, v))
    if residual > 1e-9:
        raise ValueError(f"triple map residual {residual:.2e} exceeds 1e-9")
    return g
