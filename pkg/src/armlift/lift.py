"""Horizontal lifting: minimal-norm inverse kinematics along a curve.

The horizontal space at a configuration is the orthogonal complement of
the kernel of the arm map's differential; lifting a curve means solving
``Df(w) = cdot(t)`` for the unique horizontal ``w`` at every instant.  In
coordinates that is ``w_j = a_j (I - z_j z_j^T) P^{-1} v`` with ``P`` the
Gram matrix, falling back to the pseudoinverse on the image when the arm
is structurally rank-deficient (a single moving segment, whose reachable
set is a sphere rather than a solid annulus).

Integration is classical fixed-step RK4.  Planar arms integrate the angle
vector directly (the lift stays continuous, nothing is wrapped); higher
dimensions integrate the stacked unit vectors and renormalize each row
after every full step.  Steps are aligned to the curve's breakpoints so a
corner never lands inside a step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arm import (
    ArmSpec,
    Configuration,
    critical_radii,
    eval_arm,
    gram,
    nearest_critical_distance,
)
from .curves import CurveSpec
from .errors import DimensionMismatch, NearCritical, TrackingDiverged
from .moebius import cross_ratio_complex, cross_ratio_weak, orientation

__all__ = [
    "LiftOptions",
    "LiftTrajectory",
    "DriftReport",
    "horizontal_vector",
    "lift_path",
    "monitor_invariants",
]


@dataclass(frozen=True)
class LiftOptions:
    """Tunables for :func:`lift_path`.

    ``step`` is the nominal RK4 step (each smooth piece is cut into equal
    steps no longer than this).  ``track_tol`` is the tracking error the
    caller considers healthy; ``diverge_tol`` aborts the integration.
    ``singular_rel`` scales the Gram-determinant guard by
    ``(sum a_j^2)^rank``.  ``margin`` > 0 additionally prechecks that the
    whole curve clears every critical radius by that much.
    """

    step: float = 1e-3
    track_tol: float = 1e-6
    diverge_tol: float = 1e-3
    singular_rel: float = 1e-10
    liftable_tol: float = 1e-8
    margin: float = 0.0


@dataclass
class LiftTrajectory:
    """A sampled horizontal lift with per-step diagnostics."""

    spec: ArmSpec
    times: np.ndarray
    states: np.ndarray  # (n, m) angles for d = 2, (n, m, d) unit vectors otherwise
    tracking_error: np.ndarray
    det_gram: np.ndarray
    step: float

    @property
    def planar(self) -> bool:
        return self.states.ndim == 2

    @property
    def samples(self) -> int:
        return self.states.shape[0]

    def config_at(self, i: int) -> Configuration:
        if self.planar:
            return Configuration.from_angles(self.states[i])
        return Configuration(self.states[i])

    @property
    def final_config(self) -> Configuration:
        return self.config_at(self.samples - 1)

    @property
    def final_angles(self) -> np.ndarray:
        if not self.planar:
            raise DimensionMismatch("angle history only exists for planar lifts")
        return self.states[-1].copy()

    @property
    def rho_lift(self) -> np.ndarray:
        """Sum of lifted angles per sample (log of the product coordinate)."""
        if not self.planar:
            raise DimensionMismatch("rho lift only exists for planar lifts")
        return self.states.sum(axis=1)

    @property
    def max_tracking_error(self) -> float:
        return float(np.max(self.tracking_error))


def _expected_rank(spec: ArmSpec) -> int:
    moving = sum(1 for a in spec.lengths if a != 0.0)
    if moving == 0:
        return 0
    if moving == 1:
        return spec.dim - 1
    return spec.dim


def horizontal_vector(
    spec: ArmSpec,
    config: Configuration,
    v,
    *,
    singular_rel: float = 1e-10,
    liftable_tol: float = 1e-8,
) -> np.ndarray:
    """Horizontal preimage of an effector velocity, one row per segment.

    Returns the ``(m, d)`` array ``w`` with ``w_j`` tangent to the j-th
    sphere, ``sum_j a_j w_j = v``, and ``w`` orthogonal to the kernel of
    the differential (the unique minimal-norm solution).  Raises
    :class:`NearCritical` when the Gram matrix is too close to singular
    for the arm's generic rank, or when ``v`` has a component outside the
    image (only possible for structurally deficient arms).
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.dim,):
        raise DimensionMismatch(f"velocity must live in R^{spec.dim}")
    p = gram(spec, config)
    lam, vec = np.linalg.eigh(p.entries)
    rank = _expected_rank(spec)
    scale = spec.scale
    if rank == 0:
        if np.linalg.norm(v) > liftable_tol:
            raise NearCritical("arm has no moving segment", det_gram=0.0)
        return np.zeros((spec.m, spec.dim))
    top_idx = np.arange(spec.dim - rank, spec.dim)
    if rank < spec.dim:
        basis = vec[:, top_idx]
        residual = v - basis @ (basis.T @ v)
        if np.linalg.norm(residual) > liftable_tol * max(1.0, np.linalg.norm(v)):
            raise NearCritical(
                "velocity leaves the reachable directions of a deficient arm",
                det_gram=p.det,
                critical_distance=nearest_critical_distance(spec, eval_arm(spec, config)),
            )
    minor = float(np.prod(lam[top_idx]))
    if minor <= singular_rel * scale**rank:
        raise NearCritical(
            "configuration is numerically aligned",
            det_gram=p.det,
            critical_distance=nearest_critical_distance(spec, eval_arm(spec, config)),
        )
    inv = np.zeros(spec.dim)
    inv[top_idx] = 1.0 / lam[top_idx]
    u = vec @ (inv * (vec.T @ v))
    z = config.vectors
    a = spec.lengths_array
    return a[:, None] * (u[None, :] - (z @ u)[:, None] * z)


# ---------------------------------------------------------------------------
# Right-hand sides for the two state representations
# ---------------------------------------------------------------------------


def _planar_rhs_factory(spec: ArmSpec, singular_rel: float, liftable_tol: float):
    a = spec.lengths_array
    a2 = a * a
    scale = spec.scale
    moving = np.flatnonzero(a)
    if moving.size == 0:
        raise NearCritical("arm has no moving segment", det_gram=0.0)

    if moving.size == 1:
        j = int(moving[0])

        def rhs(q: np.ndarray, v: np.ndarray) -> np.ndarray:
            tau = np.array([-np.sin(q[j]), np.cos(q[j])])
            along = float(v @ tau)
            residual = np.linalg.norm(v - along * tau)
            if residual > liftable_tol * max(1.0, np.linalg.norm(v)):
                raise NearCritical(
                    "velocity leaves the circle a single link can trace",
                    det_gram=0.0,
                )
            out = np.zeros_like(q)
            out[j] = along / a[j]
            return out

        return rhs

    floor = singular_rel * scale * scale

    def rhs(q: np.ndarray, v: np.ndarray) -> np.ndarray:
        s, c = np.sin(q), np.cos(q)
        asv, acv = a * s, a * c
        p11 = float(asv @ asv)
        p22 = float(acv @ acv)
        p12 = -float(asv @ acv)
        det = p11 * p22 - p12 * p12
        if det <= floor:
            raise NearCritical("configuration is numerically aligned", det_gram=det)
        u1 = (p22 * v[0] - p12 * v[1]) / det
        u2 = (-p12 * v[0] + p11 * v[1]) / det
        return -asv * u1 + acv * u2

    return rhs


def _planar_det(spec: ArmSpec, q: np.ndarray) -> float:
    a = spec.lengths_array
    asv, acv = a * np.sin(q), a * np.cos(q)
    p11 = float(asv @ asv)
    p22 = float(acv @ acv)
    p12 = -float(asv @ acv)
    return p11 * p22 - p12 * p12


def _spatial_rhs_factory(spec: ArmSpec, singular_rel: float, liftable_tol: float):
    def rhs(flat: np.ndarray, v: np.ndarray) -> np.ndarray:
        z = flat.reshape(spec.m, spec.dim)
        z = z / np.linalg.norm(z, axis=1)[:, None]
        cfg = Configuration(z)
        w = horizontal_vector(
            spec, cfg, v, singular_rel=singular_rel, liftable_tol=liftable_tol
        )
        return w.reshape(-1)

    return rhs


def _rk4_step(rhs, state, t, h, velocity):
    k1 = rhs(state, velocity(t))
    v_mid = velocity(t + 0.5 * h)
    k2 = rhs(state + 0.5 * h * k1, v_mid)
    k3 = rhs(state + 0.5 * h * k2, v_mid)
    k4 = rhs(state + h * k3, velocity(t + h))
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def lift_path(
    spec: ArmSpec,
    q0: Configuration,
    curve: CurveSpec,
    opts: LiftOptions | None = None,
) -> LiftTrajectory:
    """Integrate the horizontal lift of ``curve`` starting at ``q0``.

    The start configuration must sit over the curve's start point (within
    ``1e-8``).  Curves are not lifted through critical values: when the
    target's radius crosses a critical radius the integration aborts with
    NearCritical mid-flight (skipped for arms whose image is entirely
    critical, e.g. a single link, where the rank-aware lift handles the
    degeneracy itself).  On a near-critical encounter or tracking
    divergence the raised exception carries the partial trajectory in its
    ``partial`` attribute.
    """
    opts = opts or LiftOptions()
    if curve.dim != spec.dim:
        raise DimensionMismatch("curve and arm dimension differ")
    start_err = float(np.linalg.norm(eval_arm(spec, q0) - curve.point(0.0)))
    if start_err > 1e-8:
        raise ValueError(
            f"start configuration misses the curve start by {start_err:.2e}"
        )
    radii = critical_radii(spec)
    radial_guard = _expected_rank(spec) == spec.dim and radii.size > 0
    if opts.margin > 0.0 and radial_guard:
        knots = curve.breakpoints
        for lo, hi in zip(knots[:-1], knots[1:]):
            n = max(1, int(np.ceil((hi - lo) / max(opts.step, 1e-12))))
            for t in np.linspace(lo, hi, n + 1):
                r = float(np.linalg.norm(curve.point(float(t))))
                if float(np.min(np.abs(radii - r))) <= opts.margin:
                    raise NearCritical(
                        f"curve comes within {opts.margin} of a critical radius at t={t:.6g}",
                        critical_distance=float(np.min(np.abs(radii - r))),
                    )

    planar = spec.dim == 2
    if planar:
        state = np.array(q0.angles, dtype=float)
        rhs = _planar_rhs_factory(spec, opts.singular_rel, opts.liftable_tol)
        det_of = lambda st: _planar_det(spec, st)
        effector = lambda st: np.array(
            [spec.lengths_array @ np.cos(st), spec.lengths_array @ np.sin(st)]
        )
        renorm = lambda st: st
    else:
        state = q0.vectors.reshape(-1).copy()
        rhs = _spatial_rhs_factory(spec, opts.singular_rel, opts.liftable_tol)
        det_of = lambda st: gram(spec, Configuration(st.reshape(spec.m, spec.dim))).det
        effector = lambda st: spec.lengths_array @ st.reshape(spec.m, spec.dim)

        def renorm(st):
            z = st.reshape(spec.m, spec.dim)
            return (z / np.linalg.norm(z, axis=1)[:, None]).reshape(-1)

    times = [0.0]
    states = [state.copy()]
    tracking = [start_err]
    dets = [det_of(state)]

    def finish() -> LiftTrajectory:
        arr = np.asarray(states)
        if not planar:
            arr = arr.reshape(len(states), spec.m, spec.dim)
        return LiftTrajectory(
            spec=spec,
            times=np.asarray(times),
            states=arr,
            tracking_error=np.asarray(tracking),
            det_gram=np.asarray(dets),
            step=opts.step,
        )

    knots = curve.breakpoints
    r_prev = float(np.linalg.norm(curve.point(0.0)))
    for lo, hi in zip(knots[:-1], knots[1:]):
        span = float(hi - lo)
        n = max(1, int(np.ceil(span / opts.step - 1e-12)))
        h = span / n
        velocity = curve.piece_velocity(float(lo), float(hi))
        for k in range(n):
            t = float(lo + k * h)
            try:
                state = renorm(_rk4_step(rhs, state, t, h, velocity))
            except NearCritical as err:
                err.partial = finish()
                raise
            t_next = float(lo + (k + 1) * h) if k + 1 < n else float(hi)
            if radial_guard:
                r_now = float(np.linalg.norm(curve.point(t_next)))
                band_lo, band_hi = min(r_prev, r_now), max(r_prev, r_now)
                if bool(np.any((radii >= band_lo) & (radii <= band_hi))):
                    exc = NearCritical(
                        f"target radius crosses a critical radius near t={t_next:.6g}",
                        critical_distance=float(np.min(np.abs(radii - r_now))),
                        det_gram=det_of(state),
                    )
                    exc.partial = finish()
                    raise exc
                r_prev = r_now
            times.append(t_next)
            states.append(state.copy())
            err_now = float(np.linalg.norm(effector(state) - curve.point(t_next)))
            tracking.append(err_now)
            det_now = det_of(state)
            dets.append(det_now)
            if err_now > opts.diverge_tol:
                exc = TrackingDiverged(
                    f"tracking error {err_now:.2e} exceeds {opts.diverge_tol}",
                    tracking_error=err_now,
                )
                exc.partial = finish()
                raise exc
    return finish()


# ---------------------------------------------------------------------------
# Conservation-law monitoring
# ---------------------------------------------------------------------------


@dataclass
class DriftReport:
    """Worst-case drift of the conserved quantities along a trajectory."""

    coincidence: list = field(default_factory=list)
    cross_ratio: list = field(default_factory=list)
    orientation: list = field(default_factory=list)

    @property
    def max_coincidence_drift(self) -> float:
        return max((e["max_drift"] for e in self.coincidence), default=0.0)

    @property
    def max_cross_ratio_drift(self) -> float:
        return max((e["max_drift"] for e in self.cross_ratio), default=0.0)

    @property
    def orientations_constant(self) -> bool:
        return all(e["constant"] for e in self.orientation)

    def to_dict(self) -> dict:
        return {
            "coincidence": self.coincidence,
            "cross_ratio": self.cross_ratio,
            "orientation": self.orientation,
            "summary": {
                "max_coincidence_drift": self.max_coincidence_drift,
                "max_cross_ratio_drift": self.max_cross_ratio_drift,
                "orientations_constant": self.orientations_constant,
            },
        }


def _vectors_at(traj: LiftTrajectory, i: int) -> np.ndarray:
    if traj.planar:
        q = traj.states[i]
        return np.stack([np.cos(q), np.sin(q)], axis=1)
    return traj.states[i]


def monitor_invariants(
    spec: ArmSpec, traj: LiftTrajectory, coincidence_tol: float = 1e-9
) -> DriftReport:
    """Track the Moebius conservation laws along a lifted trajectory.

    For every same-length pair coincident at the start, the maximal
    chordal separation later on; for every same-length quadruple distinct
    at the start, the maximal cross-ratio drift (real for d=2, complex via
    stereographic projection for d=3, chordal in any dimension); for every
    same-length planar triple, whether the cyclic orientation ever flips.
    """
    report = DriftReport()
    n = traj.samples
    v0 = _vectors_at(traj, 0)
    stacked = np.stack([_vectors_at(traj, i) for i in range(n)])
    for value, indices in spec.value_classes:
        idx = list(indices)
        dist0 = {
            (i, j): float(np.linalg.norm(v0[i] - v0[j]))
            for u, i in enumerate(idx)
            for j in idx[u + 1 :]
        }
        for (i, j), d0 in dist0.items():
            if d0 <= coincidence_tol:
                drift = float(np.max(np.linalg.norm(stacked[:, i] - stacked[:, j], axis=1)))
                report.coincidence.append(
                    {"pair": [i, j], "value": value, "max_drift": drift}
                )
        distinct = [i for i in idx]
        quads = [
            (p, q, r, s)
            for a_i, p in enumerate(distinct)
            for b_i, q in enumerate(distinct[a_i + 1 :], a_i + 1)
            for c_i, r in enumerate(distinct[b_i + 1 :], b_i + 1)
            for s in distinct[c_i + 1 :]
        ]
        for quad in quads:
            pts0 = [v0[i] for i in quad]
            if min(
                np.linalg.norm(pts0[a] - pts0[b])
                for a in range(4)
                for b in range(a + 1, 4)
            ) <= coincidence_tol:
                continue
            entry = _quad_drift(spec, stacked, quad)
            entry["value"] = value
            report.cross_ratio.append(entry)
        if spec.dim == 2:
            triples = [
                (p, q, r)
                for a_i, p in enumerate(distinct)
                for b_i, q in enumerate(distinct[a_i + 1 :], a_i + 1)
                for r in distinct[b_i + 1 :]
            ]
            for tri in triples:
                pts0 = [complex(v0[i][0], v0[i][1]) for i in tri]
                if min(
                    abs(pts0[a] - pts0[b]) for a in range(3) for b in range(a + 1, 3)
                ) <= coincidence_tol:
                    continue
                signs = []
                for i in range(n):
                    z = stacked[i]
                    signs.append(
                        orientation(
                            complex(z[tri[0]][0], z[tri[0]][1]),
                            complex(z[tri[1]][0], z[tri[1]][1]),
                            complex(z[tri[2]][0], z[tri[2]][1]),
                        )
                    )
                report.orientation.append(
                    {"indices": list(tri), "constant": len(set(signs)) == 1}
                )
    return report


def _quad_drift(spec: ArmSpec, stacked: np.ndarray, quad) -> dict:
    n = stacked.shape[0]
    if spec.dim == 2:
        z = stacked[:, quad, 0] + 1j * stacked[:, quad, 1]
        vals = (
            (z[:, 0] - z[:, 2])
            / (z[:, 0] - z[:, 3])
            * (z[:, 1] - z[:, 3])
            / (z[:, 1] - z[:, 2])
        )
        drift = float(np.max(np.abs(vals.real - vals.real[0])))
        kind = "real"
    elif spec.dim == 3:
        vals = np.array(
            [
                cross_ratio_complex(
                    stacked[i, quad[0]],
                    stacked[i, quad[1]],
                    stacked[i, quad[2]],
                    stacked[i, quad[3]],
                )
                for i in range(n)
            ]
        )
        drift = float(np.max(np.abs(vals - vals[0])))
        kind = "complex"
    else:
        vals = np.array(
            [
                cross_ratio_weak(
                    stacked[i, quad[0]],
                    stacked[i, quad[1]],
                    stacked[i, quad[2]],
                    stacked[i, quad[3]],
                )
                for i in range(n)
            ]
        )
        drift = float(np.max(np.abs(vals - vals[0])))
        kind = "weak"
    return {"indices": list(quad), "max_drift": drift, "kind": kind}
