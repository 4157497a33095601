import numpy as np
import pytest

from armlift.arm import ArmSpec, Configuration, eval_arm, gram
from armlift.curves import CurveSpec, SquareLoop
from armlift.errors import NearCritical
from armlift.fields import lie_bracket_numeric
from armlift.holonomy import (
    commutator_estimate,
    holonomy_map,
    horizontal_frame_fields,
)
from armlift.lift import LiftOptions

from helpers import planar_jacobian, random_planar_arm, random_regular_config


def test_frame_fields_are_horizontal_sections():
    # pushing the first frame field through the Jacobian gives e1, the
    # second gives e2: they are the horizontal lifts of the coordinate axes
    rng = np.random.default_rng(97)
    for _ in range(10):
        spec = random_planar_arm(rng)
        q = random_regular_config(rng, spec)
        e1, e2 = horizontal_frame_fields(spec)
        jac = planar_jacobian(spec, q.angles)
        assert np.max(np.abs(jac @ e1(q.angles) - [1.0, 0.0])) < 1e-9
        assert np.max(np.abs(jac @ e2(q.angles) - [0.0, 1.0])) < 1e-9


def test_frame_fields_raise_near_alignment():
    spec = ArmSpec((1.0, 1.0), 2)
    e1, _ = horizontal_frame_fields(spec)
    with pytest.raises(NearCritical):
        e1(np.array([0.5, 0.5]))


def test_holonomy_map_requires_closed_loop():
    from armlift.curves import Polyline

    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    b0 = eval_arm(spec, q0)
    open_curve = CurveSpec([Polyline((tuple(b0), tuple(b0 + 0.1)), (0.0, 1.0))])
    with pytest.raises(ValueError):
        holonomy_map(spec, open_curve, q0)


def test_holonomy_map_returns_to_fiber():
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    b0 = eval_arm(spec, q0)
    loop = CurveSpec([SquareLoop(corner=(float(b0[0]), float(b0[1])), side=0.1)])
    q1 = holonomy_map(spec, loop, q0, LiftOptions(step=5e-4))
    b1 = eval_arm(spec, q1)
    # same fiber, different point
    assert np.linalg.norm(b1 - b0) < 1e-8
    assert np.max(np.abs(q1.angles - q0.angles)) > 1e-5


def test_loop_and_reversed_loop_cancel():
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    b0 = eval_arm(spec, q0)
    loop = CurveSpec([SquareLoop(corner=(float(b0[0]), float(b0[1])), side=0.1)])
    q1 = holonomy_map(spec, loop, q0, LiftOptions(step=5e-4))
    # drive the same square the opposite way by flipping the curve in time
    rev = CurveSpec.from_dict(loop.to_dict())

    class Reversed:
        dim = 2

        def __init__(self, inner):
            self.inner = inner
            self.duration = inner.duration

        @property
        def breakpoints(self):
            return self.duration - np.asarray(self.inner.breakpoints)[::-1]

        def point(self, t):
            return self.inner.point(self.duration - t)

        def velocity(self, t):
            return -self.inner.velocity(self.duration - t)

        def piece_velocity(self, lo, hi):
            inner_piece = self.inner.piece_velocity(
                self.duration - hi, self.duration - lo
            )
            return lambda t: -inner_piece(self.duration - t)

        def is_closed(self, tol=1e-9):
            return self.inner.is_closed(tol)

        def start_point(self):
            return self.inner.end_point()

    from armlift.lift import lift_path

    traj_back = lift_path(spec, q1, Reversed(rev), LiftOptions(step=5e-4))
    q2 = traj_back.final_config
    assert np.max(np.abs(q2.angles - q0.angles)) < 1e-9


def test_commutator_estimate_prediction_matches_bracket():
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    report = commutator_estimate(spec, q0, side=0.05, options=LiftOptions(step=2e-4))
    e1, e2 = horizontal_frame_fields(spec)
    bracket = lie_bracket_numeric(e1, e2, np.array(q0.angles))
    want = (0.05**2) * bracket
    assert np.linalg.norm(report.commutator_prediction - want) < 1e-12
    # measured displacement agrees with the prediction to leading order
    rel = np.linalg.norm(report.displacement - want) / np.linalg.norm(want)
    assert rel < 0.1


def test_commutator_estimate_gamma_converges_to_inverse_det():
    # frozen: a=(1,1,1), q=(0.3,1.4,2.6) -> det P = 2.2190236798658227
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    det_p = gram(spec, q0).det
    assert abs(det_p - 2.2190236798658227) < 1e-12
    target = 1.0 / det_p
    errs = []
    for side in (0.1, 0.05):
        report = commutator_estimate(
            spec, q0, side=side, options=LiftOptions(step=2e-4)
        )
        errs.append(abs(report.gamma_estimate - target))
    # O(s): halving the side roughly halves the error
    assert errs[1] < 0.65 * errs[0]
    assert errs[1] < 0.015


def test_commutator_estimate_validates_input():
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    with pytest.raises(ValueError):
        commutator_estimate(spec, q0, side=0.0)
    with pytest.raises(ValueError):
        commutator_estimate(spec, q0, basepoint=np.array([9.0, 9.0]))
    spec3 = ArmSpec((1.0, 1.0), 3)
    z0 = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    with pytest.raises(Exception):
        commutator_estimate(spec3, Configuration(z0))


def test_two_link_bracket_degenerates():
    # with two segments the horizontal distribution is integrable: the
    # report flags the rank-deficient regression basis
    spec = ArmSpec((1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.5235987755982989, -1.0471975511965979])
    report = commutator_estimate(spec, q0, side=0.05, options=LiftOptions(step=2e-4))
    assert np.linalg.norm(report.displacement) < 1e-10
    assert report.basis_rank < 3


def test_holonomy_report_serializes():
    spec = ArmSpec((1.0, 1.0, 1.0), 2)
    q0 = Configuration.from_angles([0.3, 1.4, 2.6])
    report = commutator_estimate(spec, q0, side=0.05, options=LiftOptions(step=5e-4))
    payload = report.to_dict()
    assert payload["side"] == 0.05
    assert len(payload["displacement"]) == 3
    assert isinstance(payload["gamma_estimate"], float)
