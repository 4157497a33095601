import numpy as np
import pytest

from armlift.curves import Arc, CurveSpec, Polyline, SquareLoop


def test_polyline_point_and_velocity():
    line = Polyline(((0.0, 0.0), (1.0, 0.0), (1.0, 2.0)), (0.0, 1.0, 2.0))
    assert np.allclose(line.point(0.5), [0.5, 0.0])
    assert np.allclose(line.point(1.5), [1.0, 1.0])
    assert np.allclose(line.velocity(0.25), [1.0, 0.0])
    assert np.allclose(line.velocity(1.75), [0.0, 2.0])
    assert line.duration == 2.0
    assert line.local_breakpoints == (1.0,)


def test_polyline_validation():
    with pytest.raises(ValueError):
        Polyline(((0.0, 0.0),), (0.0,))
    with pytest.raises(ValueError):
        Polyline(((0.0, 0.0), (1.0, 0.0)), (0.0, 0.0))
    with pytest.raises(ValueError):
        Polyline(((0.0, 0.0), (1.0, 0.0), (2.0, 0.0)), (0.0, 2.0, 1.0))


def test_arc_kinematics():
    arc = Arc(center=(1.0, 0.0), radius=2.0, angles=(0.0, np.pi), duration=2.0)
    assert np.allclose(arc.point(0.0), [3.0, 0.0])
    assert np.allclose(arc.point(2.0), [-1.0, 0.0])
    assert np.allclose(arc.point(1.0), [1.0, 2.0])
    # speed is radius * angular rate
    v = arc.velocity(1.0)
    assert abs(np.linalg.norm(v) - 2.0 * (np.pi / 2.0)) < 1e-12


def test_arc_velocity_is_derivative():
    arc = Arc(center=(0.5, -0.25), radius=1.5, angles=(0.3, -1.4), duration=3.0)
    h = 1e-6
    for tau in (0.4, 1.1, 2.6):
        fd = (arc.point(tau + h) - arc.point(tau - h)) / (2 * h)
        assert np.max(np.abs(fd - arc.velocity(tau))) < 1e-6


def test_square_loop_shape():
    sq = SquareLoop(corner=(1.0, 1.0), side=0.5)
    assert sq.duration == 2.0
    assert np.allclose(sq.point(0.0), [1.0, 1.0])
    assert np.allclose(sq.point(0.5), [1.5, 1.0])
    assert np.allclose(sq.point(1.0), [1.5, 1.5])
    assert np.allclose(sq.point(1.5), [1.0, 1.5])
    assert np.allclose(sq.point(2.0), [1.0, 1.0])
    # unit speed everywhere
    for tau in (0.2, 0.7, 1.2, 1.9):
        assert abs(np.linalg.norm(sq.velocity(tau)) - 1.0) < 1e-12


def test_square_loop_rejects_bad_side():
    with pytest.raises(ValueError):
        SquareLoop(corner=(0.0, 0.0), side=0.0)
    with pytest.raises(ValueError):
        SquareLoop(corner=(0.0, 0.0), side=-1.0)


def test_curve_spec_chains_and_checks_continuity():
    a = Polyline(((0.0, 0.0), (1.0, 0.0)), (0.0, 1.0))
    b = Arc(center=(1.0, 1.0), radius=1.0, angles=(-np.pi / 2, 0.0), duration=1.0)
    curve = CurveSpec([a, b])
    assert curve.duration == 2.0
    assert np.allclose(curve.point(1.0), [1.0, 0.0])
    assert np.allclose(curve.point(2.0), [2.0, 1.0])
    assert not curve.is_closed()
    bad = Polyline(((5.0, 5.0), (6.0, 5.0)), (0.0, 1.0))
    with pytest.raises(ValueError):
        CurveSpec([a, bad])


def test_curve_spec_breakpoints_include_interior_corners():
    line = Polyline(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0)), (0.0, 1.0, 2.0))
    sq = SquareLoop(corner=(1.0, 1.0), side=1.0)
    curve = CurveSpec([line, sq])
    bp = curve.breakpoints
    for expected in (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0):
        assert np.min(np.abs(bp - expected)) < 1e-12


def test_piece_velocity_matches_velocity_between_corners():
    sq = SquareLoop(corner=(0.0, 0.0), side=1.0)
    curve = CurveSpec([sq])
    bp = curve.breakpoints
    for lo, hi in zip(bp[:-1], bp[1:]):
        vel = curve.piece_velocity(float(lo), float(hi))
        mid = 0.5 * (lo + hi)
        assert np.allclose(vel(mid), curve.velocity(mid))
        # crucially, evaluating at the right endpoint keeps the piece's
        # direction instead of jumping to the next edge
        assert np.allclose(vel(hi), curve.velocity(mid))


def test_closed_loop_detection():
    sq = SquareLoop(corner=(2.0, 0.5), side=0.25)
    assert CurveSpec([sq]).is_closed()
    out = Polyline(((2.0, 0.5), (2.5, 0.5)), (0.0, 1.0))
    back = Polyline(((2.5, 0.5), (2.0, 0.5)), (0.0, 1.0))
    assert CurveSpec([out, back]).is_closed()
    assert not CurveSpec([out]).is_closed()


def test_curve_round_trip_dicts():
    sq = SquareLoop(corner=(1.0, 1.0), side=0.5)
    line = Polyline(((1.0, 1.0), (0.0, 0.0)), (0.0, 2.0))
    arc = Arc(center=(0.0, -1.0), radius=1.0, angles=(np.pi / 2, 0.0), duration=1.0)
    curve = CurveSpec([sq, line, arc])
    clone = CurveSpec.from_dict(curve.to_dict())
    for t in np.linspace(0.0, curve.duration, 37):
        assert np.allclose(curve.point(t), clone.point(t))
