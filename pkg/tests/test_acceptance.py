"""Headline guarantees, one test each, with the tolerances they ship under.

Each test states a user-facing promise: the closed-form determinant, the
disk flow, the bracket table, lift accuracy and conservation orders, the
reachability oracle, the curvature estimate, the critical-point censuses
with their indices, the two-solution arm, gradient alignment of loop
holonomy, and the steering service agreeing with the library.
"""

import time

import numpy as np
import pytest

from armlift import (
    Arc,
    ArmSpec,
    Configuration,
    CurveSpec,
    LiftOptions,
    SquareLoop,
    act_group,
    block_hessian_model,
    chart_hessian,
    commutator_estimate,
    critical_points,
    det_gram_closed_form,
    eval_arm,
    euler_characteristic,
    flow_gamma,
    grad_rho_b,
    gram,
    lift_path,
    monitor_invariants,
    morse_census,
    morse_index,
    reachable,
    two_link_solutions,
)
from armlift.fields import lie_bracket_numeric, planar_field
from armlift.moebius import GroupElement, SU11Element, sphere_gradient
from armlift.service import SteerSettings, create_app

from helpers import (
    random_planar_arm,
    random_regular_config,
    random_sphere_point,
    rk4_integrate,
)


def test_closed_form_gram_determinant_matches_direct():
    rng = np.random.default_rng(1001)
    for _ in range(1000):
        spec = random_planar_arm(rng, m=int(rng.integers(2, 7)))
        q = Configuration.from_angles(rng.uniform(-np.pi, np.pi, spec.m))
        direct = float(np.linalg.det(gram(spec, q).entries))
        closed = det_gram_closed_form(spec, q)
        assert abs(direct - closed) <= 1e-10 * max(abs(direct), 1e-30)


def test_disk_flow_matches_integrated_gradient():
    rng = np.random.default_rng(1002)
    for _ in range(200):
        d = int(rng.choice([2, 3, 4]))
        s = random_sphere_point(rng, d)
        x = random_sphere_point(rng, d)
        closed = flow_gamma(s, 1.0, x)
        integrated = rk4_integrate(
            lambda t, y: sphere_gradient(s, y), x, 0.0, 1.0, 400
        )
        assert np.max(np.abs(closed - integrated)) < 1e-8


# ([F, G], expected bracket): the trig fields close with powers adding,
# same-phase pairs commute.
BRACKET_TABLE = [
    ("C", "S", "U"),
    ("AC", "AS", "A2"),
    ("C", "AS", "A"),
    ("AC", "S", "A"),
    ("A2C", "AS", "A3"),
    ("AC", "A2S", "A3"),
    ("S", "AS", None),
    ("C", "AC", None),
    ("A2S", "AS", None),
]


def test_bracket_table_holds_by_finite_differences():
    rng = np.random.default_rng(1003)

    def named(spec, token):
        return lambda q: planar_field(spec, q, token)

    for _ in range(5):
        spec = random_planar_arm(rng)
        q = rng.uniform(-np.pi, np.pi, spec.m)
        # the anchor identity first: [C, S] is the constant field of ones
        got = lie_bracket_numeric(named(spec, "C"), named(spec, "S"), q)
        assert np.max(np.abs(got - np.ones(spec.m))) < 1e-5
        for f_tok, g_tok, out_tok in BRACKET_TABLE:
            got = lie_bracket_numeric(named(spec, f_tok), named(spec, g_tok), q)
            want = np.zeros(spec.m) if out_tok is None else planar_field(spec, q, out_tok)
            scale = max(1.0, float(np.max(np.abs(want))))
            assert np.max(np.abs(got - want)) / scale < 1e-5, (f_tok, g_tok)


def test_single_link_circle_and_tracking_order():
    # one unit link tracing the unit circle: joint angle equals arc length
    single = ArmSpec((1.0,))
    circle = CurveSpec([Arc(center=(0.0, 0.0), radius=1.0, angles=(0.0, 1.0), duration=1.0)])
    traj = lift_path(single, Configuration.from_angles([0.0]), circle, LiftOptions(step=1e-3))
    assert abs(float(traj.states[-1, 0]) - 1.0) < 1e-8

    # generic curve: tracking error falls at fourth order under halvings
    spec = ArmSpec((1.0, 0.8, 1.2))
    q0 = Configuration.from_angles(np.array([0.3, 1.4, 2.5]))
    start = eval_arm(spec, q0)
    r0, th0 = float(np.hypot(*start)), float(np.arctan2(start[1], start[0]))
    arc = CurveSpec([Arc(center=(0.0, 0.0), radius=r0, angles=(th0, th0 + 2.0), duration=1.0)])
    steps = [0.08, 0.04, 0.02, 0.01]
    errs = [
        float(np.max(lift_path(spec, q0, arc, LiftOptions(step=h)).tracking_error))
        for h in steps
    ]
    order = float(np.polyfit(np.log(steps), np.log(errs), 1)[0])
    assert order >= 3.7, (errs, order)


def test_unit_arm_conservation_laws_and_order():
    spec = ArmSpec((1.0, 1.0, 1.0, 1.0))

    def drift_along_arc(q0, step, sweep):
        start = eval_arm(spec, q0)
        r0, th0 = float(np.hypot(*start)), float(np.arctan2(start[1], start[0]))
        arc = CurveSpec(
            [Arc(center=(0.0, 0.0), radius=r0, angles=(th0, th0 + sweep), duration=1.0)]
        )
        traj = lift_path(spec, q0, arc, LiftOptions(step=step))
        return monitor_invariants(spec, traj)

    # a coincident pair stays coincident
    q_pair = Configuration.from_angles(np.array([0.4, 1.7, 0.4, -2.2]))
    report = drift_along_arc(q_pair, 1e-3, 1.5)
    assert report.max_coincidence_drift < 1e-7

    # four distinct components: cross-ratio drift small and fourth order
    q_distinct = Configuration.from_angles(np.array([0.15, 1.3, 2.6, -1.9]))
    report = drift_along_arc(q_distinct, 1e-3, 1.5)
    assert report.max_cross_ratio_drift < 1e-5

    steps = [0.08, 0.04, 0.02, 0.01]
    drifts = [
        drift_along_arc(q_distinct, h, 3.5).max_cross_ratio_drift for h in steps
    ]
    order = float(np.polyfit(np.log(steps), np.log(drifts), 1)[0])
    assert order >= 3.7, (drifts, order)


def test_group_orbits_are_reachable_with_witnesses():
    rng = np.random.default_rng(1006)

    def random_su11():
        b = complex(rng.normal(), rng.normal()) * 0.4
        phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
        a = phase * np.sqrt(1.0 + abs(b) ** 2)
        return SU11Element(complex(a), b)

    for _ in range(1000):
        m = int(rng.integers(2, 6))
        lengths = tuple(float(x) for x in rng.choice([1.0, 1.0, 2.0, 0.5], size=m))
        spec = ArmSpec(lengths, 2)
        z0 = Configuration.from_angles(rng.uniform(-np.pi, np.pi, m))
        g = GroupElement(dim=2, per_class=tuple(random_su11() for _ in spec.value_classes))
        z1 = act_group(g, spec, z0)
        verdict = reachable(spec, z0, z1)
        assert verdict.verdict == "yes"
        assert verdict.witness is not None
        moved = act_group(verdict.witness, spec, z0)
        gap = np.abs(moved.as_complex() - z1.as_complex())
        assert float(np.max(gap)) < 1e-8

    # mirror image of a distinct triple: orientation obstructs
    spec = ArmSpec((1.0, 1.0, 1.0))
    z0 = Configuration.from_angles(np.array([0.0, 2.0 * np.pi / 3.0, -2.0 * np.pi / 3.0]))
    z1 = Configuration.from_angles(-np.asarray(z0.angles))
    assert reachable(spec, z0, z1).verdict == "no"


def test_curvature_estimate_converges_linearly():
    rng = np.random.default_rng(2026)
    sides = [0.2, 0.1, 0.05, 0.025]
    slopes, shrank = [], 0
    for _ in range(20):
        spec = random_planar_arm(rng)
        q = random_regular_config(rng, spec, det_floor=0.08, radial_margin=0.45)
        errs = []
        for s in sides:
            rep = commutator_estimate(spec, q, side=s, options=LiftOptions(step=s / 100))
            errs.append(abs(rep.gamma_estimate - 1.0 / rep.det_gram))
        slopes.append(float(np.polyfit(np.log(sides), np.log(errs), 1)[0]))
        shrank += errs[-1] < 0.3 * errs[0]
    # first-order convergence at the bulk of the sample; an isolated sign
    # crossing of the leading error term is allowed to flatten one fit
    assert float(np.median(slopes)) >= 0.9, slopes
    assert shrank >= 18, (shrank, slopes)


FROZEN_CENSUSES = [
    (3, 2.0, {0: 3, 1: 3}, 0),
    (4, 1.0, {1: 6}, -6),
    (4, 3.0, {0: 4, 1: 6, 2: 4}, 2),
    (5, 0.5, {}, 0),
]


def test_critical_point_censuses_with_runtime():
    for m, b, counts, chi in FROZEN_CENSUSES:
        t0 = time.perf_counter()
        census = morse_census(m, b)
        elapsed = time.perf_counter() - t0
        assert census == counts, (m, b, census)
        assert euler_characteristic(census) == chi
        assert elapsed < 1.0, (m, b, elapsed)


def test_morse_indices_and_block_spectra():
    for m, b, counts, _ in FROZEN_CENSUSES:
        points = critical_points(m, b)
        spec = ArmSpec((1.0,) * m)
        for cp in points:
            assert morse_index(spec, b, cp) == len(cp.subset) - 1
        if not points:
            continue
        # one point per census: chart Hessian against the block model
        cp = points[0]
        n_flip = len(cp.subset)
        model = block_hessian_model(m - n_flip, n_flip, b)
        numeric = chart_hessian(m, b, n_flip)
        assert np.max(np.abs(numeric - model)) < 5e-6
        model_eigs = np.linalg.eigvalsh(model)
        numeric_eigs = np.linalg.eigvalsh(numeric)
        assert np.sum(model_eigs < 0) == np.sum(numeric_eigs < 0) == n_flip - 1
        assert np.sum(model_eigs > 0) == np.sum(numeric_eigs > 0) == m - n_flip - 1


def test_two_solution_arm_and_trivial_holonomy():
    spec = ArmSpec((np.sqrt(3.0), 1.0))
    got = two_link_solutions(np.sqrt(3.0), 1.0, 2.0)
    assert len(got) == 2
    angles = sorted(tuple(float(x) for x in sol.angles) for sol in got)
    want = sorted([(-np.pi / 6.0, np.pi / 3.0), (np.pi / 6.0, -np.pi / 3.0)])
    for got_pair, want_pair in zip(angles, want):
        assert abs(got_pair[0] - want_pair[0]) < 1e-12
        assert abs(got_pair[1] - want_pair[1]) < 1e-12

    # the fiber over 2 is just these two points, so loop transport fixes them
    loop = CurveSpec([SquareLoop(corner=(2.0, 0.0), side=0.1)])
    for sol in got:
        traj = lift_path(spec, sol, loop, LiftOptions(step=1e-3))
        back = np.asarray(traj.final_config.angles) - np.asarray(sol.angles)
        assert float(np.max(np.abs(back))) < 1e-8


def test_loop_displacement_aligns_with_angle_sum_gradient():
    rng = np.random.default_rng(77)
    sides = [0.1, 0.05, 0.025]
    for m in (3, 4, 5):
        spec = ArmSpec((1.0,) * m)
        q = random_regular_config(rng, spec, det_floor=0.08, radial_margin=0.3)
        grad = grad_rho_b(spec, q)
        unit = grad / np.linalg.norm(grad)
        resid = []
        for s in sides:
            rep = commutator_estimate(spec, q, side=s, options=LiftOptions(step=s / 100))
            d = rep.displacement
            parallel = float(d @ unit)
            resid.append(float(np.linalg.norm(d - parallel * unit) / np.linalg.norm(d)))
        assert all(r < 0.01 for r in resid), resid
        assert resid[-1] < 0.5 * resid[0] + 1e-9
        assert resid[-1] < 1e-3


def test_service_scripted_square_matches_library_estimate():
    from fastapi.testclient import TestClient

    spec = ArmSpec((1.0, 1.0, 1.0))
    q0 = Configuration.from_angles(np.array([0.2, 1.1, 2.3]))
    side = 0.05
    direct = commutator_estimate(spec, q0, side=side, options=LiftOptions(step=1e-3))

    app = create_app(SteerSettings(speed_cap=10.0, margin=0.05, step=1e-3, tick_rate=0.0))
    with TestClient(app) as client, client.websocket_connect("/stream") as ws:
        ws.send_json(
            {
                "type": "create",
                "arm": {"lengths": [1.0, 1.0, 1.0], "dim": 2},
                "q0": {"angles": [0.2, 1.1, 2.3]},
                "speed_cap": 10.0,
                "tick_rate": 0.0,
            }
        )
        created = ws.receive_json()
        assert created["type"] == "created"
        base = np.asarray(created["state"]["effector"])
        corners = [
            base + [side, 0.0],
            base + [side, side],
            base + [0.0, side],
            base,
        ]
        for corner in corners:
            ws.send_json({"type": "set_target", "point": [float(corner[0]), float(corner[1])]})
            assert ws.receive_json()["type"] == "state"
            ws.send_json({"type": "tick", "dt": side})
            assert ws.receive_json()["type"] == "state"
        ws.send_json({"type": "snapshot_request"})
        report = ws.receive_json()
    assert report["type"] == "holonomy"
    service_disp = np.asarray(report["displacement"])
    assert float(np.linalg.norm(service_disp - direct.displacement)) < 1e-6
