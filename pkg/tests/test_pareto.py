"""Trace construction, domain projection, fibers, and front extraction.

Hand oracles:
- for -S_W = |y|^2 and -S_L = |y - e1|^2 the blended optimum is
  y(t) = -1/2 (I)^-1 (t (-2 e1)) = t e1, a straight segment;
- the ODE right-hand side for that pair is the constant e1, so RK4
  reproduces the segment to machine precision at any step count;
- projecting the cube [-1,1]^2 through the identity frame returns the
  same square, and the support function of any zonotope is sum_j |g_j.d|.
"""

import numpy as np
import pytest

from paretotrace.coexistence import synthetic_oracles
from paretotrace.domain import unscale_from_unit
from paretotrace.errors import ContinuationError, InfeasibleFiberError
from paretotrace.pareto import (
    ParetoTrace,
    evaluate_trace_objectives,
    in_projected_domain,
    non_dominated,
    ode_trace,
    project_domain_2d,
    quadratic_trace,
    sample_inactive_fiber,
    scalarize,
)
from paretotrace.subspace import Frame, QuadraticSurrogate


def planted_pair():
    entry = synthetic_oracles()["quadratic"]
    surr_l, surr_w = entry.planted_surrogates
    return surr_l, surr_w


def random_spd_pair(seed, r=2):
    rng = np.random.default_rng(seed)

    def one():
        m = rng.standard_normal((r, r))
        q = m @ m.T + 0.5 * np.eye(r)
        return QuadraticSurrogate(q=q, a=rng.standard_normal(r), c=0.0)

    return one(), one()


def random_frame(m, r, seed):
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((m, r)))
    return Frame(q)


def test_scalarize_interpolates_the_forms():
    sl, sw = random_spd_pair(0)
    mid = scalarize(sl, sw, 0.4)
    assert np.allclose(mid.q, 0.4 * sl.q + 0.6 * sw.q)
    assert np.allclose(mid.a, 0.4 * sl.a + 0.6 * sw.a)
    with pytest.raises(ValueError):
        scalarize(sl, sw, 1.5)


def test_trace_of_unit_forms_is_the_segment_to_e1():
    surr_l, surr_w = planted_pair()
    ts = np.linspace(0.0, 1.0, 101)
    trace = quadratic_trace(surr_l, surr_w, ts)
    expected = np.outer(ts, np.array([1.0, 0.0]))
    assert np.max(np.abs(trace.ys - expected)) < 1e-12


def test_trace_endpoints_are_the_surrogate_maximizers():
    sl, sw = random_spd_pair(1)
    trace = quadratic_trace(sl, sw, np.array([0.0, 0.5, 1.0]))
    assert np.max(np.abs(trace.ys[0] - sw.maximizer())) < 1e-10
    assert np.max(np.abs(trace.ys[-1] - sl.maximizer())) < 1e-10


def test_every_trace_point_is_stationary_for_its_blend():
    for seed in range(5):
        sl, sw = random_spd_pair(seed, r=3)
        ts = np.linspace(0.0, 1.0, 41)
        trace = quadratic_trace(sl, sw, ts)
        for t, y in zip(ts, trace.ys):
            g = t * sl.gradient(y) + (1.0 - t) * sw.gradient(y)
            assert np.linalg.norm(g) < 1e-8


def test_trace_trades_one_objective_for_the_other():
    for seed in range(5):
        sl, sw = random_spd_pair(seed + 10)
        trace = quadratic_trace(sl, sw, np.linspace(0.0, 1.0, 51))
        assert np.all(np.diff(trace.s_l) >= -1e-10)
        assert np.all(np.diff(trace.s_w) <= 1e-10)


def test_trace_rejects_bad_grids_and_indefinite_forms():
    sl, sw = planted_pair()
    with pytest.raises(ValueError):
        quadratic_trace(sl, sw, np.array([0.0, 0.5, 0.4]))
    with pytest.raises(ValueError):
        quadratic_trace(sl, sw, np.array([-0.1, 1.0]))
    bad = QuadraticSurrogate(q=np.diag([1.0, -1.0]), a=np.zeros(2), c=0.0)
    with pytest.raises(ValueError):
        quadratic_trace(bad, sw, np.array([0.0, 1.0]))


def test_ode_matches_the_closed_form_on_quadratics():
    surr_l, surr_w = planted_pair()
    trace = ode_trace(
        surr_l.gradient,
        surr_w.gradient,
        lambda y: surr_l.hessian(),
        lambda y: surr_w.hessian(),
        y0=surr_w.maximizer(),
        steps=50,
    )
    closed = quadratic_trace(surr_l, surr_w, trace.ts)
    assert np.max(np.abs(trace.ys - closed.ys)) < 1e-12


def test_ode_rejects_a_nonstationary_start():
    surr_l, surr_w = planted_pair()
    with pytest.raises(ValueError):
        ode_trace(
            surr_l.gradient,
            surr_w.gradient,
            lambda y: surr_l.hessian(),
            lambda y: surr_w.hessian(),
            y0=np.array([0.3, 0.3]),
            steps=10,
        )


def test_ode_follows_the_quartic_stationary_path():
    am = synthetic_oracles()["quartic"].active_model
    args = (am["grad_l"], am["grad_w"], am["hess_l"], am["hess_w"])
    coarse = ode_trace(*args, y0=am["center_w"], steps=50)
    fine = ode_trace(*args, y0=am["center_w"], steps=200)
    err_coarse = np.linalg.norm(coarse.ys[-1] - am["center_l"])
    err_fine = np.linalg.norm(fine.ys[-1] - am["center_l"])
    # the path ends at the objective-L maximizer; RK4 converges at order 4
    assert err_fine < 1e-8
    assert err_coarse / max(err_fine, 1e-300) > 100.0


def test_ode_reports_ill_conditioned_blends():
    am = synthetic_oracles()["quartic"].active_model
    with pytest.raises(ContinuationError):
        ode_trace(
            am["grad_l"],
            am["grad_w"],
            am["hess_l"],
            am["hess_w"],
            y0=am["center_w"],
            steps=20,
            cond_limit=1.0,
        )


def brute_force_front(points):
    n = points.shape[0]
    keep = []
    for i in range(n):
        dominated = False
        for j in range(n):
            if j == i:
                continue
            ge = points[j] >= points[i]
            gt = points[j] > points[i]
            if ge.all() and gt.any():
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return np.array(keep, dtype=int)


def test_front_sweep_matches_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(10):
        pts = rng.standard_normal((300, 2))
        fast = non_dominated(pts)
        slow = brute_force_front(pts)
        assert np.array_equal(np.sort(fast.indices), np.sort(slow))


def test_front_keeps_exact_duplicates_of_kept_points():
    pts = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 2.0], [2.0, 0.0], [0.5, 0.5]])
    front = non_dominated(pts)
    assert set(front.indices.tolist()) == {0, 1, 2, 3}


def test_front_of_a_dominated_chain_is_the_top_point():
    pts = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert non_dominated(pts).indices.tolist() == [2]


def test_identity_projection_is_the_unit_square():
    zono = project_domain_2d(Frame(np.eye(2)))
    corners = {(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)}
    got = {tuple(np.round(v, 12)) for v in zono.vertices}
    assert got == corners
    # counter-clockwise orientation: positive shoelace area
    v = zono.vertices
    area = 0.5 * np.sum(
        v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]
    )
    assert abs(area - 4.0) < 1e-12


def test_projected_cube_points_are_members():
    frame = random_frame(7, 2, seed=22)
    zono = project_domain_2d(frame)
    rng = np.random.default_rng(23)
    cube = rng.uniform(-1.0, 1.0, size=(2000, 7))
    ys = cube @ frame.basis
    assert zono.contains(ys).all()
    # the zonotope is symmetric about the origin, so scaled vertices
    # stay inside below 1 and leave above 1
    assert zono.contains(0.99 * zono.vertices).all()
    assert not zono.contains(1.01 * zono.vertices).any()
    # any point projecting past the support in its own direction is out
    d = np.array([1.0, 0.3])
    d /= np.linalg.norm(d)
    assert not zono.contains(np.array([(zono.support(d) * 1.01) * d]))[0]


def test_support_equals_sum_of_generator_projections():
    frame = random_frame(9, 2, seed=24)
    zono = project_domain_2d(frame)
    rng = np.random.default_rng(25)
    for _ in range(50):
        d = rng.standard_normal(2)
        d /= np.linalg.norm(d)
        expected = float(np.sum(np.abs(frame.basis @ d)))
        assert abs(zono.support(d) - expected) < 1e-9


def test_fiber_samples_satisfy_the_active_constraint():
    entry = synthetic_oracles()["ridge"]
    frame = random_frame(8, 2, seed=26)
    y = np.array([0.1, -0.2])
    assert in_projected_domain(frame, y)
    pts = sample_inactive_fiber(frame, y, 25, entry.space, seed=3)
    assert pts.shape == (25, 8)
    assert np.max(np.abs(pts @ frame.basis - y)) < 1e-10
    assert np.max(np.abs(pts)) <= 1.0 + 1e-12
    again = sample_inactive_fiber(frame, y, 25, entry.space, seed=3)
    assert np.array_equal(pts, again)
    other = sample_inactive_fiber(frame, y, 25, entry.space, seed=4)
    assert not np.array_equal(pts, other)


def test_full_rank_fiber_is_a_single_point():
    entry = synthetic_oracles()["mirror"]
    frame = Frame(np.eye(4))
    y = np.array([0.2, -0.1, 0.4, 0.0])
    pts = sample_inactive_fiber(frame, y, 5, entry.space, seed=0)
    assert pts.shape == (5, 4)
    assert np.max(np.abs(pts - y)) < 1e-14


def test_fiber_outside_projection_is_infeasible():
    entry = synthetic_oracles()["ridge"]
    frame = random_frame(8, 2, seed=27)
    with pytest.raises(InfeasibleFiberError):
        sample_inactive_fiber(frame, np.array([10.0, 10.0]), 5, entry.space, seed=0)


def test_thin_fiber_near_a_vertex_still_yields_valid_samples():
    entry = synthetic_oracles()["ridge"]
    frame = random_frame(8, 2, seed=28)
    zono = project_domain_2d(frame)
    y = 0.98 * zono.vertices[0]
    assert in_projected_domain(frame, y)
    pts = sample_inactive_fiber(frame, y, 10, entry.space, seed=1)
    assert np.max(np.abs(pts @ frame.basis - y)) < 1e-8
    assert np.max(np.abs(pts)) <= 1.0 + 1e-9


def test_exact_ridge_values_are_constant_on_fibers():
    entry = synthetic_oracles()["ridge"]
    fl, fw = entry.planted_frames
    basis, _ = np.linalg.qr(np.hstack([fl.basis, fw.basis]))
    frame = Frame(basis)
    ys = np.array([[0.05, -0.03], [0.2, 0.1], [-0.15, 0.25]])
    for y in ys:
        assert in_projected_domain(frame, y)
    trace = ParetoTrace(
        ts=np.array([0.0, 0.5, 1.0]),
        ys=ys,
        s_l=np.zeros(3),
        s_w=np.zeros(3),
        in_domain=np.ones(3, dtype=bool),
    )
    curve = evaluate_trace_objectives(
        trace, entry.pair, frame, entry.space, entry.scenario, k=25, seed=0
    )
    assert curve.evaluations_per_objective == 75
    assert np.max(curve.max_l - curve.min_l) < 1e-10
    assert np.max(curve.max_w - curve.min_w) < 1e-10


def test_front_curve_skips_out_of_domain_points():
    entry = synthetic_oracles()["ridge"]
    frame = random_frame(8, 2, seed=29)
    trace = ParetoTrace(
        ts=np.array([0.0, 1.0]),
        ys=np.array([[0.1, 0.0], [50.0, 50.0]]),
        s_l=np.zeros(2),
        s_w=np.zeros(2),
        in_domain=np.array([True, False]),
    )
    curve = evaluate_trace_objectives(
        trace, entry.pair, frame, entry.space, entry.scenario, k=10, seed=0
    )
    assert curve.ts.tolist() == [0.0]
    assert curve.evaluations_per_objective == 10


def test_fiber_values_match_direct_evaluation():
    entry = synthetic_oracles()["mirror"]
    frame = random_frame(4, 2, seed=30)
    y = np.array([0.05, 0.1])
    # the curve derives the fiber seed for trace row i as seed*1000003 + i
    pts = sample_inactive_fiber(frame, y, 8, entry.space, seed=5 * 1000003)
    thetas = unscale_from_unit(pts, entry.space)
    direct = np.array(
        [entry.pair.objective_l(t, entry.scenario) for t in thetas]
    )
    trace = ParetoTrace(
        ts=np.array([0.5]),
        ys=y[None, :],
        s_l=np.zeros(1),
        s_w=np.zeros(1),
        in_domain=np.ones(1, dtype=bool),
    )
    curve = evaluate_trace_objectives(
        trace, entry.pair, frame, entry.space, entry.scenario, k=8, seed=5
    )
    assert abs(curve.mean_l[0] - direct.mean()) < 1e-12
    assert abs(curve.min_l[0] - direct.min()) < 1e-12
    assert abs(curve.max_l[0] - direct.max()) < 1e-12
