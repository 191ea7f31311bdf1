"""Flow integration, region geometry, chord search, and bound checks."""

import math
import warnings
from fractions import Fraction as F

import numpy as np
import pytest

from lchkit.dynamics import (
    BISECTION_TOL,
    BoundCheck,
    ChordMissing,
    ChordResult,
    Custom,
    EmptySample,
    FiberSegment,
    Free,
    HitZeroSection,
    HomogeneousContact,
    Mechanical,
    MomentumShell,
    NoConvergence,
    NonFinite,
    PhasePoint,
    SeparationSampling,
    ShootingGrid,
    TimePeriodic,
    conformal_factor_track,
    delta_separation,
    find_chord,
    integrate,
    jacobi_length,
    maupertuis_chord,
    verify_bound,
)

# ----------------------------------------------------------------------
# phase points and trajectories


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint(np.array([1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        PhasePoint(np.array([[1.0]]), np.array([[1.0]]))
    with pytest.raises(ValueError):
        PhasePoint(np.array([np.inf]), np.array([0.0]))
    pt = PhasePoint(np.array([1.0, 0.0]), np.array([0.0, 0.0]))
    assert pt.n == 2


def test_phase_point_arrays_are_read_only():
    pt = PhasePoint(np.array([1.0, 0.0]), np.array([0.0, 0.0]))
    with pytest.raises(ValueError):
        pt.p[0] = 7.0


# ----------------------------------------------------------------------
# integration


def test_free_flow_is_exact_straight_motion():
    H = Free(n=2)
    start = PhasePoint(np.array([1.0, 2.0]), np.array([0.5, -0.5]))
    traj = integrate(H, start, 0.0, 1.0, step=1e-2)
    assert np.allclose(traj.p[-1], [1.0, 2.0], atol=1e-12)
    assert np.allclose(traj.q[-1], [1.5, 1.5], atol=1e-12)
    mid = traj.point(traj.times.size // 2)
    assert np.allclose(mid.q, start.q + start.p * traj.times[traj.times.size // 2])


def test_backward_integration_reverses_the_flow():
    H = Mechanical(potential=lambda q: np.sum(np.cos(q), axis=-1))
    start = PhasePoint(np.array([0.7, -0.3]), np.array([0.2, 1.1]))
    fwd = integrate(H, start, 0.0, 1.0, step=1e-3)
    end = fwd.point(-1)
    back = integrate(H, end, 1.0, 0.0, step=1e-3)
    assert np.allclose(back.p[-1], start.p, atol=1e-9)
    assert np.allclose(back.q[-1], start.q, atol=1e-9)


def test_energy_drift_stays_small():
    H = Mechanical(potential=lambda q: 0.3 * np.sum(np.cos(q), axis=-1))
    start = PhasePoint(np.array([1.2, 0.4]), np.array([0.3, -0.8]))
    traj = integrate(H, start, 0.0, 2.0, step=1e-3)
    e0 = float(H.value(0.0, traj.p[0], traj.q[0]))
    energies = H.value(0.0, traj.p, traj.q)
    assert float(np.max(np.abs(energies - e0))) < 1e-10


def test_mechanical_fd_gradient_matches_analytic():
    U = lambda q: np.sum(np.sin(q), axis=-1)
    dU = lambda q: np.cos(q)
    q = np.array([0.3, -1.2])
    p = np.array([1.0, 1.0])
    fd = Mechanical(potential=U).grads(0.0, p, q)[1]
    exact = Mechanical(potential=U, grad_potential=dU).grads(0.0, p, q)[1]
    assert np.allclose(fd, exact, atol=1e-8)


def test_blowup_raises_nonfinite():
    H = Mechanical(
        potential=lambda q: -np.sum(q**2, axis=-1) ** 2,
        grad_potential=lambda q: -4.0 * np.sum(q**2, axis=-1, keepdims=True) * q,
    )
    start = PhasePoint(np.array([1.0, 0.0]), np.array([2.0, 0.0]))
    with np.errstate(all="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(NonFinite):
            integrate(H, start, 0.0, 50.0, step=0.5)


def test_time_periodic_value_and_gradient_composition():
    pert = lambda t, q: math.sin(2 * math.pi * t) * np.sum(q, axis=-1)
    dpert = lambda t, q: math.sin(2 * math.pi * t) * np.ones_like(q)
    H = TimePeriodic(base=Free(n=2), perturbation=pert, grad_perturbation=dpert)
    assert H.time_dependent
    p = np.array([1.0, 0.0])
    q = np.array([2.0, 3.0])
    assert H.value(0.25, p, q) == pytest.approx(0.5 + 5.0)
    dp, dq = H.grads(0.25, p, q)
    assert np.allclose(dp, p)
    assert np.allclose(dq, [1.0, 1.0])
    # finite-difference fallback for the perturbation gradient
    H_fd = TimePeriodic(base=Free(n=2), perturbation=pert)
    assert np.allclose(H_fd.grads(0.25, p, q)[1], [1.0, 1.0], atol=1e-8)


# ----------------------------------------------------------------------
# regions


def test_fiber_segment_distance():
    seg = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=3.0)
    assert seg.distance(np.array([2.0, 0.0]), np.array([0.0, 0.0])) == 0.0
    assert seg.distance(np.array([4.0, 0.0]), np.array([0.0, 0.0])) == pytest.approx(1.0)
    assert seg.distance(np.array([0.5, 0.0]), np.array([0.0, 0.0])) == pytest.approx(0.5)
    # off-fiber offset and momentum shortfall combine like a right triangle
    d = seg.distance(np.array([4.0, 0.0]), np.array([1.0, 0.0]))
    assert d == pytest.approx(math.hypot(1.0, 1.0))
    with pytest.raises(ValueError):
        FiberSegment(x=(0.0, 0.0), s_lo=0.0, s_hi=1.0)
    with pytest.raises(ValueError):
        FiberSegment(x=(0.0, 0.0), s_lo=2.0, s_hi=1.0)


def test_fiber_crossing_changes_sign_at_closest_approach():
    seg = FiberSegment(x=(2.0, 0.0), s_lo=1.0, s_hi=3.0)
    qdot = np.array([1.0, 0.0])
    before = seg.crossing(None, np.array([1.0, 0.0]), qdot, None)
    after = seg.crossing(None, np.array([3.0, 0.0]), qdot, None)
    assert before < 0 < after


def test_momentum_shell_distance_and_validation():
    shell = MomentumShell(s=2.0)
    assert shell.distance(np.array([1.0, 0.0]), None) == pytest.approx(1.0)
    assert shell.crossing(np.array([3.0, 4.0]), None, None, None) == pytest.approx(3.0)
    with pytest.raises(ValueError):
        MomentumShell(s=0.0)


# ----------------------------------------------------------------------
# separation sampling


def test_delta_separation_between_shells_is_exact_for_free():
    H = Free(n=2)
    sampling = SeparationSampling(
        q_center=(0.0, 0.0), q_halfwidth=(1.0, 1.0), q_per_axis=3, directions=8
    )
    delta = delta_separation(H, MomentumShell(1.0), MomentumShell(3.0), sampling)
    assert delta == pytest.approx(4.0, abs=1e-12)  # 9/2 - 1/2


def test_delta_separation_scans_time_slices():
    pert = lambda t, q: math.sin(2 * math.pi * t) * np.ones(np.asarray(q).shape[:-1])
    H = TimePeriodic(base=Free(n=2), perturbation=pert)
    sampling = SeparationSampling(
        q_center=(0.0, 0.0), q_halfwidth=(1.0, 1.0), q_per_axis=3,
        directions=8, t_samples=4,
    )
    delta = delta_separation(H, MomentumShell(1.0), MomentumShell(3.0), sampling)
    # sup over Y0 gains +1 at t=1/4, inf over Y1 loses 1 at t=3/4
    assert delta == pytest.approx(2.0, abs=1e-12)
    single = SeparationSampling(
        q_center=(0.0, 0.0), q_halfwidth=(1.0, 1.0), q_per_axis=3,
        directions=8, t_samples=1,
    )
    assert delta_separation(H, MomentumShell(1.0), MomentumShell(3.0), single) == (
        pytest.approx(4.0, abs=1e-12)  # t=0 only: the perturbation vanishes
    )


def test_delta_separation_over_fiber_window():
    H = Free(n=2)
    sampling = SeparationSampling(
        q_center=(0.0, 0.0), q_halfwidth=(1.0, 1.0), q_per_axis=3, directions=8
    )
    fiber = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=3.0)
    delta = delta_separation(H, MomentumShell(1.0), fiber, sampling)
    assert delta == pytest.approx(0.0, abs=1e-12)  # fiber's inf sits at |p|=1
    delta_hi = delta_separation(H, fiber, MomentumShell(4.0), sampling)
    assert delta_hi == pytest.approx(8.0 - 4.5, abs=1e-12)


def test_custom_region_without_samples_fails():
    H = Free(n=2)
    empty = Custom(predicate=lambda pt: False, distance_fn=lambda p, q: np.zeros(1))
    sampling = SeparationSampling(q_center=(0.0, 0.0), q_halfwidth=(1.0, 1.0))
    with pytest.raises(EmptySample):
        delta_separation(H, empty, MomentumShell(1.0), sampling)


# ----------------------------------------------------------------------
# chord search


def test_find_chord_free_two_fibers():
    H = Free(n=2)
    source = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=3.0)
    target = FiberSegment(x=(2.0, 0.0), s_lo=1.0, s_hi=3.0)
    out = find_chord(
        H, source, target, horizon=1.2,
        grid=ShootingGrid(radii=9, angles=181), tol=1e-6,
    )
    assert out.found
    # the fastest straight shot launches at |p| = 3 along the axis: T = 2/3
    assert out.T == pytest.approx(2.0 / 3.0, abs=1e-3)
    assert out.end_residual <= 1e-6
    assert np.allclose(out.start.p, [3.0, 0.0], atol=1e-9)
    assert out.trajectory is not None
    assert np.allclose(out.trajectory.q[0], [0.0, 0.0])


def test_find_chord_is_deterministic():
    H = Free(n=2)
    source = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=3.0)
    target = FiberSegment(x=(2.0, 0.0), s_lo=1.0, s_hi=3.0)
    grid = ShootingGrid(radii=5, angles=61)
    a = find_chord(H, source, target, 1.2, grid, 1e-6)
    b = find_chord(H, source, target, 1.2, grid, 1e-6)
    assert a.T == b.T
    assert np.array_equal(a.start.p, b.start.p)


def test_find_chord_exhausted_reports_best_residual():
    H = Free(n=2)
    source = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=1.0)
    target = FiberSegment(x=(50.0, 0.0), s_lo=1.0, s_hi=1.0)
    out = find_chord(
        H, source, target, horizon=0.5,
        grid=ShootingGrid(radii=1, angles=16), tol=1e-6,
    )
    assert not out.found
    assert out.T == math.inf
    assert out.trajectory is None
    assert "search exhausted" in out.message
    assert out.end_residual > 0


def test_find_chord_argument_checks():
    H = Free(n=2)
    fiber = FiberSegment(x=(0.0, 0.0), s_lo=1.0, s_hi=3.0)
    with pytest.raises(ValueError):
        find_chord(H, fiber, fiber, 1.0, ShootingGrid(), 1e-6)  # not disjoint
    with pytest.raises(ValueError):
        find_chord(
            H, fiber, FiberSegment(x=(2.0, 0.0), s_lo=1.0, s_hi=3.0),
            0.0, ShootingGrid(), 1e-6,
        )
    with pytest.raises(TypeError):
        find_chord(
            H, MomentumShell(1.0), fiber, 1.0, ShootingGrid(), 1e-6
        )


def test_find_chord_custom_target_uses_distance_descent():
    H = Free(n=2)
    start = PhasePoint(np.array([1.0, 0.0]), np.array([0.0, 0.0]))
    source = Custom(
        predicate=lambda pt: True,
        distance_fn=lambda p, q: np.linalg.norm(q, axis=-1),
        samples=(start,),
    )
    goal = np.array([1.0, 0.0])
    target = Custom(
        predicate=lambda pt: bool(np.allclose(pt.q, goal)),
        distance_fn=lambda p, q: np.linalg.norm(np.asarray(q) - goal, axis=-1),
    )
    out = find_chord(H, source, target, horizon=2.0, grid=ShootingGrid(), tol=1e-6)
    assert out.found
    assert out.T == pytest.approx(1.0, abs=1e-3)


# ----------------------------------------------------------------------
# bound verification


def _result(T):
    return ChordResult(
        found=True, start=None, t0=0.0, T=T, end_residual=0.0, trajectory=None
    )


def test_verify_bound_passes_and_fails():
    check = verify_bound(_result(0.5), F(1, 2))
    assert isinstance(check, BoundCheck)
    assert check.passed  # the rational bound is nudged one ulp up
    assert not verify_bound(_result(0.51), F(1, 2)).passed
    assert verify_bound(_result(0.51), F(1, 2), slack=0.05).passed


def test_verify_bound_requires_a_chord():
    missing = ChordResult(
        found=False, start=None, t0=0.0, T=math.inf,
        end_residual=1.0, trajectory=None, message="search exhausted",
    )
    with pytest.raises(ChordMissing):
        verify_bound(missing, F(1))


# ----------------------------------------------------------------------
# fixed-energy descent


def test_jacobi_length_flat_potential_is_scaled_arclength():
    U = lambda x: np.zeros(np.asarray(x).shape[:-1])
    path = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert jacobi_length(U, 0.5, path) == pytest.approx(2.0)  # speed 1
    assert jacobi_length(U, 2.0, path) == pytest.approx(4.0)  # speed 2
    with pytest.raises(ValueError):
        jacobi_length(U, 0.0, path)


def test_maupertuis_free_chord_is_the_straight_segment():
    U = lambda x: np.zeros(np.asarray(x).shape[:-1])
    out = maupertuis_chord(U, C=2.0, x0=(0.0, 0.0), x1=(2.0, 0.0), nodes=9)
    assert out.found
    assert out.T == pytest.approx(1.0, abs=1e-9)  # length 2 at speed 2
    assert np.allclose(out.start.p, [2.0, 0.0], atol=1e-6)
    interior = out.trajectory.q[1:-1]
    assert np.allclose(interior[:, 1], 0.0, atol=1e-6)


def test_maupertuis_argument_checks():
    U = lambda x: np.zeros(np.asarray(x).shape[:-1])
    with pytest.raises(ValueError):
        maupertuis_chord(U, 1.0, (0.0, 0.0), (1.0, 0.0), nodes=2)
    tall = lambda x: 5.0 * np.ones(np.asarray(x).shape[:-1])
    with pytest.raises(ValueError):
        maupertuis_chord(tall, 1.0, (0.0, 0.0), (1.0, 0.0))


def test_maupertuis_time_matches_direct_integration():
    # shallow cosine well: descend the length functional, then cross-check
    # the arrival by integrating the flow from the lifted start
    U = lambda x: 0.1 * np.cos(np.asarray(x)[..., 0]) * np.cos(np.asarray(x)[..., 1])
    C = 2.0
    out = maupertuis_chord(U, C, (0.0, 0.0), (2.0, 0.0), nodes=17)
    H = Mechanical(potential=U)
    traj = integrate(H, out.start, 0.0, out.T, step=1e-4)
    arrival = traj.q[-1]
    assert np.linalg.norm(arrival - np.array([2.0, 0.0])) < 5e-3


# ----------------------------------------------------------------------
# conformal tracking


def test_conformal_factor_is_unit_for_constant_h():
    h = HomogeneousContact(h=lambda pu, q: np.ones(np.asarray(pu).shape[:-1]))
    starts = [
        PhasePoint(np.array([1.0, 0.0]), np.array([0.0, 0.0])),
        PhasePoint(np.array([0.6, 0.8]), np.array([1.0, -1.0])),
    ]
    ratio = conformal_factor_track(h, starts, horizon=1.0, step=1e-3)
    assert ratio == pytest.approx(1.0, abs=1e-8)


def test_conformal_track_guards_the_zero_section():
    h = HomogeneousContact(h=lambda pu, q: np.ones(np.asarray(pu).shape[:-1]))
    starts = [PhasePoint(np.array([1.0, 0.0]), np.array([0.0, 0.0]))]
    with pytest.raises(HitZeroSection):
        conformal_factor_track(h, starts, horizon=0.1, step=1e-3, floor=1.5)
    with pytest.raises(EmptySample):
        conformal_factor_track(h, [], horizon=0.1, step=1e-3)


def test_conformal_factor_grows_in_a_negative_well():
    # position-dependent contact form: drifting out of the well multiplies
    # the momentum by the ratio of start to end values of the factor
    def u(q):
        q = np.asarray(q, dtype=float)
        r2 = np.sum(q**2, axis=-1)
        return 1.0 - 1.5 * np.exp(-r2)

    h = HomogeneousContact(h=lambda pu, q: u(q))
    # aim at the well: u(q) falls toward zero, so |P| = H/u must climb
    start = PhasePoint(np.array([-1.0, 0.0]), np.array([1.2, 0.0]))
    ratio = conformal_factor_track(h, [start], horizon=1.5, step=1e-3)
    assert ratio > 1.5


def test_bisection_tolerance_is_tight():
    assert BISECTION_TOL <= 1e-9
