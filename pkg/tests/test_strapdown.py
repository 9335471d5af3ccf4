import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from polarins import trajgen
from polarins.attitude import IDENTITY_QUAT, dcm_to_quat, quat_to_dcm
from polarins.geodesy import (CurvilinearPosition, EarthModel, SingularLatitude,
                              curvilinear_to_ecef, ecef_to_nue_dcm)
from polarins.strapdown import (EarthFrameState, ImuIncrements, LocalLevelState, coning_correction,
                                continuous_rhs, earth_frame_step, local_level_step,
                                propagate_earth, propagate_llf, rk4_integrate, sculling_velocity,
                                vertical_reset_earth, vertical_reset_llf)

MODEL = EarthModel()
small = arrays(np.float64, 3, elements=st.floats(-0.05, 0.05))
vel = arrays(np.float64, 3, elements=st.floats(-500.0, 500.0))


def test_coning_examples():
    np.testing.assert_allclose(coning_correction([0.3, 0, 0], [0.2, 0, 0]), [0.5, 0, 0])
    np.testing.assert_allclose(coning_correction([0.01, 0, 0], [0, 0.01, 0]),
                               [0.01, 0.01, 2.0 / 3.0 * 1e-4], rtol=1e-15)
    np.testing.assert_array_equal(coning_correction(np.zeros(3), np.zeros(3)), 0)


def test_sculling_examples():
    z = np.zeros(3)
    np.testing.assert_allclose(sculling_velocity(z, z, [1, 2, 3], [0.5, 0, -1]), [1.5, 2, 2])
    u = sculling_velocity([1e-3, 0, 0], [1e-3, 0, 0], [0, 0.1, 0], [0, 0.1, 0])
    np.testing.assert_allclose(u, [0, 0.2, 2e-4], rtol=1e-14, atol=1e-20)


@given(small, st.floats(-2, 2), st.floats(-2, 2))
def test_coning_parallel_inputs(axis, a, b):
    np.testing.assert_allclose(coning_correction(a * axis, b * axis), (a + b) * axis, atol=1e-15)


@given(small, st.floats(-2, 2), st.floats(-2, 2), st.floats(-50, 50), st.floats(-50, 50))
def test_sculling_all_parallel(axis, a, b, c, d):
    u = sculling_velocity(a * axis, b * axis, c * axis, d * axis)
    np.testing.assert_allclose(u, (c + d) * axis, atol=1e-12)


@given(small, small, small, small)
def test_sculling_matches_formula(t1, t2, v1, v2):
    expected = (v1 + v2 + 0.5 * np.cross(t1 + t2, v1 + v2)
                + 2 / 3 * (np.cross(t1, v2) + np.cross(v1, t2)))
    np.testing.assert_allclose(sculling_velocity(t1, t2, v1, v2), expected, atol=1e-15)
    np.testing.assert_allclose(coning_correction(t1, t2), t1 + t2 + 2 / 3 * np.cross(t1, t2), atol=1e-15)


def stationary_increments(p, T=0.02, model=MODEL):
    """Increments of a body at rest with C_b^e = I at ECEF position p."""
    f = model.gravity_magnitude * p / np.linalg.norm(p)
    w = model.earth_rate_ecef()
    return ImuIncrements(w * T / 2, w * T / 2, f * T / 2, f * T / 2, T)


lon_lat = st.tuples(st.floats(-np.pi, np.pi), st.floats(-np.pi / 2, np.pi / 2))


@given(lon_lat)
def test_earth_stationary_fixed_point(ll):
    p = curvilinear_to_ecef((ll[0], ll[1], 100.0))
    s = EarthFrameState(IDENTITY_QUAT, np.zeros(3), p)
    for _ in range(5):
        s = earth_frame_step(s, stationary_increments(p))
        assert np.linalg.norm(s.p - p) < 1e-6 * 5
    np.testing.assert_allclose(quat_to_dcm(s.q), np.eye(3), atol=1e-15)


def test_earth_stationary_single_step():
    p = curvilinear_to_ecef(CurvilinearPosition.from_degrees(120, 50, 0))
    s = earth_frame_step(EarthFrameState(IDENTITY_QUAT, np.zeros(3), p), stationary_increments(p))
    assert np.linalg.norm(s.p - p) < 1e-6
    assert s.t == pytest.approx(0.02)


def test_earth_fixed_body_keeps_attitude():
    # pins the sign of the Earth-rotation correction: w_ib = C_e^b w_ie leaves C_b^e constant
    rng = np.random.default_rng(3)
    q0 = rng.normal(size=4)
    q0 /= np.linalg.norm(q0)
    c = quat_to_dcm(q0)
    w_b = c.T @ MODEL.earth_rate_ecef()
    n, T = 100_000, 0.02
    dth = np.broadcast_to(w_b * T / 2, (n, 2, 3))
    p = curvilinear_to_ecef((0.3, 1.2, 0.0))
    traj = propagate_earth(EarthFrameState(q0, np.zeros(3), p), dth, np.zeros((n, 2, 3)), T,
                           vertical_reset=False)
    # rounding budget ~1e-16 per step; the opposite sign would drift by 2 w_ie t = 0.29 rad
    assert np.abs(quat_to_dcm(traj.q[-1]) - c).max() < 1e-16 * n


def test_pure_trapezoid_exact():
    model = EarthModel(rotation_rate=0.0, gravity_magnitude=0.0)
    s = EarthFrameState(IDENTITY_QUAT, [1.0, 0, 0], [7e6, 0, 0])
    s1 = earth_frame_step(s, ImuIncrements.zero(1.0), model)
    np.testing.assert_array_equal(s1.p - s.p, [1.0, 0, 0])
    np.testing.assert_array_equal(s1.v, s.v)



def test_llf_zero_forcing_matches_hand_evaluation():
    # with no specific force the N-U-E velocity still turns with the transport rate
    model = EarthModel(rotation_rate=0.0, gravity_magnitude=0.0)
    T, r = 1.0, model.equatorial_radius + 100.0
    lat = 0.4
    v = np.array([10.0, 0.0, 5.0])
    w_en = np.array([5.0 / r, 5.0 * np.tan(lat) / r, -10.0 / r])
    v1 = v - T * np.cross(w_en, v)
    step = T * (v + v1) / 2
    ll1 = local_level_step(LocalLevelState(IDENTITY_QUAT, v, (0.2, lat, 100.0)), ImuIncrements.zero(T), model)
    np.testing.assert_allclose(ll1.v, v1, rtol=1e-15, atol=1e-18)
    np.testing.assert_allclose(np.array(ll1.pos), [0.2 + step[2] / (r * np.cos(lat)), lat + step[0] / r,
                                                   100.0 + step[1]], rtol=1e-15)


@given(arrays(np.float64, (50, 2, 3), elements=st.floats(-0.01, 0.01)),
       arrays(np.float64, (50, 2, 3), elements=st.floats(-1.0, 1.0)))
def test_batch_matches_single_steps(dth, dv):
    T = 0.02
    s = EarthFrameState(IDENTITY_QUAT, [100.0, -50.0, 20.0], curvilinear_to_ecef((1.0, 0.5, 0.0)))
    traj = propagate_earth(s, dth, dv, T)
    for k in range(len(dth)):
        s = vertical_reset_earth(earth_frame_step(s, ImuIncrements(dth[k, 0], dth[k, 1], dv[k, 0], dv[k, 1], T)))
    np.testing.assert_array_equal(traj.pos[-1], s.p)
    np.testing.assert_array_equal(traj.q[-1], s.q)
    assert traj.t[-1] == pytest.approx(s.t)


def test_llf_batch_matches_single_steps(rng):
    T = 0.02
    dth = rng.uniform(-0.01, 0.01, (40, 2, 3))
    dv = rng.uniform(-1, 1, (40, 2, 3))
    s = LocalLevelState(IDENTITY_QUAT, [100.0, 3.0, 20.0], (1.0, 0.5, 10.0))
    traj = propagate_llf(s, dth, dv, T)
    for k in range(len(dth)):
        s = vertical_reset_llf(local_level_step(s, ImuIncrements(dth[k, 0], dth[k, 1], dv[k, 0], dv[k, 1], T)))
    np.testing.assert_array_equal(traj.pos[-1], np.array(s.pos))
    np.testing.assert_array_equal(traj.v[-1], s.v)


def test_quaternion_norm_over_a_million_steps(rng):
    n = 1_000_000
    dth = rng.normal(scale=1e-2, size=(n, 2, 3))
    traj = propagate_earth(EarthFrameState(IDENTITY_QUAT, np.zeros(3), [6.4e6, 0, 0]), dth,
                           np.zeros((n, 2, 3)), 0.02, EarthModel(gravity_magnitude=0.0),
                           vertical_reset=False)
    assert np.abs(np.linalg.norm(traj.q, axis=1) - 1).max() < 1e-12


def test_llf_stationary_fixed_point():
    pos = CurvilinearPosition.from_degrees(120, 50, 0)
    c_en = ecef_to_nue_dcm(pos.lon, pos.lat)
    s = LocalLevelState(dcm_to_quat(c_en), np.zeros(3), pos)
    p = curvilinear_to_ecef(pos)
    s1 = local_level_step(s, stationary_increments(p))
    dlat, dlon = s1.pos.lat - pos.lat, s1.pos.lon - pos.lon
    assert np.rad2deg(abs(dlat)) < 1e-6 and np.rad2deg(abs(dlon)) < 1e-6
    assert abs(s1.pos.h - pos.h) < 1e-6
    assert np.linalg.norm(s1.v) < 1e-6


def test_llf_refuses_singular_latitude():
    s = LocalLevelState(IDENTITY_QUAT, [100.0, 0, 0], (0.0, np.pi / 2 - 1e-8, 0.0))
    with pytest.raises(SingularLatitude):
        local_level_step(s, ImuIncrements.zero(0.02))


def test_llf_refuses_to_cross_pole():
    # 1e-5 rad short of the pole, heading north at 2000 m/s: one 0.05 s step overshoots
    s = LocalLevelState(IDENTITY_QUAT, [2000.0, 0, 0], (0.0, np.pi / 2 - 1e-5, 0.0))
    with pytest.raises(SingularLatitude):
        local_level_step(s, ImuIncrements.zero(0.05), EarthModel(rotation_rate=0, gravity_magnitude=0))


def test_llf_batch_reports_singularity():
    s = LocalLevelState(IDENTITY_QUAT, [2000.0, 0, 0], (0.0, np.pi / 2 - 1e-4, 0.0))
    traj = propagate_llf(s, np.zeros((100, 2, 3)), np.zeros((100, 2, 3)), 0.05,
                         EarthModel(rotation_rate=0, gravity_magnitude=0))
    assert traj.singular_at is not None
    assert np.all(np.abs(traj.pos[:, 1]) <= np.pi / 2)
    assert np.isclose(traj.singular_at, traj.t[-1])


def test_vertical_reset_earth():
    p = curvilinear_to_ecef((0.7, -0.3, 500.0))
    c_en = ecef_to_nue_dcm(0.7, -0.3)
    v_h = c_en.T @ np.array([30.0, 0.0, -12.0])
    v_r = 7.0 * p / np.linalg.norm(p)
    s = EarthFrameState(IDENTITY_QUAT, v_h, p)
    np.testing.assert_allclose(vertical_reset_earth(s).v, v_h, atol=1e-12)
    np.testing.assert_allclose(vertical_reset_earth(EarthFrameState(IDENTITY_QUAT, v_r, p)).v, 0, atol=1e-12)
    out = vertical_reset_earth(EarthFrameState(IDENTITY_QUAT, v_h + v_r, p))
    np.testing.assert_allclose(out.v, v_h, atol=1e-12)
    np.testing.assert_array_equal(out.p, p)
    with pytest.raises(ValueError):
        vertical_reset_earth(EarthFrameState(IDENTITY_QUAT, v_h, np.zeros(3)))


@given(vel, lon_lat)
def test_vertical_reset_earth_is_projection(v, ll):
    p = curvilinear_to_ecef((ll[0], ll[1], 0.0))
    out = vertical_reset_earth(EarthFrameState(IDENTITY_QUAT, v, p)).v
    up = p / np.linalg.norm(p)
    np.testing.assert_allclose(out, v - up * (up @ v), atol=1e-9)


def test_vertical_reset_llf():
    s = LocalLevelState(IDENTITY_QUAT, [1.0, 2.0, 3.0], (0, 0, 0))
    np.testing.assert_array_equal(vertical_reset_llf(s).v, [1, 0, 3])
    s2 = LocalLevelState(IDENTITY_QUAT, [1.0, 0.0, 3.0], (0, 0, 0))
    np.testing.assert_array_equal(vertical_reset_llf(s2).v, s2.v)
    np.testing.assert_array_equal(vertical_reset_llf(vertical_reset_llf(s)).v, vertical_reset_llf(s).v)


def test_continuous_rhs_examples():
    p = curvilinear_to_ecef((0.4, 0.9, 0.0))
    c = quat_to_dcm([0.8, 0.0, 0.6, 0.0])
    g = -MODEL.gravity_magnitude * p / np.linalg.norm(p)
    w_ib = c.T @ MODEL.earth_rate_ecef()
    c_dot, v_dot, p_dot = continuous_rhs(c, np.zeros(3), p, -c.T @ g, w_ib)
    np.testing.assert_allclose(v_dot, 0, atol=1e-14)
    np.testing.assert_allclose(c_dot, 0, atol=1e-20)
    np.testing.assert_array_equal(p_dot, 0)


def test_rk4_reproduces_analytic_trajectory():
    cfg = trajgen.scenario_transpolar()
    s0 = trajgen.truth_at(2200.0, cfg)
    t, c, vs, ps = rk4_integrate(np.eye(3), s0.v, s0.p, 2200.0, 60.0, 1e-3,
                                 lambda t: trajgen.specific_force(t, cfg),
                                 lambda t: trajgen.angular_rate(t, cfg), cfg.earth)
    p_true, v_true, _ = trajgen.kinematics(t, cfg)
    assert np.abs(ps - p_true).max() < 1e-3
    np.testing.assert_allclose(c, np.eye(3), atol=1e-12)


def test_earth_run_finite_through_pole(transpolar_reports):
    r = transpolar_reports["earth"]
    assert np.all(np.isfinite(r.pos_err))
    assert r.singular_at is None
    assert r.t[-1] == pytest.approx(5400.0)


def _transpolar_earth_max_error(imu_rate):
    cfg = trajgen.scenario_transpolar(imu_rate=imu_rate)
    t, dth, dv = trajgen.imu_series(cfg)
    traj = propagate_earth(trajgen.earth_state_at(0.0, cfg), dth, dv, cfg.nav_interval, cfg.earth)
    p_true, _, _ = trajgen.kinematics(traj.t, cfg)
    return np.linalg.norm(traj.pos - p_true, axis=1).max()


def test_error_scales_first_order_in_interval():
    # the explicit start-of-interval gravity and Coriolis terms are first order in T
    e100, e200 = _transpolar_earth_max_error(100), _transpolar_earth_max_error(200)
    assert e100 / e200 == pytest.approx(2.0, rel=0.05)


def test_halving_interval_gives_fourfold_reduction():
    """Second-order convergence of the Earth-frame position error on scenario 2."""
    e100, e200 = _transpolar_earth_max_error(100), _transpolar_earth_max_error(200)
    assert 3.0 < e100 / e200 < 5.0


def test_rk4_window_discrepancy_is_gravity_lag():
    # over a 60 s window the stepper drifts from RK4 as 1/2 a t^2 with
    # a = g0 v T / (2 (R + h)), the along-track lag of start-of-interval gravity
    cfg = trajgen.scenario_transpolar()
    for T_rate in (100, 200):
        c = trajgen.scenario_transpolar(imu_rate=T_rate)
        s0 = trajgen.earth_state_at(1000.0, c)
        _, dth, dv = trajgen.imu_series(c, t0=1000.0, n_nav=int(60 / c.nav_interval))
        traj = propagate_earth(s0, dth, dv, c.nav_interval, c.earth, vertical_reset=False)
        _, _, _, ps = rk4_integrate(np.eye(3), s0.v, s0.p, 1000.0, 60.0, 1e-3,
                                    lambda t: trajgen.specific_force(t, cfg),
                                    lambda t: trajgen.angular_rate(t, cfg), cfg.earth)
        lag = cfg.earth.gravity_magnitude * cfg.speed * c.nav_interval / (2 * cfg.radius)
        assert np.linalg.norm(traj.pos[-1] - ps[-1]) == pytest.approx(0.5 * lag * 60.0 ** 2, rel=0.1)
