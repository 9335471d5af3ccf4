"""Two-sample strapdown navigation in the Earth frame and the N-U-E frame.

Each navigation interval ``T`` carries two gyro angle increments and two
accelerometer velocity increments. The update order is attitude, velocity,
position, then (optionally) the zero-vertical-velocity reset. Gravity and
Coriolis terms are evaluated explicitly at the start of the interval.

The scalar kernels are compiled with numba; the public functions wrap them
around small frozen dataclasses. ``propagate_earth`` and ``propagate_llf`` run
whole increment sequences through the same kernels.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit

from .attitude import (_cross, _quat_conj, _quat_mul, _quat_to_dcm, _rotvec_to_quat,
                       _skew)
from .geodesy import (SINGULAR_COS_TOL, CurvilinearPosition, EarthModel, SingularLatitude,
                      _c_e_n, _curv_to_ecef, _earth_rate_nue, _ecef_to_curv, _gravity,
                      _radii, _transport_rate)

# status codes returned by the local-level kernels
OK = 0
SINGULAR = 1


@dataclass(frozen=True)
class ImuIncrements:
    """Two gyro and two accelerometer increments spanning one interval ``T``."""

    dtheta1: np.ndarray
    dtheta2: np.ndarray
    dv1: np.ndarray
    dv2: np.ndarray
    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("navigation interval must be positive")
        for name in ("dtheta1", "dtheta2", "dv1", "dv2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @classmethod
    def zero(cls, T):
        z = np.zeros(3)
        return cls(z, z, z, z, T)


@dataclass(frozen=True)
class EarthFrameState:
    """Attitude ``q_b^e``, ECEF velocity and ECEF position at epoch ``t``."""

    q: np.ndarray
    v: np.ndarray
    p: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        for name in ("q", "v", "p"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    @property
    def dcm(self):
        return _quat_to_dcm(self.q)


@dataclass(frozen=True)
class LocalLevelState:
    """Attitude ``q_b^n``, N-U-E velocity and curvilinear position at epoch ``t``."""

    q: np.ndarray
    v: np.ndarray
    pos: CurvilinearPosition
    t: float = 0.0

    def __post_init__(self):
        for name in ("q", "v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "pos", CurvilinearPosition(*map(float, self.pos)))

    @property
    def dcm(self):
        return _quat_to_dcm(self.q)


# --- kernels --------------------------------------------------------------------

@njit(cache=True)
def _coning(dth1, dth2):
    return dth1 + dth2 + (2.0 / 3.0) * _cross(dth1, dth2)


@njit(cache=True)
def _sculling(dth1, dth2, dv1, dv2):
    return (dv1 + dv2 + 0.5 * _cross(dth1 + dth2, dv1 + dv2)
            + (2.0 / 3.0) * (_cross(dth1, dv2) + _cross(dv1, dth2)))


@njit(cache=True)
def _earth_step(q, v, p, dth1, dth2, dv1, dv2, T, a, e2, omega, g0):
    w_ie = np.array([0.0, 0.0, omega])
    q_b = _rotvec_to_quat(_coning(dth1, dth2))
    q_e = _rotvec_to_quat(T * w_ie)
    c_be = _quat_to_dcm(q)

    q_new = _quat_mul(_quat_mul(_quat_conj(q_e), q), q_b)
    u = _sculling(dth1, dth2, dv1, dv2)
    v_new = v + c_be @ u - 2.0 * T * _cross(w_ie, v) + T * _gravity(p, g0)
    p_new = p + 0.5 * T * (v + v_new)
    return q_new, v_new, p_new


@njit(cache=True)
def _earth_reset(v, p, a, e2):
    lon, lat, _ = _ecef_to_curv(p, a, e2)
    c_en = _c_e_n(lon, lat)
    v_n = c_en @ v
    v_n[1] = 0.0
    return c_en.T @ v_n


@njit(cache=True)
def _llf_step(q, v, lon, lat, h, dth1, dth2, dv1, dv2, T, a, e2, omega, g0, tol):
    if abs(np.cos(lat)) < tol:
        return q, v, lon, lat, h, SINGULAR
    w_ie = _earth_rate_nue(lat, omega)
    w_en = _transport_rate(v, lat, h, a, e2)
    q_b = _rotvec_to_quat(_coning(dth1, dth2))
    q_n = _rotvec_to_quat(T * (w_ie + w_en))
    c_bn = _quat_to_dcm(q)

    q_new = _quat_mul(_quat_mul(_quat_conj(q_n), q), q_b)
    g_n = _c_e_n(lon, lat) @ _gravity(_curv_to_ecef(lon, lat, h, a, e2), g0)
    u = _sculling(dth1, dth2, dv1, dv2)
    v_new = v + c_bn @ u - T * _cross(2.0 * w_ie + w_en, v) + T * g_n

    r = 0.5 * T * (v + v_new)
    re, rn = _radii(lat, a, e2)
    lon_new = lon + r[2] / ((re + h) * np.cos(lat))
    lat_new = lat + r[0] / (rn + h)
    h_new = h + r[1]
    if abs(lat_new) > 0.5 * np.pi:
        # stepped across the pole: curvilinear coordinates have no valid continuation
        return q, v, lon, lat, h, SINGULAR
    lon_new = np.pi - np.mod(np.pi - lon_new, 2.0 * np.pi)
    return q_new, v_new, lon_new, lat_new, h_new, OK


@njit(cache=True)
def _propagate_earth(q, v, p, dtheta, dvel, T, a, e2, omega, g0, reset):
    n = dtheta.shape[0]
    qs = np.empty((n + 1, 4))
    vs = np.empty((n + 1, 3))
    ps = np.empty((n + 1, 3))
    qs[0], vs[0], ps[0] = q, v, p
    for k in range(n):
        q, v, p = _earth_step(q, v, p, dtheta[k, 0], dtheta[k, 1], dvel[k, 0], dvel[k, 1],
                              T, a, e2, omega, g0)
        if reset:
            v = _earth_reset(v, p, a, e2)
        qs[k + 1], vs[k + 1], ps[k + 1] = q, v, p
    return qs, vs, ps


@njit(cache=True)
def _propagate_llf(q, v, lon, lat, h, dtheta, dvel, T, a, e2, omega, g0, tol, reset):
    n = dtheta.shape[0]
    qs = np.empty((n + 1, 4))
    vs = np.empty((n + 1, 3))
    pos = np.empty((n + 1, 3))
    qs[0], vs[0] = q, v
    pos[0, 0], pos[0, 1], pos[0, 2] = lon, lat, h
    for k in range(n):
        q, v, lon, lat, h, status = _llf_step(q, v, lon, lat, h, dtheta[k, 0], dtheta[k, 1],
                                              dvel[k, 0], dvel[k, 1], T, a, e2, omega, g0, tol)
        if status != OK:
            return qs[:k + 1], vs[:k + 1], pos[:k + 1], status
        if reset:
            v = v.copy()
            v[1] = 0.0
        qs[k + 1], vs[k + 1] = q, v
        pos[k + 1, 0], pos[k + 1, 1], pos[k + 1, 2] = lon, lat, h
    return qs, vs, pos, OK


# --- public API -----------------------------------------------------------------

def coning_correction(dtheta1, dtheta2):
    """Two-sample rotation vector ``dth1 + dth2 + 2/3 dth1 x dth2``."""
    return _coning(np.asarray(dtheta1, dtype=float), np.asarray(dtheta2, dtype=float))


def sculling_velocity(dtheta1, dtheta2, dv1, dv2):
    """Two-sample velocity increment with rotation and sculling compensation.

    ``dv1 + dv2 + 1/2 (dth1 + dth2) x (dv1 + dv2) + 2/3 (dth1 x dv2 + dv1 x dth2)``
    """
    return _sculling(*(np.asarray(x, dtype=float) for x in (dtheta1, dtheta2, dv1, dv2)))


def earth_frame_step(state: EarthFrameState, inc: ImuIncrements,
                     model: EarthModel = EarthModel()) -> EarthFrameState:
    """Advance an Earth-frame solution by one navigation interval.

    The Earth-frame rotation over the interval is removed on the left,
    ``C_b^e(k+1) = C_{e_k}^{e_{k+1}} C_b^e(k) C_{b_{k+1}}^{b_k}``, and gravity is
    taken at the start-of-interval position. Valid everywhere, poles included.
    """
    q, v, p = _earth_step(state.q, state.v, state.p, inc.dtheta1, inc.dtheta2,
                          inc.dv1, inc.dv2, float(inc.T), *model.params)
    return EarthFrameState(q, v, p, state.t + inc.T)


def local_level_step(state: LocalLevelState, inc: ImuIncrements,
                     model: EarthModel = EarthModel(), tol=SINGULAR_COS_TOL) -> LocalLevelState:
    """Advance a North-Up-East solution by one navigation interval.

    Raises
    ------
    SingularLatitude
        If the starting latitude has ``|cos L| < tol`` or the position update
        carries the latitude past a pole.
    """
    lon, lat, h = state.pos
    q, v, lon, lat, h, status = _llf_step(state.q, state.v, lon, lat, h, inc.dtheta1,
                                          inc.dtheta2, inc.dv1, inc.dv2, float(inc.T),
                                          *model.params, tol)
    if status != OK:
        raise SingularLatitude(state.pos.lat)
    return LocalLevelState(q, v, CurvilinearPosition(lon, lat, h), state.t + inc.T)


def vertical_reset_earth(state: EarthFrameState, model: EarthModel = EarthModel()) -> EarthFrameState:
    """Zero the Up component of the ECEF velocity at the estimated position."""
    if not np.any(state.p):
        raise ValueError("position vector has zero norm")
    a, e2, _, _ = model.params
    return replace(state, v=_earth_reset(state.v, state.p, a, e2))


def vertical_reset_llf(state: LocalLevelState) -> LocalLevelState:
    v = state.v.copy()
    v[1] = 0.0
    return replace(state, v=v)


@dataclass
class Trajectory:
    """States at every navigation epoch from a batch propagation.

    For local-level runs ``pos`` holds ``(lon, lat, h)`` rows; for Earth-frame
    runs it holds ECEF rows. ``singular_at`` is the epoch at which a local-level
    run stopped, else None.
    """

    t: np.ndarray
    q: np.ndarray
    v: np.ndarray
    pos: np.ndarray
    singular_at: float | None = None
    meta: dict = field(default_factory=dict)


def _check_increments(dtheta, dvel):
    dtheta = np.ascontiguousarray(dtheta, dtype=float)
    dvel = np.ascontiguousarray(dvel, dtype=float)
    if dtheta.ndim != 3 or dtheta.shape[1:] != (2, 3) or dvel.shape != dtheta.shape:
        raise ValueError("increments must have shape (n, 2, 3)")
    return dtheta, dvel


def propagate_earth(state: EarthFrameState, dtheta, dvel, T, model: EarthModel = EarthModel(),
                    vertical_reset=True) -> Trajectory:
    """Run ``earth_frame_step`` (and the vertical reset) over ``n`` intervals.

    `dtheta` and `dvel` have shape ``(n, 2, 3)``: two sub-sample increments per
    navigation interval.
    """
    dtheta, dvel = _check_increments(dtheta, dvel)
    qs, vs, ps = _propagate_earth(state.q, state.v, state.p, dtheta, dvel, float(T),
                                  *model.params, bool(vertical_reset))
    t = state.t + T * np.arange(len(qs))
    return Trajectory(t, qs, vs, ps)


def propagate_llf(state: LocalLevelState, dtheta, dvel, T, model: EarthModel = EarthModel(),
                  vertical_reset=True, tol=SINGULAR_COS_TOL) -> Trajectory:
    """Run ``local_level_step`` over ``n`` intervals, stopping at a singularity.

    Unlike the single step, a singularity does not raise: the returned
    trajectory is truncated and ``singular_at`` records the failing epoch.
    """
    dtheta, dvel = _check_increments(dtheta, dvel)
    lon, lat, h = state.pos
    qs, vs, pos, status = _propagate_llf(state.q, state.v, float(lon), float(lat), float(h),
                                         dtheta, dvel, float(T), *model.params, float(tol),
                                         bool(vertical_reset))
    t = state.t + T * np.arange(len(qs))
    singular_at = float(t[-1]) if status != OK else None
    return Trajectory(t, qs, vs, pos, singular_at)


# --- continuous-time reference ------------------------------------------------

@njit(cache=True)
def _rhs(c, v, p, f_b, w_ib, omega, g0):
    w_ie = np.array([0.0, 0.0, omega])
    w_eb = w_ib - c.T @ w_ie
    c_dot = c @ _skew(w_eb)
    v_dot = c @ f_b - 2.0 * _cross(w_ie, v) + _gravity(p, g0)
    return c_dot, v_dot, v.copy()


@njit(cache=True)
def _rk4(c, v, p, f_nodes, w_nodes, h, omega, g0):
    n = (f_nodes.shape[0] - 1) // 2
    ps = np.empty((n + 1, 3))
    vs = np.empty((n + 1, 3))
    ps[0], vs[0] = p, v
    for k in range(n):
        f0, f1, f2 = f_nodes[2 * k], f_nodes[2 * k + 1], f_nodes[2 * k + 2]
        w0, w1, w2 = w_nodes[2 * k], w_nodes[2 * k + 1], w_nodes[2 * k + 2]
        k1c, k1v, k1p = _rhs(c, v, p, f0, w0, omega, g0)
        k2c, k2v, k2p = _rhs(c + 0.5 * h * k1c, v + 0.5 * h * k1v, p + 0.5 * h * k1p, f1, w1, omega, g0)
        k3c, k3v, k3p = _rhs(c + 0.5 * h * k2c, v + 0.5 * h * k2v, p + 0.5 * h * k2p, f1, w1, omega, g0)
        k4c, k4v, k4p = _rhs(c + h * k3c, v + h * k3v, p + h * k3p, f2, w2, omega, g0)
        c = c + h / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c)
        v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
        p = p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        ps[k + 1], vs[k + 1] = p, v
    return c, vs, ps


def continuous_rhs(dcm, v, p, f_b, w_ib, model: EarthModel = EarthModel()):
    """Time derivatives of ``(C_b^e, v^e, p^e)`` for measured ``f^b`` and ``w_ib^b``.

    Returns
    -------
    c_dot : ndarray, shape (3, 3)
        ``C_b^e [w_eb^b x]`` with ``w_eb^b = w_ib^b - C_e^b w_ie^e``.
    v_dot : ndarray, shape (3,)
        ``C_b^e f^b - 2 w_ie^e x v^e + g^e``.
    p_dot : ndarray, shape (3,)
        ``v^e``.
    """
    arr = lambda x: np.asarray(x, dtype=float)
    return _rhs(arr(dcm), arr(v), arr(p), arr(f_b), arr(w_ib), model.rotation_rate,
                model.gravity_magnitude)


def rk4_integrate(dcm, v, p, t0, duration, step, specific_force, angular_rate,
                  model: EarthModel = EarthModel()):
    """Integrate the continuous Earth-frame equations with classical RK4.

    Parameters
    ----------
    dcm, v, p : array_like
        Initial ``C_b^e``, ECEF velocity and ECEF position.
    t0, duration, step : float
        Start epoch, span and RK4 step; ``duration / step`` must be an integer.
    specific_force, angular_rate : callable
        Vectorized ``f(t) -> (n, 3)`` body-frame specific force and gyro rate.

    Returns
    -------
    t : ndarray, shape (n + 1,)
    dcm : ndarray, shape (3, 3)
        Final attitude.
    v, p : ndarray, shape (n + 1, 3)
    """
    n = int(round(duration / step))
    if not np.isclose(n * step, duration, rtol=0, atol=1e-9 * max(1.0, duration)):
        raise ValueError("duration must be a whole number of steps")
    nodes = t0 + 0.5 * step * np.arange(2 * n + 1)
    f_nodes = np.ascontiguousarray(specific_force(nodes), dtype=float)
    w_nodes = np.ascontiguousarray(angular_rate(nodes), dtype=float)
    c, vs, ps = _rk4(np.asarray(dcm, dtype=float), np.asarray(v, dtype=float),
                     np.asarray(p, dtype=float), f_nodes, w_nodes, float(step),
                     model.rotation_rate, model.gravity_magnitude)
    return t0 + step * np.arange(n + 1), c, vs, ps
