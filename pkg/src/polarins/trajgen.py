"""Analytic flight paths and perfect-sensor IMU/GNSS synthesis.

Two path kinds are generated on a spherical Earth at constant height and
speed, with the body frame held aligned to the Earth frame (``C_b^e = I``):

``meridian``
    Great-circle flight along a meridian; latitude grows linearly with time
    and the path passes straight over a pole when it gets there.
``parallel``
    Constant-latitude flight (a continuous turn). Not one of the built-in
    scenarios; it exists to give the alignment a direction-varying maneuver.

With ``C_b^e = I`` the gyros read the Earth rate and the accelerometers read
``a^e + 2 w_ie x v^e - g^e``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .attitude import IDENTITY_QUAT, dcm_to_quat
from .geodesy import (SINGULAR_COS_TOL, CurvilinearPosition, EarthModel, ecef_to_nue_dcm,
                      wrap_longitude)
from .strapdown import EarthFrameState, LocalLevelState

PATH_KINDS = ("meridian", "parallel")


@dataclass(frozen=True)
class ScenarioConfig:
    """Analytic scenario description.

    Angles are in degrees, ``speed`` is signed (positive northward on a
    meridian, eastward on a parallel), rates are in Hz.
    """

    path_kind: str = "meridian"
    lon0_deg: float = 120.0
    lat0_deg: float = 50.0
    h0: float = 10000.0
    speed: float = 2000.0
    duration: float = 3600.0
    imu_rate: float = 100.0
    gnss_rate: float = 1.0
    earth: EarthModel = field(default_factory=EarthModel)

    def __post_init__(self):
        if self.path_kind not in PATH_KINDS:
            raise ValueError("path_kind must be one of {}".format(PATH_KINDS))
        if not self.duration > 0:
            raise ValueError("duration must be positive")
        if not self.imu_rate > 0 or not self.gnss_rate > 0:
            raise ValueError("rates must be positive")
        if abs(self.lat0_deg) > 90:
            raise ValueError("lat0_deg must lie in [-90, 90]")
        if not self.earth.is_sphere:
            raise ValueError("analytic paths are defined on a spherical Earth only")
        n_nav = self.duration * self.imu_rate / 2
        if abs(n_nav - round(n_nav)) > 1e-6:
            raise ValueError("duration must hold a whole number of two-sample intervals")
        if self.path_kind == "parallel" and abs(np.cos(np.deg2rad(self.lat0_deg))) < SINGULAR_COS_TOL:
            raise ValueError("a constant-latitude path cannot start at a pole")

    @property
    def nav_interval(self) -> float:
        """Navigation interval ``T`` spanning two IMU samples."""
        return 2.0 / self.imu_rate

    @property
    def n_nav(self) -> int:
        return int(round(self.duration * self.imu_rate / 2))

    @property
    def radius(self) -> float:
        return self.earth.equatorial_radius + self.h0

    def as_flat_dict(self) -> dict:
        d = asdict(self)
        d.update(d.pop("earth"))
        return d


@dataclass(frozen=True)
class TruthSample:
    t: float
    pos: CurvilinearPosition
    p: np.ndarray
    v: np.ndarray
    dcm: np.ndarray


def scenario_southward(**overrides) -> ScenarioConfig:
    """One hour due south from (120 E, 50 N) at 10 km, 2000 m/s."""
    kw = dict(path_kind="meridian", speed=-2000.0, duration=3600.0)
    kw.update(overrides)
    return ScenarioConfig(**kw)


def scenario_transpolar(**overrides) -> ScenarioConfig:
    """An hour and a half due north from (120 E, 50 N), over the north pole."""
    kw = dict(path_kind="meridian", speed=2000.0, duration=5400.0)
    kw.update(overrides)
    return ScenarioConfig(**kw)


def _angles(t, cfg):
    """Unwrapped longitude and latitude along the path."""
    t = np.asarray(t, dtype=float)
    lon0, lat0 = np.deg2rad(cfg.lon0_deg), np.deg2rad(cfg.lat0_deg)
    if cfg.path_kind == "meridian":
        return np.full_like(t, lon0), lat0 + cfg.speed / cfg.radius * t
    rate = cfg.speed / (cfg.radius * np.cos(lat0))
    return lon0 + rate * t, np.full_like(t, lat0)


def kinematics(t, cfg: ScenarioConfig):
    """ECEF position, velocity and acceleration at times `t`.

    Returns three arrays of shape ``t.shape + (3,)``. The meridian formulas are
    evaluated with the unwrapped latitude, so they stay smooth across a pole.
    """
    lon, lat = _angles(t, cfg)
    r, v = cfg.radius, cfg.speed
    cl, sl, co, so = np.cos(lat), np.sin(lat), np.cos(lon), np.sin(lon)
    p = r * np.stack([cl * co, cl * so, sl], axis=-1)
    if cfg.path_kind == "meridian":
        vel = v * np.stack([-sl * co, -sl * so, cl], axis=-1)
        acc = -(v * v / r) * np.stack([cl * co, cl * so, sl], axis=-1)
    else:
        lon_rate = v / (r * cl)
        vel = v * np.stack([-so, co, np.zeros_like(lon)], axis=-1)
        acc = -v * lon_rate[..., None] * np.stack([co, so, np.zeros_like(lon)], axis=-1)
    return p, vel, acc


def curvilinear(t, cfg: ScenarioConfig):
    """Wrapped ``(lon, lat, h)`` along the path; crossing a pole flips longitude by 180 deg."""
    lon, lat = _angles(t, cfg)
    c = np.cos(lat)
    lat_w = np.arctan2(np.sin(lat), np.abs(c))
    lon_w = wrap_longitude(np.where(c < 0, lon + np.pi, lon))
    return lon_w, lat_w, np.full_like(lat_w, cfg.h0)


def specific_force(t, cfg: ScenarioConfig):
    """Accelerometer output ``a^e + 2 w_ie x v^e - g^e`` (body = Earth axes)."""
    p, vel, acc = kinematics(t, cfg)
    w = cfg.earth.earth_rate_ecef()
    g = -cfg.earth.gravity_magnitude * p / np.linalg.norm(p, axis=-1, keepdims=True)
    return acc + 2.0 * np.cross(w, vel) - g


def angular_rate(t, cfg: ScenarioConfig):
    """Gyro output: the Earth rate, since the body is fixed to Earth axes."""
    t = np.asarray(t, dtype=float)
    return np.broadcast_to(cfg.earth.earth_rate_ecef(), t.shape + (3,)).copy()


def _check_time(t, cfg):
    if not -1e-9 <= t <= cfg.duration + 1e-9:
        raise ValueError("t = {} outside [0, {}]".format(t, cfg.duration))


def truth_at(t, cfg: ScenarioConfig) -> TruthSample:
    _check_time(t, cfg)
    p, vel, _ = kinematics(t, cfg)
    lon, lat, h = curvilinear(t, cfg)
    return TruthSample(float(t), CurvilinearPosition(float(lon), float(lat), float(h)),
                       p, vel, np.eye(3))


def imu_increments_at(t_a, t_b, cfg: ScenarioConfig, n_nodes=5):
    """Gyro and accelerometer increments accumulated over ``[t_a, t_b]``.

    The angle increment is exact; the velocity increment is a Gauss-Legendre
    quadrature of the analytic specific force.
    """
    x, w = leggauss(n_nodes)
    half, mid = 0.5 * (t_b - t_a), 0.5 * (t_a + t_b)
    dv = half * (w[:, None] * specific_force(mid + half * x, cfg)).sum(axis=0)
    return cfg.earth.earth_rate_ecef() * (t_b - t_a), dv


def imu_series(cfg: ScenarioConfig, t0=0.0, n_nav=None, n_nodes=5):
    """Increments for consecutive navigation intervals starting at `t0`.

    Returns
    -------
    t : ndarray, shape (n_nav + 1,)
        Navigation epochs.
    dtheta, dvel : ndarray, shape (n_nav, 2, 3)
        Two sub-sample increments per interval.
    """
    if n_nav is None:
        n_nav = int(round((cfg.duration - t0) / cfg.nav_interval))
    dt = 1.0 / cfg.imu_rate
    edges = t0 + dt * np.arange(2 * n_nav)
    x, w = leggauss(n_nodes)
    nodes = (edges + 0.5 * dt)[:, None] + 0.5 * dt * x[None, :]
    f = specific_force(nodes, cfg)
    dvel = 0.5 * dt * np.einsum("j,ijk->ik", w, f)
    dtheta = np.broadcast_to(cfg.earth.earth_rate_ecef() * dt, dvel.shape)
    t = t0 + cfg.nav_interval * np.arange(n_nav + 1)
    return t, dtheta.reshape(n_nav, 2, 3).copy(), dvel.reshape(n_nav, 2, 3)


def gnss_sample_at(t, cfg: ScenarioConfig):
    """Error-free GNSS fix: ECEF position and velocity at `t`."""
    s = truth_at(t, cfg)
    return s.p, s.v


def gnss_epochs(cfg: ScenarioConfig, duration=None):
    duration = cfg.duration if duration is None else duration
    n = int(np.floor(duration * cfg.gnss_rate + 1e-9))
    return np.arange(n + 1) / cfg.gnss_rate


def earth_state_at(t, cfg: ScenarioConfig) -> EarthFrameState:
    s = truth_at(t, cfg)
    return EarthFrameState(IDENTITY_QUAT.copy(), s.v, s.p, float(t))


def llf_state_at(t, cfg: ScenarioConfig) -> LocalLevelState:
    s = truth_at(t, cfg)
    c_en = ecef_to_nue_dcm(s.pos.lon, s.pos.lat)
    return LocalLevelState(dcm_to_quat(c_en @ s.dcm), c_en @ s.v, s.pos, float(t))
