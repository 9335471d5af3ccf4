"""Earth model, curvilinear/ECEF transforms, gravity and local-level geometry.

Local-level axes are ordered North-Up-East (N-U-E) throughout the package.
Curvilinear positions are ``(lon, lat, h)`` in radians and metres.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

#: Below this value of ``|cos L|`` the local-level geometry is treated as singular.
SINGULAR_COS_TOL = 1e-6


class SingularLatitude(ArithmeticError):
    """Local-level quantity requested at a latitude where ``cos L`` vanishes."""

    def __init__(self, latitude, message=None):
        self.latitude = float(latitude)
        if message is None:
            message = "latitude {:.9f} deg is singular for the local-level frame".format(
                np.rad2deg(self.latitude))
        super().__init__(message)


@dataclass(frozen=True)
class EarthModel:
    """Reference ellipsoid, rotation rate and gravity magnitude.

    The defaults describe a sphere of WGS-84 equatorial radius with constant
    radial gravity.
    """

    equatorial_radius: float = 6378137.0
    eccentricity_sq: float = 0.0
    rotation_rate: float = 7.292115e-5
    gravity_magnitude: float = 9.80665

    def __post_init__(self):
        if not self.equatorial_radius > 0:
            raise ValueError("equatorial_radius must be positive")
        if not 0 <= self.eccentricity_sq < 1:
            raise ValueError("eccentricity_sq must lie in [0, 1)")
        if not self.rotation_rate >= 0:
            raise ValueError("rotation_rate must be non-negative")
        if not self.gravity_magnitude >= 0:
            raise ValueError("gravity_magnitude must be non-negative")

    @property
    def is_sphere(self) -> bool:
        return self.eccentricity_sq == 0.0

    @property
    def params(self):
        """Plain-float tuple ``(a, e2, omega, g0)`` consumed by the compiled kernels."""
        return (float(self.equatorial_radius), float(self.eccentricity_sq),
                float(self.rotation_rate), float(self.gravity_magnitude))

    def earth_rate_ecef(self) -> np.ndarray:
        return np.array([0.0, 0.0, self.rotation_rate])


class CurvilinearPosition(NamedTuple):
    """Longitude and latitude in radians, height in metres."""

    lon: float
    lat: float
    h: float

    @classmethod
    def from_degrees(cls, lon_deg, lat_deg, h):
        return cls(np.deg2rad(lon_deg), np.deg2rad(lat_deg), float(h))

    def to_degrees(self):
        return np.rad2deg(self.lon), np.rad2deg(self.lat), self.h


def wrap_longitude(lon):
    """Map angles into ``(-pi, pi]``."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(lon, dtype=float), 2 * np.pi)
    return float(wrapped) if wrapped.ndim == 0 else wrapped


# --- compiled kernels -------------------------------------------------------

@njit(cache=True)
def _radii(lat, a, e2):
    s = np.sin(lat)
    t = 1.0 - e2 * s * s
    re = a / np.sqrt(t)
    rn = a * (1.0 - e2) / (t * np.sqrt(t))
    return re, rn


@njit(cache=True)
def _curv_to_ecef(lon, lat, h, a, e2):
    re, _ = _radii(lat, a, e2)
    cl = np.cos(lat)
    out = np.empty(3)
    out[0] = (re + h) * cl * np.cos(lon)
    out[1] = (re + h) * cl * np.sin(lon)
    out[2] = (re * (1.0 - e2) + h) * np.sin(lat)
    return out


@njit(cache=True)
def _ecef_to_curv(p, a, e2):
    x, y, z = p[0], p[1], p[2]
    rho = np.sqrt(x * x + y * y)
    if rho == 0.0:
        lon = 0.0
    else:
        lon = np.arctan2(y, x)
        if lon == -np.pi:
            lon = np.pi
    if e2 == 0.0:
        r = np.sqrt(rho * rho + z * z)
        return lon, np.arctan2(z, rho), r - a

    # fixed-point iteration on latitude; converges in a handful of passes for e2 < 0.01
    lat = np.arctan2(z, rho * (1.0 - e2))
    for _ in range(50):
        re, _ = _radii(lat, a, e2)
        lat_new = np.arctan2(z + e2 * re * np.sin(lat), rho)
        if abs(lat_new - lat) < 1e-15:
            lat = lat_new
            break
        lat = lat_new
    re, _ = _radii(lat, a, e2)
    cl = np.cos(lat)
    sl = np.sin(lat)
    if abs(cl) > 0.5:
        h = rho / cl - re
    else:
        h = z / sl - re * (1.0 - e2)
    return lon, lat, h


@njit(cache=True)
def _c_e_n(lon, lat):
    sl, cl = np.sin(lat), np.cos(lat)
    so, co = np.sin(lon), np.cos(lon)
    c = np.empty((3, 3))
    c[0, 0] = -sl * co
    c[0, 1] = -sl * so
    c[0, 2] = cl
    c[1, 0] = cl * co
    c[1, 1] = cl * so
    c[1, 2] = sl
    c[2, 0] = -so
    c[2, 1] = co
    c[2, 2] = 0.0
    return c


@njit(cache=True)
def _gravity(p, g0):
    r = np.sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2])
    return -g0 * p / r


@njit(cache=True)
def _transport_rate(v, lat, h, a, e2):
    re, rn = _radii(lat, a, e2)
    w = np.empty(3)
    w[0] = v[2] / (re + h)
    w[1] = v[2] * np.tan(lat) / (re + h)
    w[2] = -v[0] / (rn + h)
    return w


@njit(cache=True)
def _earth_rate_nue(lat, omega):
    w = np.empty(3)
    w[0] = omega * np.cos(lat)
    w[1] = omega * np.sin(lat)
    w[2] = 0.0
    return w


# --- public API ---------------------------------------------------------------

def _check_latitude(lat, tol=SINGULAR_COS_TOL):
    if abs(np.cos(lat)) < tol:
        raise SingularLatitude(lat)


def _nonzero(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (3,):
        raise ValueError("expected a 3-vector, got shape {}".format(p.shape))
    if not np.any(p):
        raise ValueError("position vector has zero norm")
    return p


def curvilinear_to_ecef(p: CurvilinearPosition, model: EarthModel = EarthModel()) -> np.ndarray:
    """Convert longitude, latitude, height to ECEF coordinates.

    For a sphere this is ``(R + h) [cosL cos lon, cosL sin lon, sinL]``.
    """
    a, e2, _, _ = model.params
    return _curv_to_ecef(float(p[0]), float(p[1]), float(p[2]), a, e2)


def ecef_to_curvilinear(p, model: EarthModel = EarthModel()) -> CurvilinearPosition:
    """Convert ECEF coordinates to longitude, latitude and height.

    Closed form on a sphere, fixed-point iteration on an ellipsoid. On the
    polar axis the longitude is reported as 0.

    Raises
    ------
    ValueError
        If `p` is the zero vector.
    """
    p = _nonzero(p)
    a, e2, _, _ = model.params
    return CurvilinearPosition(*_ecef_to_curv(p, a, e2))


def gravity_ecef(p, model: EarthModel = EarthModel()) -> np.ndarray:
    """Constant-magnitude radial gravity ``-g0 p / |p|``."""
    p = _nonzero(p)
    return _gravity(p, model.gravity_magnitude)


def radii_of_curvature(lat, model: EarthModel = EarthModel()):
    """Return ``(R_E, R_N)``, the transverse and meridian radii of curvature."""
    a, e2, _, _ = model.params
    return _radii(float(lat), a, e2)


def curvature_matrix(lat, h, model: EarthModel = EarthModel(), tol=SINGULAR_COS_TOL) -> np.ndarray:
    """Matrix mapping N-U-E velocity to ``(lon, lat, h)`` rates.

    Raises
    ------
    SingularLatitude
        If ``|cos lat| < tol``.
    """
    _check_latitude(lat, tol)
    re, rn = radii_of_curvature(lat, model)
    rc = np.zeros((3, 3))
    rc[0, 2] = 1.0 / ((re + h) * np.cos(lat))
    rc[1, 0] = 1.0 / (rn + h)
    rc[2, 1] = 1.0
    return rc


def transport_rate(v_nue, lat, h, model: EarthModel = EarthModel(), tol=SINGULAR_COS_TOL) -> np.ndarray:
    """Angular rate of the N-U-E frame relative to the Earth frame.

    ``[v_E/(R_E+h), v_E tanL/(R_E+h), -v_N/(R_N+h)]``. The Up component uses the
    East velocity; that is the form for which the N-U-E frame stays locally
    level under the curvature matrix kinematics.
    """
    _check_latitude(lat, tol)
    a, e2, _, _ = model.params
    return _transport_rate(np.asarray(v_nue, dtype=float), float(lat), float(h), a, e2)


def earth_rotation_rate_nue(lat, model: EarthModel = EarthModel()) -> np.ndarray:
    return _earth_rate_nue(float(lat), model.rotation_rate)


def ecef_to_nue_dcm(lon, lat) -> np.ndarray:
    """DCM ``C_e^n`` taking ECEF components to North-Up-East components."""
    return _c_e_n(float(lon), float(lat))
