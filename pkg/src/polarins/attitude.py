"""Quaternion, DCM and rotation-vector algebra.

Quaternions are Hamilton, scalar-first arrays ``[s, x, y, z]``. ``quat_to_dcm``
returns the matrix ``(s^2 - |eta|^2) I + 2 eta eta^T + 2 s [eta x]``, so that
``quat_to_dcm(rotvec_to_quat(sigma))`` is the Rodrigues matrix ``exp([sigma x])``.
"""
import numpy as np
from numba import njit

# ||sigma|| below this switches sin(x/2)/x to its Taylor series
SMALL_ANGLE = 1e-8

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


@njit(cache=True)
def _skew(v):
    m = np.zeros((3, 3))
    m[0, 1] = -v[2]
    m[0, 2] = v[1]
    m[1, 0] = v[2]
    m[1, 2] = -v[0]
    m[2, 0] = -v[1]
    m[2, 1] = v[0]
    return m


@njit(cache=True)
def _cross(a, b):
    out = np.empty(3)
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]
    return out


@njit(cache=True)
def _quat_normalize(q):
    return q / np.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])


@njit(cache=True)
def _quat_mul(a, b):
    out = np.empty(4)
    out[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
    out[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2]
    out[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1]
    out[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]
    return _quat_normalize(out)


@njit(cache=True)
def _quat_conj(q):
    out = -q
    out[0] = q[0]
    return out


@njit(cache=True)
def _quat_to_dcm(q):
    s = q[0]
    x, y, z = q[1], q[2], q[3]
    k = s * s - (x * x + y * y + z * z)
    c = np.empty((3, 3))
    c[0, 0] = k + 2 * x * x
    c[0, 1] = 2 * x * y - 2 * s * z
    c[0, 2] = 2 * x * z + 2 * s * y
    c[1, 0] = 2 * y * x + 2 * s * z
    c[1, 1] = k + 2 * y * y
    c[1, 2] = 2 * y * z - 2 * s * x
    c[2, 0] = 2 * z * x - 2 * s * y
    c[2, 1] = 2 * z * y + 2 * s * x
    c[2, 2] = k + 2 * z * z
    return c


@njit(cache=True)
def _rotvec_to_quat(sigma):
    n2 = sigma[0] * sigma[0] + sigma[1] * sigma[1] + sigma[2] * sigma[2]
    n = np.sqrt(n2)
    q = np.empty(4)
    if n < SMALL_ANGLE:
        # cos(n/2) and sin(n/2)/n to 4th order
        q[0] = 1.0 - n2 / 8.0 + n2 * n2 / 384.0
        k = 0.5 - n2 / 48.0 + n2 * n2 / 3840.0
    else:
        q[0] = np.cos(0.5 * n)
        k = np.sin(0.5 * n) / n
    q[1] = k * sigma[0]
    q[2] = k * sigma[1]
    q[3] = k * sigma[2]
    return _quat_normalize(q)


@njit(cache=True)
def _dcm_to_quat(c):
    # Shepperd: branch on the largest of trace and diagonal for conditioning
    tr = c[0, 0] + c[1, 1] + c[2, 2]
    q = np.empty(4)
    i = np.argmax(np.array([tr, c[0, 0], c[1, 1], c[2, 2]]))
    if i == 0:
        r = np.sqrt(1.0 + tr)
        q[0] = 0.5 * r
        q[1] = (c[2, 1] - c[1, 2]) / (2 * r)
        q[2] = (c[0, 2] - c[2, 0]) / (2 * r)
        q[3] = (c[1, 0] - c[0, 1]) / (2 * r)
    elif i == 1:
        r = np.sqrt(1.0 + c[0, 0] - c[1, 1] - c[2, 2])
        q[1] = 0.5 * r
        q[0] = (c[2, 1] - c[1, 2]) / (2 * r)
        q[2] = (c[0, 1] + c[1, 0]) / (2 * r)
        q[3] = (c[0, 2] + c[2, 0]) / (2 * r)
    elif i == 2:
        r = np.sqrt(1.0 - c[0, 0] + c[1, 1] - c[2, 2])
        q[2] = 0.5 * r
        q[0] = (c[0, 2] - c[2, 0]) / (2 * r)
        q[1] = (c[0, 1] + c[1, 0]) / (2 * r)
        q[3] = (c[1, 2] + c[2, 1]) / (2 * r)
    else:
        r = np.sqrt(1.0 - c[0, 0] - c[1, 1] + c[2, 2])
        q[3] = 0.5 * r
        q[0] = (c[1, 0] - c[0, 1]) / (2 * r)
        q[1] = (c[0, 2] + c[2, 0]) / (2 * r)
        q[2] = (c[1, 2] + c[2, 1]) / (2 * r)
    if q[0] < 0:
        q = -q
    return _quat_normalize(q)


@njit(cache=True)
def _earth_rotation(dt, omega):
    a = omega * dt
    c, s = np.cos(a), np.sin(a)
    m = np.zeros((3, 3))
    m[0, 0] = c
    m[0, 1] = -s
    m[1, 0] = s
    m[1, 1] = c
    m[2, 2] = 1.0
    return m


def _vec(v, n):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise ValueError("expected shape ({},), got {}".format(n, v.shape))
    return v


def skew(v):
    """Cross-product matrix: ``skew(a) @ b == cross(a, b)``."""
    return _skew(_vec(v, 3))


def quat_normalize(q):
    return _quat_normalize(_vec(q, 4))


def quat_to_dcm(q):
    """Direction cosine matrix of a unit quaternion."""
    return _quat_to_dcm(_vec(q, 4))


def dcm_to_quat(c):
    """Unit quaternion with non-negative scalar part for a rotation matrix."""
    return _dcm_to_quat(np.asarray(c, dtype=float))


def rotvec_to_quat(sigma):
    """Quaternion ``cos(|s|/2) + s/|s| sin(|s|/2)`` of a rotation vector."""
    return _rotvec_to_quat(_vec(sigma, 3))


def quat_multiply(a, b):
    """Hamilton product ``a * b``, renormalized."""
    return _quat_mul(_vec(a, 4), _vec(b, 4))


def quat_conjugate(q):
    return _quat_conj(_vec(q, 4))


def dcm_transpose(c):
    return np.asarray(c, dtype=float).T.copy()


def dcm_multiply(a, b):
    return np.asarray(a, dtype=float) @ np.asarray(b, dtype=float)


def earth_frame_rotation(dt, rotation_rate=7.292115e-5):
    """Rotation ``C_{e(t)}^{e(0)}`` of the Earth frame over an elapsed time `dt`.

    Maps coordinates in the Earth frame at time ``t`` into the inertially frozen
    Earth frame of time 0: a rotation by ``rotation_rate * dt`` about z.
    """
    return _earth_rotation(float(dt), float(rotation_rate))


def rotation_angle(c):
    """Angle of the rotation described by a DCM, in radians."""
    c = np.asarray(c, dtype=float)
    # atan2 keeps full precision near 0 and pi, unlike acos of the trace
    w = 0.5 * np.array([c[2, 1] - c[1, 2], c[0, 2] - c[2, 0], c[1, 0] - c[0, 1]])
    cos_a = 0.5 * (np.trace(c) - 1.0)
    return float(np.arctan2(np.linalg.norm(w), cos_a))
