"""GNSS-aided coarse alignment in the Earth frame.

The initial attitude satisfies ``C_b^e(0) alpha(t) = beta(t)`` for every t, with

    alpha = int C_{b(t)}^{b(0)} f^b dt
    beta  = C_{e(t)}^{e(0)} v^e - v^e(0) + int C_{e(t)}^{e(0)} (w_ie x v^e) dt
            - int C_{e(t)}^{e(0)} g^e dt

``alpha`` comes from the IMU alone, ``beta`` from GNSS velocity/position and the
gravity model. Each GNSS epoch contributes one normalized pair; the attitude is
the Davenport q-method solution over all pairs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attitude import (IDENTITY_QUAT, earth_frame_rotation, quat_multiply, quat_to_dcm,
                       rotvec_to_quat)
from .geodesy import EarthModel, gravity_ecef
from .strapdown import ImuIncrements, coning_correction, sculling_velocity

#: Pairs are only stored once both ``|alpha|`` and ``|beta|`` exceed this (m/s).
PAIR_FLOOR = 0.1
#: Eigenvalue gap per pair below which the geometry is declared degenerate.
QUALITY_THRESHOLD = 1e-3


class AlignmentError(Exception):
    pass


class InsufficientObservations(AlignmentError):
    pass


class DegenerateGeometry(AlignmentError):
    """Observation directions too close to collinear to fix the attitude."""

    def __init__(self, quality, message=None):
        self.quality = quality
        super().__init__(message or "alignment quality {:.3e} below threshold".format(quality))


@dataclass(frozen=True)
class AlignmentSolution:
    q: np.ndarray
    quality: float
    n_pairs: int

    @property
    def dcm(self):
        return quat_to_dcm(self.q)


class AlignmentAccumulator:
    """Time-ordered accumulator of IMU and GNSS data for one alignment run.

    IMU intervals must be ingested contiguously from `t0`; GNSS epochs must be
    strictly increasing and land within one navigation interval of the IMU
    clock. The first GNSS epoch fixes ``v^e(0)``.
    """

    def __init__(self, t0=0.0, model: EarthModel = EarthModel(), floor=PAIR_FLOOR):
        self.model = model
        self.floor = floor
        self.t0 = float(t0)
        self.t = float(t0)
        self.q_body = IDENTITY_QUAT.copy()  # C_{b(t)}^{b(0)}
        self.alpha = np.zeros(3)
        self.int_coriolis = np.zeros(3)
        self.int_gravity = np.zeros(3)
        self.beta = np.zeros(3)
        self.v0 = None
        self.pairs_alpha = []
        self.pairs_beta = []
        self._last_T = 0.0
        self._prev = None  # (t, rotated w x v, rotated g) at the previous GNSS epoch

    @property
    def n_pairs(self):
        return len(self.pairs_alpha)

    @property
    def body_rotation(self):
        return quat_to_dcm(self.q_body)

    def ingest_imu(self, inc: ImuIncrements):
        u = sculling_velocity(inc.dtheta1, inc.dtheta2, inc.dv1, inc.dv2)
        self.alpha = self.alpha + quat_to_dcm(self.q_body) @ u
        self.q_body = quat_multiply(self.q_body, rotvec_to_quat(coning_correction(inc.dtheta1, inc.dtheta2)))
        self.t += inc.T
        self._last_T = inc.T
        return self

    def ingest_gnss(self, t, v, p):
        """Add a GNSS velocity/position fix; return True if a pair was stored."""
        t = float(t)
        v = np.asarray(v, dtype=float)
        if self._prev is not None and t <= self._prev[0]:
            raise ValueError("GNSS epochs must be strictly increasing")
        if abs(t - self.t) > max(self._last_T, 1e-9):
            raise ValueError("GNSS epoch {} does not match IMU clock {}".format(t, self.t))

        c = earth_frame_rotation(t - self.t0, self.model.rotation_rate)
        cor = c @ np.cross(self.model.earth_rate_ecef(), v)
        grav = c @ gravity_ecef(p, self.model)
        if self._prev is None:
            self.v0 = v.copy()
        else:
            t_prev, cor_prev, grav_prev = self._prev
            dt = t - t_prev
            self.int_coriolis = self.int_coriolis + 0.5 * dt * (cor + cor_prev)
            self.int_gravity = self.int_gravity + 0.5 * dt * (grav + grav_prev)
        self._prev = (t, cor, grav)
        self.beta = c @ v - self.v0 + self.int_coriolis - self.int_gravity

        na, nb = np.linalg.norm(self.alpha), np.linalg.norm(self.beta)
        if na > self.floor and nb > self.floor:
            self.pairs_alpha.append(self.alpha / na)
            self.pairs_beta.append(self.beta / nb)
            return True
        return False


def davenport_matrix(alpha_hat, beta_hat, weights=None):
    """Symmetric 4x4 matrix whose top eigenvector is the Wahba solution.

    The quadratic form ``q^T K q`` equals ``sum_i w_i beta_i^T C(q) alpha_i`` for
    scalar-first quaternions and ``C(q) = quat_to_dcm(q)``.
    """
    alpha_hat = np.asarray(alpha_hat, dtype=float)
    beta_hat = np.asarray(beta_hat, dtype=float)
    if weights is None:
        weights = np.ones(len(alpha_hat))
    b = np.einsum("i,ij,ik->jk", weights, beta_hat, alpha_hat)
    sigma = np.trace(b)
    z = np.array([b[2, 1] - b[1, 2], b[0, 2] - b[2, 0], b[1, 0] - b[0, 1]])
    k = np.empty((4, 4))
    k[0, 0] = sigma
    k[0, 1:] = z
    k[1:, 0] = z
    k[1:, 1:] = b + b.T - sigma * np.eye(3)
    return k


def solve_wahba(alpha_hat, beta_hat):
    """Return ``(q, eigenvalues)`` for ``C(q) alpha_i ~ beta_i``; eigenvalues descending."""
    k = davenport_matrix(alpha_hat, beta_hat)
    w, vecs = np.linalg.eigh(k)
    q = vecs[:, -1]
    if q[0] < 0:
        q = -q
    return q / np.linalg.norm(q), w[::-1]


def solve_initial_attitude(acc: AlignmentAccumulator, threshold=QUALITY_THRESHOLD) -> AlignmentSolution:
    """Estimate ``C_b^e(0)`` from the stored observation pairs.

    Raises
    ------
    InsufficientObservations
        Fewer than two pairs have been stored.
    DegenerateGeometry
        The normalized eigenvalue gap is below `threshold`; the exception
        carries the ``quality`` value.
    """
    n = acc.n_pairs
    if n < 2:
        raise InsufficientObservations("need at least 2 observation pairs, have {}".format(n))
    q, lam = solve_wahba(acc.pairs_alpha, acc.pairs_beta)
    quality = max(float(lam[0] - lam[1]) / n, 0.0)
    if quality < threshold:
        raise DegenerateGeometry(quality)
    return AlignmentSolution(q, quality, n)


def current_attitude(sol: AlignmentSolution, acc: AlignmentAccumulator) -> np.ndarray:
    """``C_b^e(t) = C_{e(0)}^{e(t)} C_b^e(0) C_{b(t)}^{b(0)}`` at the accumulator time."""
    c_e = earth_frame_rotation(acc.t - acc.t0, acc.model.rotation_rate)
    return c_e.T @ sol.dcm @ acc.body_rotation
