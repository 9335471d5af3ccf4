"""Scenario runs, error metrics and result files.

Each mechanization starts from the exact truth at t = 0, steps at the
navigation interval with the zero-vertical-velocity reset after every update,
and is scored against the analytic trajectory once per second.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import trajgen
from .alignment import (AlignmentAccumulator, AlignmentError, InsufficientObservations,
                        current_attitude, solve_initial_attitude)
from .attitude import rotation_angle
from .geodesy import (SINGULAR_COS_TOL, CurvilinearPosition, EarthModel, _curv_to_ecef,
                      _ecef_to_curv, ecef_to_curvilinear, ecef_to_nue_dcm)
from .strapdown import EarthFrameState, ImuIncrements, propagate_earth, propagate_llf
from .trajgen import ScenarioConfig

MECHANIZATIONS = ("earth", "llf")
CSV_HEADER = ["t_s", "pos_err_m", "vel_err_mps", "lat_deg", "lon_deg", "h_m", "flag",
              "err_x_m", "err_y_m", "err_z_m"]


def position_error(estimate, truth) -> float:
    """Euclidean distance between two ECEF positions (m)."""
    return float(np.linalg.norm(np.asarray(estimate, dtype=float) - np.asarray(truth, dtype=float)))


class DisplayState(NamedTuple):
    pos: CurvilinearPosition
    v_nue: np.ndarray
    dcm_bn: np.ndarray
    lon_indeterminate: bool


def display_transform(state: EarthFrameState, model: EarthModel = EarthModel()) -> DisplayState:
    """Express an Earth-frame solution in local-level terms for display.

    Output only; nothing here feeds back into navigation. Near a pole the
    longitude (and so the N/E split) is flagged indeterminate.
    """
    pos = ecef_to_curvilinear(state.p, model)
    c_en = ecef_to_nue_dcm(pos.lon, pos.lat)
    return DisplayState(pos, c_en @ state.v, c_en @ state.dcm,
                        bool(abs(np.cos(pos.lat)) < SINGULAR_COS_TOL))


@dataclass
class RunReport:
    scenario: str
    mechanization: str
    t: np.ndarray
    pos_err: np.ndarray
    vel_err: np.ndarray
    err_xyz: np.ndarray
    lat_deg: np.ndarray
    lon_deg: np.ndarray
    h: np.ndarray
    flag: list
    singular_at: float | None
    config: dict = field(default_factory=dict)

    @property
    def summary(self):
        return {
            "scenario": self.scenario,
            "mechanization": self.mechanization,
            "max_pos_err_m": float(np.max(self.pos_err)),
            "final_pos_err_m": float(self.pos_err[-1]),
            "singular_at_s": self.singular_at,
            "config": self.config,
        }


def _sample_indices(n_states, T, singular):
    stride = int(round(1.0 / T))
    if not np.isclose(stride * T, 1.0):
        raise ValueError("navigation interval must divide one second")
    idx = np.arange(0, n_states, stride)
    if singular and idx[-1] != n_states - 1:
        idx = np.append(idx, n_states - 1)
    return idx


def _report(scenario, mech, cfg, traj, idx, p_est, v_est, lon, lat, h):
    """Score sampled estimates (rows aligned with ``traj.t[idx]``) against truth."""
    t = traj.t[idx]
    p_true, v_true, _ = trajgen.kinematics(t, cfg)
    err = p_est - p_true
    flag = ["ok"] * len(idx)
    if traj.singular_at is not None:
        flag[-1] = "singular"
    return RunReport(
        scenario=scenario, mechanization=mech, t=t,
        pos_err=np.linalg.norm(err, axis=1), vel_err=np.linalg.norm(v_est - v_true, axis=1),
        err_xyz=err, lat_deg=np.rad2deg(lat), lon_deg=np.rad2deg(lon), h=np.asarray(h),
        flag=flag, singular_at=traj.singular_at, config=cfg.as_flat_dict())


def run_earth(cfg: ScenarioConfig, scenario="custom", dtheta=None, dvel=None) -> RunReport:
    if dtheta is None:
        _, dtheta, dvel = trajgen.imu_series(cfg)
    a, e2, _, _ = cfg.earth.params
    traj = propagate_earth(trajgen.earth_state_at(0.0, cfg), dtheta, dvel, cfg.nav_interval, cfg.earth)
    idx = _sample_indices(len(traj.t), cfg.nav_interval, False)
    lon, lat, h = np.array([_ecef_to_curv(p, a, e2) for p in traj.pos[idx]]).T
    return _report(scenario, "earth", cfg, traj, idx, traj.pos[idx], traj.v[idx], lon, lat, h)


def run_llf(cfg: ScenarioConfig, scenario="custom", dtheta=None, dvel=None) -> RunReport:
    if dtheta is None:
        _, dtheta, dvel = trajgen.imu_series(cfg)
    a, e2, _, _ = cfg.earth.params
    traj = propagate_llf(trajgen.llf_state_at(0.0, cfg), dtheta, dvel, cfg.nav_interval, cfg.earth)
    idx = _sample_indices(len(traj.t), cfg.nav_interval, traj.singular_at is not None)
    lon, lat, h = traj.pos[idx].T
    p_est = np.array([_curv_to_ecef(*row, a, e2) for row in traj.pos[idx]])
    v_est = np.array([ecef_to_nue_dcm(o, l).T @ v for o, l, v in zip(lon, lat, traj.v[idx])])
    return _report(scenario, "llf", cfg, traj, idx, p_est, v_est, lon, lat, h)


def run_scenario(cfg: ScenarioConfig, mech="both", scenario="custom"):
    """Run one or both mechanizations on a scenario; returns a list of reports."""
    if mech not in MECHANIZATIONS + ("both",):
        raise ValueError("mech must be 'earth', 'llf' or 'both'")
    _, dtheta, dvel = trajgen.imu_series(cfg)
    reports = []
    if mech in ("earth", "both"):
        reports.append(run_earth(cfg, scenario, dtheta, dvel))
    if mech in ("llf", "both"):
        reports.append(run_llf(cfg, scenario, dtheta, dvel))
    return reports


@dataclass
class AlignmentReport:
    scenario: str
    t: list = field(default_factory=list)
    error_deg: list = field(default_factory=list)
    quality: list = field(default_factory=list)
    n_pairs: list = field(default_factory=list)
    status: list = field(default_factory=list)
    solution: object = None
    config: dict = field(default_factory=dict)

    @property
    def final_status(self):
        return self.status[-1] if self.status else "no_data"

    @property
    def summary(self):
        return {
            "scenario": self.scenario,
            "status": self.final_status,
            "final_att_err_deg": self.error_deg[-1] if self.error_deg else None,
            "final_quality": self.quality[-1] if self.quality else None,
            "n_pairs": self.n_pairs[-1] if self.n_pairs else 0,
            "config": self.config,
        }


def run_alignment(cfg: ScenarioConfig, align_duration, scenario="custom") -> AlignmentReport:
    """Feed synthesized IMU and GNSS data into the coarse alignment.

    At every GNSS epoch the current solution is attempted and the error angle
    of ``C_true^T C_est`` at that epoch is recorded. Degenerate geometry and
    insufficient data are reported as statuses rather than raised.
    """
    if not 0 < align_duration <= cfg.duration + 1e-9:
        raise ValueError("align_duration must lie in (0, duration]")
    T = cfg.nav_interval
    n_nav = int(round(align_duration / T))
    t, dtheta, dvel = trajgen.imu_series(cfg, n_nav=n_nav)
    per_fix = int(round(1.0 / (cfg.gnss_rate * T)))
    if not np.isclose(per_fix * T * cfg.gnss_rate, 1.0):
        raise ValueError("GNSS period must be a whole number of navigation intervals")

    report = AlignmentReport(scenario, config=cfg.as_flat_dict())
    acc = AlignmentAccumulator(0.0, cfg.earth)

    def fix(k):
        p, v = trajgen.gnss_sample_at(t[k], cfg)
        acc.ingest_gnss(t[k], v, p)
        report.t.append(float(t[k]))
        report.n_pairs.append(acc.n_pairs)
        try:
            sol = solve_initial_attitude(acc)
        except InsufficientObservations:
            report.status.append("insufficient")
            report.quality.append(float("nan"))
            report.error_deg.append(float("nan"))
            return
        except AlignmentError as exc:
            report.status.append("degenerate")
            report.quality.append(exc.quality)
            report.error_deg.append(float("nan"))
            return
        truth = trajgen.truth_at(t[k], cfg).dcm
        est = current_attitude(sol, acc)
        report.status.append("ok")
        report.quality.append(sol.quality)
        report.error_deg.append(float(np.rad2deg(rotation_angle(truth.T @ est))))
        report.solution = sol

    fix(0)
    for k in range(n_nav):
        acc.ingest_imu(ImuIncrements(dtheta[k, 0], dtheta[k, 1], dvel[k, 0], dvel[k, 1], T))
        if (k + 1) % per_fix == 0:
            fix(k + 1)
    return report


# --- output files ---------------------------------------------------------------

def _fmt(x):
    return "nan" if x != x else "{:.12g}".format(x)


def write_report(report: RunReport, out_dir):
    """Write ``<scenario>_<mech>.csv`` and ``.json``; return the CSV path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = "{}_{}".format(report.scenario, report.mechanization)
    with open(out / (stem + ".csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for i in range(len(report.t)):
            w.writerow([_fmt(report.t[i]), _fmt(report.pos_err[i]), _fmt(report.vel_err[i]),
                        _fmt(report.lat_deg[i]), _fmt(report.lon_deg[i]), _fmt(report.h[i]),
                        report.flag[i], *map(_fmt, report.err_xyz[i])])
    (out / (stem + ".json")).write_text(json.dumps(report.summary, indent=2) + "\n", encoding="utf-8")
    return out / (stem + ".csv")


def write_alignment_report(report: AlignmentReport, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = "{}_align".format(report.scenario)
    with open(out / (stem + ".csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "att_err_deg", "quality", "n_pairs", "status"])
        for row in zip(report.t, report.error_deg, report.quality, report.n_pairs, report.status):
            w.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]), row[3], row[4]])
    (out / (stem + ".json")).write_text(json.dumps(report.summary, indent=2) + "\n", encoding="utf-8")
    return out / (stem + ".csv")


def write_plot_script(csv_paths, out_dir, name="plot_errors.gp"):
    """Emit a gnuplot script plotting position error against time for each CSV."""
    out = Path(out_dir)
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 'time (s)'",
        "set ylabel 'position error (m)'",
        "set grid",
        "set terminal pngcairo size 900,600",
    ]
    for path in csv_paths:
        path = Path(path)
        lines.append("set output '{}.png'".format(path.stem))
        lines.append("set title '{}'".format(path.stem.replace("_", " ")))
        lines.append("plot '{}' using 1:2 with lines title 'position error'".format(path.name))
    (out / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out / name
