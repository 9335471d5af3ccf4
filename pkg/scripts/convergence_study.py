"""Earth-frame error against navigation rate, and the 60 s gap to an RK4 reference."""
import argparse

import numpy as np

from polarins import harness, trajgen
from polarins.strapdown import propagate_earth, rk4_integrate


def rk4_gap(cfg, t0=1000.0, span=60.0):
    s0 = trajgen.earth_state_at(t0, cfg)
    _, dth, dv = trajgen.imu_series(cfg, t0=t0, n_nav=int(round(span / cfg.nav_interval)))
    traj = propagate_earth(s0, dth, dv, cfg.nav_interval, cfg.earth, vertical_reset=False)
    _, _, _, ps = rk4_integrate(np.eye(3), s0.v, s0.p, t0, span, 1e-3,
                                lambda t: trajgen.specific_force(t, cfg),
                                lambda t: trajgen.angular_rate(t, cfg), cfg.earth)
    return float(np.linalg.norm(traj.pos[-1] - ps[-1]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rates", type=float, nargs="+", default=[50.0, 100.0, 200.0, 400.0])
    args = ap.parse_args()

    prev = None
    print("{:>8} {:>8} {:>12} {:>8} {:>12} {:>12}".format(
        "imu Hz", "T s", "max err m", "ratio", "rk4 gap m", "lag model m"))
    for rate in args.rates:
        cfg = trajgen.scenario_transpolar(imu_rate=rate)
        err = float(harness.run_earth(cfg).pos_err.max())
        lag = cfg.earth.gravity_magnitude * cfg.speed * cfg.nav_interval / (2 * cfg.radius)
        ratio = "" if prev is None else "{:.2f}".format(prev / err)
        print("{:8.0f} {:8.4f} {:12.3f} {:>8} {:12.4f} {:12.4f}".format(
            rate, cfg.nav_interval, err, ratio, rk4_gap(cfg), 0.5 * lag * 60.0 ** 2))
        prev = err


if __name__ == "__main__":
    main()
