"""Run both flight scenarios with both mechanizations and write CSV/JSON/gnuplot output."""
import argparse
from pathlib import Path

from polarins import harness, trajgen


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--imu-rate", type=float, default=100.0)
    args = ap.parse_args()

    scenarios = {
        "scenario1_southward": trajgen.scenario_southward(imu_rate=args.imu_rate),
        "scenario2_transpolar": trajgen.scenario_transpolar(imu_rate=args.imu_rate),
    }
    paths = []
    for name, cfg in scenarios.items():
        for r in harness.run_scenario(cfg, "both", name):
            paths.append(harness.write_report(r, args.out))
            s = r.summary
            sing = "" if s["singular_at_s"] is None else "  singular at {:.2f} s".format(s["singular_at_s"])
            print("{:<22} {:<6} max {:8.2f} m  final {:8.2f} m{}".format(
                name, r.mechanization, s["max_pos_err_m"], s["final_pos_err_m"], sing))
    harness.write_plot_script(paths, args.out)
    print("wrote", args.out)


if __name__ == "__main__":
    main()
