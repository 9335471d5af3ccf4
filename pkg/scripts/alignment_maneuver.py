"""Turning vs straight flight near the pole: attitude error and solution quality."""
import argparse

from polarins import harness, trajgen
from polarins.alignment import QUALITY_THRESHOLD


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--duration", type=float, default=300.0)
    ap.add_argument("--lat", type=float, nargs="+", default=[45.0, 80.0, 89.5, 89.9])
    args = ap.parse_args()

    print("threshold {:.0e}".format(QUALITY_THRESHOLD))
    print("{:>6}  {:<9} {:<11} {:>10} {:>12}".format("lat", "path", "status", "quality", "error deg"))
    for lat in args.lat:
        for kind in ("parallel", "meridian"):
            cfg = trajgen.ScenarioConfig(path_kind=kind, lat0_deg=lat, duration=args.duration)
            rep = harness.run_alignment(cfg, args.duration)
            print("{:6.1f}  {:<9} {:<11} {:10.3e} {:12.3e}".format(
                lat, kind, rep.final_status, rep.quality[-1], rep.error_deg[-1]))


if __name__ == "__main__":
    main()
