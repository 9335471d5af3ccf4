"""Command-line entry point: ``polarins run | align | scenarios``."""
import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .config import BUILTIN_SCENARIOS, ConfigError, dump_config, load_config, save_config

log = logging.getLogger("polarins")


def parse_args(argv=None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(prog="polarins",
                                     description="Earth-frame vs local-level strapdown navigation runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run mechanizations on a scenario file")
    run.add_argument("--config", required=True, type=Path)
    run.add_argument("--mech", choices=["earth", "llf", "both"], default="both")
    run.add_argument("--out", required=True, type=Path)

    align = sub.add_parser("align", help="run the GNSS-aided coarse alignment")
    align.add_argument("--config", required=True, type=Path)
    align.add_argument("--duration", required=True, type=float, help="alignment span (s)")
    align.add_argument("--out", required=True, type=Path)

    sc = sub.add_parser("scenarios", help="emit the built-in scenario files")
    sc.add_argument("--out", type=Path, help="directory to write into (default: stdout)")

    parser.add_argument("-v", "--verbose", action="store_true")
    return parser.parse_args(argv)


def _cmd_run(args):
    cfg = load_config(args.config)
    scenario = args.config.stem
    paths = []
    for report in harness.run_scenario(cfg, args.mech, scenario):
        paths.append(harness.write_report(report, args.out))
        s = report.summary
        log.info("%s/%s: max %.2f m, final %.2f m, singular at %s", scenario, report.mechanization,
                 s["max_pos_err_m"], s["final_pos_err_m"], s["singular_at_s"])
    harness.write_plot_script(paths, args.out, "{}_errors.gp".format(scenario))


def _cmd_align(args):
    cfg = load_config(args.config)
    scenario = args.config.stem
    try:
        report = harness.run_alignment(cfg, args.duration, scenario)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    harness.write_alignment_report(report, args.out)
    s = report.summary
    log.info("%s alignment: %s, error %s deg, quality %s", scenario, s["status"],
             s["final_att_err_deg"], s["final_quality"])


def _cmd_scenarios(args):
    for name, make in BUILTIN_SCENARIOS.items():
        if args.out is None:
            sys.stdout.write("# {}.yaml\n{}\n".format(name, dump_config(make())))
        else:
            args.out.mkdir(parents=True, exist_ok=True)
            save_config(make(), args.out / (name + ".yaml"))


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    commands = {"run": _cmd_run, "align": _cmd_align, "scenarios": _cmd_scenarios}
    try:
        commands[args.command](args)
    except (ConfigError, OSError) as exc:
        print("error: {}".format(exc), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
