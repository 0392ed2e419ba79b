"""Command line: ``vexnorm run``, ``vexnorm sweep`` and ``vexnorm selftest``."""
from pathlib import Path
from typing import List, Optional
import argparse
import logging
import sys

from vexnorm import settings
from vexnorm.checks import Experiment, run_checks, sweep_row
from vexnorm.config import SWEEPABLE, ExperimentConfig, load_config
from vexnorm.errors import ArgumentError, VexnormError
from vexnorm.report import find_output_dir, write_run, write_sweep


logger = logging.getLogger("vexnorm")

SELFTEST_CONFIG = Path(__file__).parent / "configs" / "selftest.toml"

INTEGER_PARAMETERS = ("m", "L", "k_max")


def _configure_logging() -> None:
    logging.basicConfig(
        level=settings.log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stdout)],
    )


def _output_dir(requested: Optional[str], config: ExperimentConfig) -> Path:
    if requested:
        return Path(requested)
    if config.output.dir:
        return Path(config.output.dir)
    return find_output_dir()


def run_config(config: ExperimentConfig, config_path: str, out: Optional[str] = None) -> int:
    exp = Experiment(config)
    names = config.checks.run
    if not names:
        logger.info("no checks requested")
    results = run_checks(exp, names)

    parameters = config.model_dump(by_alias=True, exclude={"output", "thresholds"})
    if any(name in ("theorem", "e123") for name in names):
        parameters["space"]["alpha"] = exp.theorem_params.alpha

    out_dir = _output_dir(out, config)
    summary = write_run(out_dir, config_path, config.name, exp.grid.describe(), parameters, results,
                        html=config.output.html)
    logger.info("reports written to '{}'".format(out_dir))

    failed = [check for check in summary["checks"] if not check["passed"]]
    for check in failed:
        for failure in check["failures"]:
            print("FAILED {}: {}".format(check["name"], failure), file=sys.stderr)
    return 1 if failed else 0


def parse_values(parameter: str, raw: str) -> List[float]:
    parts = [part.strip() for part in raw.split(",") if part.strip()]
    if not parts:
        raise ArgumentError("sweep over '{}' needs at least one value".format(parameter))
    try:
        if parameter in INTEGER_PARAMETERS:
            return [int(part) for part in parts]
        return [float(part) for part in parts]
    except ValueError as e:
        raise ArgumentError("bad sweep value for '{}': {}".format(parameter, e)) from e


def cmd_run(args) -> int:
    config = load_config(args.config)
    return run_config(config, args.config, args.out)


def cmd_sweep(args) -> int:
    if args.param not in SWEEPABLE:
        raise ArgumentError("unknown sweep parameter '{}', expected one of {}".format(args.param, sorted(SWEEPABLE)))
    values = parse_values(args.param, args.values)
    config = load_config(args.config)
    rows = []
    for i, value in enumerate(values, start=1):
        logger.info("[{}/{}] {} = {}".format(i, len(values), args.param, value))
        rows.append(sweep_row(config, args.param, value))
    out_dir = _output_dir(args.out, config)
    write_sweep(out_dir, args.config, args.param, values, rows)
    logger.info("sweep written to '{}'".format(out_dir))
    return 0


def cmd_selftest(args) -> int:
    config = load_config(SELFTEST_CONFIG)
    return run_config(config, str(SELFTEST_CONFIG), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vexnorm", description="Variable-exponent norm and fractional integral checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run the checks listed in a config file")
    run.add_argument("config", help="Path to a TOML experiment file")
    run.add_argument("--out", "-o", default=None, help="Output directory (default: ./vexnorm_run_<i>)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="Repeat the commutator ratio experiment over parameter values")
    sweep.add_argument("config", help="Path to a TOML experiment file")
    sweep.add_argument("--param", required=True, help="One of: {}".format(", ".join(SWEEPABLE)))
    sweep.add_argument("--values", required=True, help="Comma separated values, e.g. 0.1,0.2,0.3")
    sweep.add_argument("--out", "-o", default=None, help="Output directory (default: ./vexnorm_run_<i>)")
    sweep.set_defaults(func=cmd_sweep)

    selftest = sub.add_parser("selftest", help="Run every check on the bundled desk-scale config")
    selftest.add_argument("--out", "-o", default=None, help="Output directory (default: ./vexnorm_run_<i>)")
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging()
    try:
        status = args.func(args)
    except VexnormError as e:
        print("error: {}".format(e), file=sys.stderr)
        return 2
    logger.info("<run done>")
    return status


if __name__ == "__main__":
    sys.exit(main())
