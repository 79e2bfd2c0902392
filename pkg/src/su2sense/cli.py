"""Command-line interface.

One subcommand per scenario plus `fit` for power-law exponents.  Exit
status: 0 = ran and passed embedded checks, 1 = ran but a check failed,
2 = usage or configuration error.
"""

import argparse
import json
import sys

import numpy as np

from .config import ConfigError, SCENARIO_DEFAULTS, load_scenario_config
from .experiments import run_scenario, scaling_fit

SCENARIOS = tuple(SCENARIO_DEFAULTS)


def _add_common(sub):
    sub.add_argument("--out", default=".", help="output directory (default: cwd)")
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a single config key (repeatable)",
    )
    sub.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="su2sense",
        description="Rotation-sensing interferometer simulations: "
        "QFI sweeps, state distributions and dynamics validation.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in SCENARIOS:
        sub = subparsers.add_parser(name, help=f"run the {name} scenario")
        _add_common(sub)
    fit = subparsers.add_parser("fit", help="fit a power-law exponent to a data file")
    fit.add_argument("datafile")
    fit.add_argument("--x-col", type=int, default=0, help="x column index (default 0)")
    fit.add_argument("--y-col", type=int, default=1, help="y column index (default 1)")
    fit.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"),
                     required=True, help="fit window on the x axis")
    return parser


def _parse_overrides(pairs):
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        out[key.strip()] = value.strip()
    return out


def _run_fit(args):
    data = np.loadtxt(args.datafile)
    if data.ndim == 1:
        data = data[None, :]
    x = data[:, args.x_col]
    y = data[:, args.y_col]
    exponent, intercept, r2 = scaling_fit(x, y, tuple(args.window))
    print(json.dumps(
        {"exponent": exponent, "intercept": intercept, "r_squared": r2},
        sort_keys=True,
    ))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fit":
            return _run_fit(args)
        config = load_scenario_config(
            args.command,
            config_file=args.config,
            overrides=_parse_overrides(args.overrides),
            output_dir=args.out,
            jobs=args.jobs,
        )
        report = run_scenario(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, MemoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in report.files:
        print(f"wrote {path}")
    for key, value in report.checks.items():
        if not isinstance(value, dict):
            print(f"check {key}: {value}")
    if not report.passed:
        print("embedded checks FAILED", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
