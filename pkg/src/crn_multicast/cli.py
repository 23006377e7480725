"""Command-line entry point: ``crn-multicast run|sweep``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import __version__
from .channels import Scheme
from .experiment import (
    DEFAULT_SWEEP_VALUES,
    NETWORK_KEYS,
    SIMULATION_KEYS,
    ConfigError,
    SweepSpec,
    format_csv,
    parse_config,
    read_config,
    result_row,
    run_sweep,
)
from .params import NetworkParams, ParameterError
from .simulator import RunConfig, run_monte_carlo
from .trees import EdgeMetric, TreeKind

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 1, 2


def _config_key_listing() -> str:
    defaults = NetworkParams()
    lines = ["config keys (TOML) and defaults:"]
    for section, keys in (("network", NETWORK_KEYS), ("simulation", SIMULATION_KEYS)):
        for k in keys:
            lines.append(f"  {section}.{k} = {getattr(defaults, k)!r}")
    run = RunConfig()
    lines += [
        f"  run.scheme = {run.scheme.value!r}  (one of {', '.join(s.value for s in Scheme)})",
        f"  run.tree = {run.tree.value!r}  (SPT, MST)",
        f"  run.metric = {run.metric.value!r}  (ETX, Distance)",
    ]
    spec = SweepSpec()
    for f in dataclasses.fields(SweepSpec):
        v = getattr(spec, f.name)
        if isinstance(v, tuple):
            v = [getattr(x, "value", x) for x in v]
        lines.append(f"  sweep.{f.name} = {v!r}")
    lines.append("  sweep.extreme.fixed_rate | sweep.extreme.fixed_mu  (optional)")
    lines.append("default sweep.values per sweep.parameter:")
    for name, values in DEFAULT_SWEEP_VALUES.items():
        lines.append(f"  {name}: {list(values)!r}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crn-multicast",
        description="Monte-Carlo multicast routing in cognitive radio networks.",
        epilog=_config_key_listing(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one configuration, print one CSV row")
    run.add_argument("--config", help="TOML config file (defaults if omitted)")
    run.add_argument("--scheme", choices=[s.value for s in Scheme])
    run.add_argument("--tree", choices=[t.value for t in TreeKind])
    run.add_argument("--metric", choices=[m.value for m in EdgeMetric])
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--trials", type=int)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--header", action="store_true", help="also print the CSV header")

    sweep = sub.add_parser("sweep", help="run a parameter sweep into a CSV file")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--seed", type=int, help="master seed")
    sweep.add_argument("--workers", type=int, default=1)
    return parser


def _cmd_run(args) -> int:
    params, _, config = read_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["num_trials"] = args.trials
    params = params.replace(**changes)
    config = RunConfig(
        args.scheme or config.scheme, args.tree or config.tree, args.metric or config.metric
    )
    result = run_monte_carlo(params, config, workers=args.workers)
    row = result_row("", None, result, params.master_seed)
    sys.stdout.write(format_csv([row], header=args.header))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    params, spec = parse_config(args.config)
    if args.seed is not None:
        params = params.replace(master_seed=args.seed)
    return run_sweep(params, spec, args.out, workers=args.workers)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_sweep(args)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
