"""Experiment configuration files, parameter sweeps and CSV output.

Configuration is TOML::

    [network]          # any NetworkParams physical field
    idle_prob = 0.5
    mu_range = [0.002, 0.070]

    [simulation]
    num_packets = 100
    num_trials = 200
    master_seed = 2016

    [run]              # used by the ``run`` command
    scheme = "POS"
    tree = "SPT"
    metric = "ETX"

    [sweep]
    parameter = "bandwidth"
    values = [1e6, 2e6, 3e6, 4e6]
    schemes = ["POS", "MASA", "MDR", "RS"]
    trees = ["SPT"]
    metrics = ["ETX"]

    [sweep.extreme]    # at most one of these
    fixed_mu = 0.070   # or fixed_rate = 5e6

Every key is optional; unknown keys are rejected.
"""

from __future__ import annotations

import csv
import dataclasses
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .channels import Scheme
from .params import NetworkParams, ParameterError
from .simulator import RunConfig, SimResult, run_monte_carlo
from .trees import EdgeMetric, TreeKind


class ConfigError(ValueError):
    """Invalid configuration value; the message starts with the key path."""


NETWORK_KEYS = (
    "field_side",
    "num_nodes",
    "num_destinations",
    "num_channels",
    "bandwidth",
    "tx_power",
    "packet_bits",
    "noise_density",
    "path_loss_exp",
    "wavelength",
    "tx_range",
    "idle_prob",
    "mu_range",
    "fixed_rate_override",
    "fixed_mu_override",
)
SIMULATION_KEYS = ("num_packets", "num_trials", "master_seed")
INT_FIELDS = {"num_nodes", "num_destinations", "num_channels", "packet_bits"} | set(SIMULATION_KEYS)

# sweep dimension -> NetworkParams field
SWEEP_FIELDS = {
    "bandwidth": "bandwidth",
    "packet_size": "packet_bits",
    "num_channels": "num_channels",
    "tx_power": "tx_power",
    "num_nodes": "num_nodes",
    "num_destinations": "num_destinations",
    "tx_range": "tx_range",
    "field_side": "field_side",
    "idle_prob": "idle_prob",
}
# axis used when [sweep] names a parameter but no values
DEFAULT_SWEEP_VALUES = {
    "bandwidth": (1e6, 2e6, 3e6, 4e6),
    "packet_size": (8192, 16384, 32768, 65536, 131072),
    "num_channels": (10, 15, 20, 25, 30),
    "tx_power": (0.05, 0.1, 0.2, 0.4),
    "num_nodes": (20, 40, 60, 80, 100),
    "num_destinations": (4, 8, 12, 16, 20, 24),
    "tx_range": (60, 80, 100, 120, 140),
    "field_side": (100, 150, 200, 250, 300),
    "idle_prob": (0.1, 0.3, 0.5, 0.7, 0.9),
}
EXTREME_FIELDS = {"fixed_rate": "fixed_rate_override", "fixed_mu": "fixed_mu_override"}

CSV_HEADER = (
    "param",
    "value",
    "scheme",
    "tree",
    "metric",
    "throughput_bps",
    "throughput_stderr",
    "pdr",
    "pdr_stderr",
    "trials",
    "master_seed",
)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "idle_prob"
    values: Optional[tuple] = None  # None: DEFAULT_SWEEP_VALUES[parameter]
    schemes: tuple = tuple(Scheme)
    trees: tuple = (TreeKind.SPT,)
    metrics: tuple = (EdgeMetric.ETX,)
    extreme: Optional[dict] = None

    def __post_init__(self):
        if self.parameter not in SWEEP_FIELDS:
            raise ConfigError(f"sweep.parameter: unknown sweep dimension {self.parameter!r}")
        values = tuple(DEFAULT_SWEEP_VALUES[self.parameter] if self.values is None else self.values)
        if not values:
            raise ConfigError("sweep.values: must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep.values: must be strictly increasing")
        object.__setattr__(self, "values", values)
        for key, enum in (("schemes", Scheme), ("trees", TreeKind), ("metrics", EdgeMetric)):
            items = tuple(getattr(self, key))
            if not items:
                raise ConfigError(f"sweep.{key}: select at least one")
            try:
                items = tuple(enum(v) for v in items)
            except ValueError as exc:
                raise ConfigError(f"sweep.{key}: {exc}") from None
            object.__setattr__(self, key, items)
        if self.extreme:
            if len(self.extreme) != 1:
                raise ConfigError("sweep.extreme: set at most one of fixed_rate, fixed_mu")
            for k, v in self.extreme.items():
                if k not in EXTREME_FIELDS:
                    raise ConfigError(f"sweep.extreme.{k}: unknown key")
                if not _is_number(v) or v <= 0:
                    raise ConfigError(f"sweep.extreme.{k}: must be a positive number")

    def configs(self):
        for tree in self.trees:
            for metric in self.metrics:
                for scheme in self.schemes:
                    yield RunConfig(scheme, tree, metric)


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(path: str, name: str, value):
    if name == "mu_range":
        if not isinstance(value, list) or len(value) != 2 or not all(map(_is_number, value)):
            raise ConfigError(f"{path}: expected [low, high]")
        return tuple(float(v) for v in value)
    if not _is_number(value):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if name in INT_FIELDS:
        if float(value) != int(value):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _check_keys(section: dict, allowed, prefix: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}: unknown key")


def load_config(data: dict):
    """Build ``(NetworkParams, SweepSpec, RunConfig)`` from a parsed TOML mapping."""
    _check_keys(data, ("network", "simulation", "run", "sweep"), "")
    overrides = {}
    for section, keys in (("network", NETWORK_KEYS), ("simulation", SIMULATION_KEYS)):
        body = data.get(section, {})
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: expected a table")
        _check_keys(body, keys, f"{section}.")
        for k, v in body.items():
            overrides[k] = (f"{section}.{k}", _coerce(f"{section}.{k}", k, v))
    try:
        params = NetworkParams(**{k: v for k, (_, v) in overrides.items()})
    except ParameterError as exc:
        name = str(exc).split(":", 1)[0]
        path = overrides.get(name, (name,))[0]
        raise ConfigError(f"{path}: {exc}") from None

    run = data.get("run", {})
    _check_keys(run, ("scheme", "tree", "metric"), "run.")
    try:
        run_config = RunConfig(**run)
    except ValueError as exc:
        raise ConfigError(f"run: {exc}") from None

    sweep = dict(data.get("sweep", {}))
    _check_keys(sweep, [f.name for f in dataclasses.fields(SweepSpec)], "sweep.")
    if "values" in sweep:
        if not isinstance(sweep["values"], list) or not all(map(_is_number, sweep["values"])):
            raise ConfigError("sweep.values: expected a list of numbers")
    if "extreme" in sweep and not isinstance(sweep["extreme"], dict):
        raise ConfigError("sweep.extreme: expected a table")
    spec = SweepSpec(**sweep)
    return params, spec, run_config


def read_config(path):
    """``(NetworkParams, SweepSpec, RunConfig)`` from a TOML file; ``None`` means all defaults.

    A missing file raises ``OSError``; bad content raises ``ConfigError``.
    """
    if path is None:
        return load_config({})
    raw = Path(path).read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8")) if raw.strip() else {}
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return load_config(data)


def parse_config(path):
    params, spec, _ = read_config(path)
    return params, spec


def apply_point(params: NetworkParams, spec: SweepSpec, value) -> NetworkParams:
    name = SWEEP_FIELDS[spec.parameter]
    value = _coerce("sweep.values", name, value)
    changes = {name: value}
    for k, v in (spec.extreme or {}).items():
        changes[EXTREME_FIELDS[k]] = float(v)
    try:
        return params.replace(**changes)
    except ParameterError as exc:
        raise ConfigError(f"sweep.values: {spec.parameter}={value!r}: {exc}") from None


def result_row(param: str, value, result: SimResult, master_seed: int) -> list:
    return [
        param,
        "" if value is None else repr(value),
        result.scheme.value,
        result.tree_kind.value,
        result.metric_kind.value,
        repr(float(result.throughput)),
        repr(float(result.throughput_stderr)),
        repr(float(result.pdr)),
        repr(float(result.pdr_stderr)),
        str(result.trials),
        str(master_seed),
    ]


def format_csv(rows, header: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return buf.getvalue()


def write_csv(rows, path) -> None:
    Path(path).write_text(format_csv(rows), encoding="utf-8", newline="")


def sweep_rows(params: NetworkParams, spec: SweepSpec, workers: int = 1) -> list:
    """Full (value x tree x metric x scheme) grid, in that order."""
    rows = []
    for value in spec.values:
        point = apply_point(params, spec, value)
        for config in spec.configs():
            result = run_monte_carlo(point, config, workers=workers)
            rows.append(result_row(spec.parameter, value, result, params.master_seed))
    return rows


def run_sweep(params: NetworkParams, spec: SweepSpec, output_path, workers: int = 1) -> int:
    out = Path(output_path)
    # fail before the (long) computation if the destination is unwritable
    with open(out, "a", encoding="utf-8"):
        pass
    write_csv(sweep_rows(params, spec, workers=workers), out)
    return 0
