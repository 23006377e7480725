import csv
import os

import pytest

from crn_multicast import __version__
from crn_multicast.cli import main
from crn_multicast.experiment import (
    CSV_HEADER,
    DEFAULT_SWEEP_VALUES,
    ConfigError,
    SweepSpec,
    format_csv,
    load_config,
    parse_config,
    read_config,
    result_row,
    run_sweep,
    write_csv,
)
from crn_multicast.params import NetworkParams
from crn_multicast.simulator import RunConfig, run_monte_carlo

SMALL = """
[simulation]
num_trials = 2
num_packets = 5
master_seed = 9
"""


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_empty_config_gives_defaults(tmp_path):
    params, spec = parse_config(write(tmp_path, ""))
    assert params == NetworkParams()
    assert (params.field_side, params.num_nodes, params.num_destinations) == (200, 40, 16)
    assert (params.num_channels, params.bandwidth, params.tx_power, params.packet_bits) == (20, 1e6, 0.1, 32768)
    assert spec == SweepSpec()


def test_missing_file_is_an_io_error(tmp_path):
    with pytest.raises(OSError):
        parse_config(tmp_path / "nope.toml")


@pytest.mark.parametrize(
    "text, path",
    [
        ("[network]\nidle_prob = 1.3\n", "network.idle_prob"),
        ("[network]\nnum_nodes = 'many'\n", "network.num_nodes"),
        ("[network]\nnum_nodes = 2.5\n", "network.num_nodes"),
        ("[network]\ncolour = 3\n", "network.colour"),
        ("[simulation]\nnum_trials = 0\n", "simulation.num_trials"),
        ("[sweep]\nvalues = [4, 2, 1]\n", "sweep.values"),
        ("[sweep]\nvalues = []\n", "sweep.values"),
        ("[sweep]\nparameter = 'gravity'\n", "sweep.parameter"),
        ("[sweep]\nschemes = []\n", "sweep.schemes"),
        ("[sweep]\nschemes = ['FAST']\n", "sweep.schemes"),
        ("[sweep.extreme]\nfixed_mu = 0.07\nfixed_rate = 5e6\n", "sweep.extreme"),
        ("[run]\nscheme = 'XYZ'\n", "run"),
        ("[extras]\n", "extras"),
    ],
)
def test_invalid_values_name_the_key_path(tmp_path, text, path):
    with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
        parse_config(write(tmp_path, text))


def test_sweep_defaults_follow_the_parameter():
    for name, values in DEFAULT_SWEEP_VALUES.items():
        assert SweepSpec(parameter=name).values == values
    _, spec, _ = load_config({"sweep": {"parameter": "num_channels"}})
    assert spec.values == (10, 15, 20, 25, 30)


def test_full_config_round_trip(tmp_path):
    text = SMALL + """
[network]
bandwidth = 2e6
mu_range = [0.01, 0.05]

[run]
scheme = "MDR"
tree = "MST"
metric = "Distance"

[sweep]
parameter = "packet_size"
values = [1024, 2048]
schemes = ["POS", "RS"]
trees = ["SPT", "MST"]

[sweep.extreme]
fixed_rate = 5e6
"""
    params, spec, run = read_config(write(tmp_path, text))
    assert params.bandwidth == 2e6 and params.mu_range == (0.01, 0.05) and params.num_trials == 2
    assert run == RunConfig("MDR", "MST", "Distance")
    assert spec.values == (1024, 2048) and spec.extreme == {"fixed_rate": 5e6}
    assert len(list(spec.configs())) == 4


def test_sweep_grid_size_and_determinism(tmp_path):
    cfg = write(tmp_path, SMALL + "[sweep]\nparameter='idle_prob'\nvalues=[0.2,0.5,0.8]\nschemes=['POS','RS']\n")
    params, spec = parse_config(cfg)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_sweep(params, spec, a) == 0
    assert run_sweep(params, spec, b, workers=3) == 0
    rows = read_rows(a)
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 7
    assert [r[1] for r in rows[1:]] == ["0.2", "0.2", "0.5", "0.5", "0.8", "0.8"]
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().endswith(b"\n")
    for r in rows[1:]:
        assert 0.0 <= float(r[7]) <= 1.0 and float(r[5]) >= 0.0


def test_extreme_override_reaches_the_simulation(tmp_path):
    cfg = write(tmp_path, SMALL + "[sweep]\nvalues=[0.5]\nschemes=['POS','MDR']\n[sweep.extreme]\nfixed_mu=0.07\n")
    params, spec = parse_config(cfg)
    out = tmp_path / "x.csv"
    run_sweep(params, spec, out)
    pos, mdr = read_rows(out)[1:]
    # with one mu on every channel, max-min POS and max-min rate pick the same channels
    assert pos[5:9] == mdr[5:9]


def test_write_csv_shapes(tmp_path):
    empty = tmp_path / "e.csv"
    write_csv([], empty)
    assert empty.read_text() == ",".join(CSV_HEADER) + "\n"
    result = run_monte_carlo(NetworkParams(num_trials=3, num_packets=7), RunConfig())
    one = tmp_path / "one.csv"
    write_csv([result_row("idle_prob", 0.5, result, 2016)], one)
    lines = one.read_text().splitlines()
    assert len(lines) == 2
    row = next(csv.reader([lines[1]]))
    assert float(row[7]) == result.pdr and float(row[5]) == result.throughput
    assert float(row[8]) == result.pdr_stderr


def test_format_csv_header_optional():
    assert format_csv([], header=False) == ""


def test_unwritable_output(tmp_path):
    params, spec = NetworkParams(num_trials=1, num_packets=2), SweepSpec(values=(0.5,), schemes=("POS",))
    with pytest.raises(OSError):
        run_sweep(params, spec, tmp_path / "missing-dir" / "out.csv")


# command line


def test_cli_run_prints_one_row(tmp_path, capsys):
    cfg = write(tmp_path, SMALL)
    assert main(["run", "--config", str(cfg), "--scheme", "MASA", "--header"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    row = next(csv.reader([lines[1]]))
    assert row[:5] == ["", "", "MASA", "SPT", "ETX"] and row[9:] == ["2", "9"]


def test_cli_run_seed_flag_changes_output(capsys):
    main(["run", "--trials", "2", "--seed", "1"])
    a = capsys.readouterr().out
    main(["run", "--trials", "2", "--seed", "1"])
    assert capsys.readouterr().out == a
    main(["run", "--trials", "2", "--seed", "2"])
    assert capsys.readouterr().out != a


def test_cli_sweep_byte_identical_across_workers(tmp_path):
    cfg = write(tmp_path, SMALL + "[sweep]\nparameter='bandwidth'\nvalues=[1e6,2e6]\nschemes=['POS','MASA']\n")
    outs = []
    for i, workers in enumerate(("1", "1", "4")):
        out = tmp_path / f"o{i}.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out), "--workers", workers]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_cli_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "[network]\nidle_prob = 1.3\n")
    assert main(["sweep", "--config", str(bad), "--out", str(tmp_path / "o.csv")]) == 1
    assert "network.idle_prob" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "absent.toml")]) == 2
    good = write(tmp_path, SMALL + "[sweep]\nvalues=[0.5]\nschemes=['POS']\n", "good.toml")
    locked = tmp_path / "locked"
    locked.mkdir()
    os.chmod(locked, 0o500)
    try:
        code = main(["sweep", "--config", str(good), "--out", str(locked / "o.csv")])
    finally:
        os.chmod(locked, 0o700)
    if os.geteuid() != 0:  # root ignores directory permissions
        assert code == 2
    assert main(["sweep", "--config", str(good), "--out", str(tmp_path)]) == 2


def test_cli_help_lists_every_key_with_default(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    defaults = NetworkParams()
    for key in ("field_side", "num_nodes", "num_destinations", "num_channels", "bandwidth", "idle_prob"):
        assert f"network.{key} = {getattr(defaults, key)!r}" in text
    for key in ("num_packets", "num_trials", "master_seed"):
        assert f"simulation.{key} = {getattr(defaults, key)!r}" in text
    for key in ("run.scheme", "run.tree", "run.metric", "sweep.parameter", "sweep.values", "sweep.extreme"):
        assert key in text


def test_cli_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out
