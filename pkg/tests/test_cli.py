import json
import math
import subprocess
import sys

import pytest

from mechlab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_uniform_eafp(capsys):
    code, out, _ = run(["solve", "--mech", "eafp"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "EAFP"
    assert rec["price0"] == pytest.approx(0.75)


def test_solve_with_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"F": {"family": "power", "k": 2}, "G": "uniform", "delta": 0.5}))
    code, out, _ = run(["solve", "--mech", "d", "--config", str(cfg)], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["kind"] == "D" and 0 < rec["theta_bar"] < 1


def test_solve_buyer_side(capsys):
    code, out, _ = run(["solve", "--mech", "d", "--side", "buyer", "--delta", "0.5"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["side"] == "buyer"
    assert rec["omega_bar"] == pytest.approx(0.18614, abs=1e-5)


def test_thresholds(capsys):
    code, out, _ = run(["thresholds"], capsys)
    rec = json.loads(out)
    assert rec["delta_star"] == pytest.approx(0.75)
    assert rec["delta_double_star"] == pytest.approx((260 - 8 * math.sqrt(10)) / 279, abs=1e-8)


def test_compare(capsys):
    code, out, _ = run(["compare", "--delta", "0.9"], capsys)
    assert json.loads(out)["best"] == "D"


def test_figure_to_file(tmp_path):
    out = tmp_path / "fig.csv"
    assert cli.main(["figure", "profits", "--delta-grid", "0.1:0.9:5", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,pi_eafp,pi_epo,pi_eao,pi_d"
    assert len(lines) == 6
    assert "\r" not in out.read_text()


def test_appendix_c_flag(capsys):
    code, out, _ = run(["sweep", "--appendix-c", "--delta-grid", "0.2:0.6:3"], capsys)
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli.FIGURE_COLUMNS["appendix-c"])


def test_simulate(capsys):
    code, out, _ = run(["simulate", "--mech", "eao", "--n", "100000", "--seed", "5"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["pass"]
    assert rec["estimate"]["n"] == 100000


@pytest.mark.parametrize("argv, code", [
    (["solve", "--mech", "epo"], cli.EXIT_CONFIG),
    (["solve", "--mech", "d", "--delta", "1.2"], cli.EXIT_CONFIG),
    (["figure", "--delta-grid", "0.5:0.1:3"], cli.EXIT_CONFIG),
    (["simulate", "--mech", "eafp", "--n", "10"], cli.EXIT_CONFIG),
    (["solve", "--mech", "d1", "--delta", "0.5", "--side", "buyer"], cli.EXIT_UNSUPPORTED),
])
def test_exit_codes(argv, code, capsys):
    assert run(argv, capsys)[0] == code


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["solve", "--mech", "eafp", "--config", str(bad)], capsys)[0] == cli.EXIT_CONFIG
    bad.write_text(json.dumps({"F": "uniform", "colour": 1}))
    assert run(["solve", "--mech", "eafp", "--config", str(bad)], capsys)[0] == cli.EXIT_CONFIG
    irregular = tmp_path / "irr.json"
    irregular.write_text(json.dumps({"F": {"family": "power", "k": 0.5}}))
    assert run(["solve", "--mech", "eafp", "--config", str(irregular)], capsys)[0] == cli.EXIT_UNSUPPORTED
    nonuniform = tmp_path / "nu.json"
    nonuniform.write_text(json.dumps({"F": {"family": "power", "k": 2}, "delta": 0.5}))
    assert run(["solve", "--mech", "d2", "--config", str(nonuniform)], capsys)[0] == cli.EXIT_UNSUPPORTED


def test_io_error(tmp_path, capsys):
    target = tmp_path / "missing" / "x.json"
    assert run(["solve", "--mech", "eafp", "--out", str(target)], capsys)[0] == cli.EXIT_IO
    assert run(["solve", "--mech", "eafp", "--config", str(tmp_path / "nope.json")],
               capsys)[0] == cli.EXIT_IO


def test_run_config_round_trip():
    cfg = cli.RunConfig.from_dict({"F": {"family": "power", "k": 3}, "delta_grid":
                                   {"min": 0.1, "max": 0.5, "steps": 3}, "seed": 9})
    again = cli.RunConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert list(again.grid()) == pytest.approx([0.1, 0.3, 0.5])
    with pytest.raises(cli.ConfigError):
        cli.RunConfig.from_dict({"delta": 0.5, "delta_grid": {"min": 0.1, "max": 0.5, "steps": 3}})


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mechlab.cli", "solve", "--mech", "eao"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["kind"] == "EAO"
