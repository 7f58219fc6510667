import csv
import io
import json
import subprocess
import sys

import pytest

from ccaphoton import cli
from ccaphoton.errors import NumericalError


def _run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sweep_delta_csv(capsys):
    code, out, _ = _run(["sweep", "--var", "delta", "--d", "3", "--omega", "5",
                         "--kx", "pi/8", "--ky", "pi/4", "--count", "5", "--jobs", "1"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 5 and rows[0]["status"] == "ok"
    assert float(rows[0]["delta"]) == -40.0


def test_sweep_two_layer_json(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    code, out, _ = _run(["sweep", "--var", "xdist", "--d", "3", "--omega", "7", "--omega2", "5",
                         "--start", "1", "--stop", "4", "--count", "4", "--delta", "-3",
                         "--format", "json", "--out", str(out_file), "--jobs", "1"], capsys)
    assert code == 0 and out == ""
    data = json.loads(out_file.read_text())
    assert [r["xdist"] for r in data["records"]] == [1, 2, 3, 4]
    assert data["meta"]["spec"]["params"]["layers"][1]["omega"] == 5.0


def test_config_with_override(capsys, tmp_path):
    out_file = tmp_path / "r.json"
    assert cli.main(["sweep", "--count", "3", "--format", "json", "--out", str(out_file),
                     "--jobs", "1"]) == 0
    code, out, _ = _run(["sweep", "--config", str(out_file), "--count", "2", "--format", "csv",
                         "--out", "-", "--jobs", "1"], capsys)
    assert code == 0
    assert len(out.splitlines()) == 3


@pytest.mark.parametrize("argv, needle", [
    (["sweep", "--var", "energy"], "var"),
    (["sweep", "--count", "1"], "count"),
    (["sweep", "--kx", "pie"], "cannot parse"),
    (["dos", "--var", "delta"], "var"),
    (["sweep", "--jobs", "0"], "jobs"),
    (["sweep", "--d", "0"], "params"),
    (["sweep", "--config", "/nonexistent.json"], "cannot read"),
])
def test_invalid_spec_exit_code(argv, needle, capsys):
    code, _, err = _run(argv, capsys)
    assert code == 2
    assert "invalid spec" in err and needle in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["sweep", "--mode", "bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 2


def test_numerical_failure_exit_3(monkeypatch, capsys):
    def boom(spec, jobs):
        raise NumericalError("forced")

    monkeypatch.setattr(cli, "run_sweep", boom)
    code, _, err = _run(["sweep", "--count", "2"], capsys)
    assert code == 3 and "forced" in err


def test_oracle_subcommand(capsys):
    code, out, _ = _run(["oracle", "--format", "json", "--d", "3", "--omega", "7", "--omega2", "5",
                         "--x2", "8", "--start", "-20", "--stop", "20", "--count", "3",
                         "--jobs", "1"], capsys)
    assert code == 0
    data = json.loads(out)
    assert "directional" in data["adjudication"]["matching_modes"]


def test_selfenergy_and_dos(capsys):
    code, out, _ = _run(["selfenergy", "--d", "3", "--count", "3", "--jobs", "1"], capsys)
    assert code == 0 and out.startswith("coskx,status,A_0")
    code, out, _ = _run(["dos", "--d", "2", "--count", "3", "--jobs", "1"], capsys)
    assert code == 0 and out.startswith("energy,status,rho_0,edge_0")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ccaphoton", "sweep", "--count", "2", "--jobs", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.startswith("delta,status,R")
