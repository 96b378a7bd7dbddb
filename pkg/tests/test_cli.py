import csv
import io
import json
import math
import shutil
import subprocess
import sys

import pytest

from heavytail_ineq.cli import SCHEMA_LINE, main, parse_sweep
from heavytail_ineq.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    lines = text.splitlines()
    assert lines[0] == SCHEMA_LINE
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_sweep_parsing():
    assert len(parse_sweep("0.6:4:0.1")) == 35
    assert parse_sweep("0.6:4:0.1")[-1] == 4.0
    assert parse_sweep("1,2.5") == [1.0, 2.5]
    for bad in ("1:0:0.1", "1:2", "a,b", "1:2:0", "nan"):
        with pytest.raises(ConfigError):
            parse_sweep(bad)


def test_constants_sweep(capsys):
    code, out, _ = run(capsys, "constants", "--chernoff-rho", "--beta", "0.6:4:0.1")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 35
    assert list(rows[0]) == ["beta", "value", "branch"]
    assert float(rows[4]["beta"]) == 1.0 and float(rows[4]["value"]) == 0.25


def test_constants_print_round_trip_floats(capsys):
    _, out, _ = run(capsys, "constants", "--lsi-rho-cauchy", "--beta", "2.4", "--alpha", "1.2")
    from heavytail_ineq.constants import lsi_rho_cauchy
    assert float(rows_of(out)[0]["value"]) == lsi_rho_cauchy(2.4, 1.2).value


def test_constants_json(capsys):
    code, out, _ = run(capsys, "constants", "--chernoff-gamma", "--kappa", "2,3", "--format", "json")
    assert code == 0
    assert [r["value"] for r in json.loads(out)] == [1.0, 2.0]


@pytest.mark.parametrize("argv", [
    ["constants", "--chernoff-rho", "--beta", "0.2:1:0.1"],
    ["constants", "--chernoff-rho"],
    ["constants", "--beta", "2"],
    ["constants", "--chernoff-rho", "--chernoff-gamma", "--beta", "2", "--kappa", "2"],
    ["verify", "--catalog", "NOPE", "--beta", "2"],
    ["verify", "--catalog", "CHERNOFF_CAUCHY", "--beta", "0.3"],
    ["verify", "--catalog", "CHERNOFF_CAUCHY", "--beta", "2", "--corpus", "nope"],
    ["spectral", "--beta", "0.4"],
    ["evolve", "--model", "invgamma", "--beta", "2"],
    ["evolve", "--model", "ou", "--preset", "spike"],
    ["frobnicate"],
])
def test_bad_configuration_exits_2(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 2
    assert out == ""


def test_invalid_sweep_writes_nothing(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, _, _ = run(capsys, "constants", "--chernoff-rho", "--beta", "0.2:3:0.1", "--out", str(target))
    assert code == 2
    assert not target.exists()


def test_verify_chernoff_cauchy(capsys):
    code, out, err = run(capsys, "verify", "--catalog", "CHERNOFF_CAUCHY", "--beta", "2.5", "--corpus", "default")
    assert code == 0
    rows = rows_of(out)
    assert rows and all(r["verdict"] == "PASS" for r in rows)
    linear = [r for r in rows if r["fn_id"] == "x"]
    assert len(linear) == 1 and abs(float(linear[0]["slack"])) < 1e-8
    assert "FAIL=0" in err


def test_verify_is_byte_reproducible(capsys):
    argv = ["verify", "--catalog", "LSI_CAUCHY,WIRTINGER_GBETA", "--jobs", "3"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, serial, _ = run(capsys, *argv[:-2])
    assert first == second == serial


def test_spectral(capsys):
    code, out, _ = run(capsys, "spectral", "--beta", "2.5", "--n", "512")
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["lambda1"]) == pytest.approx(3.0, rel=0.02)
    assert float(row["rho_paper"]) == 3.0


def test_evolve_invgamma(tmp_path, capsys):
    manifest = tmp_path / "run.json"
    snaps = tmp_path / "snaps.csv"
    code, out, _ = run(capsys, "evolve", "--model", "invgamma", "--alpha", "1.5", "--beta", "2", "--m", "1",
                       "--preset", "bump", "--manifest-out", str(manifest), "--snapshots-out", str(snaps),
                       "--snapshot-stride", "600")
    assert code == 0
    trace = rows_of(out)
    assert float(trace[0]["t"]) == 0.0
    info = json.loads(manifest.read_text())
    assert info["fitted_rate"] >= 0.95
    assert all(info["checks"].values())
    assert rows_of(snaps.read_text())


def test_report(capsys):
    code, out, _ = run(capsys, "report")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 15
    assert all(r["FAIL"] == "0" and r["ERROR"] == "0" for r in rows)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "heavytail_ineq", "constants", "--bobkov-ledoux", "--beta", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.splitlines()[-1].startswith("3,0.5")


@pytest.mark.skipif(shutil.which("heavytail-ineq") is None, reason="console script not on PATH")
def test_console_script():
    res = subprocess.run(["heavytail-ineq", "constants", "--wirtinger-d", "--beta", "1", "--m", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    value = float(res.stdout.splitlines()[-1].split(",")[2])
    assert value == pytest.approx(2 / math.log(2), abs=1e-10)
