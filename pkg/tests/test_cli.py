import json
import subprocess
import sys

import pytest

from axilift.cli import main


def _run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, out


def _manifest(out):
    return [json.loads(line) for line in (out / "manifest.jsonl").read_text().splitlines()]


def test_exponents_one_row(tmp_path):
    code, out = _run(tmp_path, "exponents", "--alpha", "0.8")
    assert code == 0
    lines = (out / "exponents.csv").read_text().splitlines()
    assert lines[0].startswith("alpha,lambda_hardy,gain_delta") and len(lines) == 2
    assert lines[1].endswith(",true")
    man, status = _manifest(out)
    assert man["subcommand"] == "exponents" and man["rng"] == "numpy.random.PCG64"
    assert status["status"] == "ok"


def test_quartic_bad_alpha_exit_1(tmp_path, capsys):
    code, out = _run(tmp_path, "quartic", "--alpha", "1.5")
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "domain-error" and err["status"] == "error"
    assert _manifest(out)[-1]["status"] == "error"


def test_unknown_subcommand_exit_2():
    proc = subprocess.run([sys.executable, "-m", "axilift", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2


def test_friedrichs_summary(tmp_path):
    code, out = _run(tmp_path, "friedrichs", "--nr", "64", "--nz", "64", "--tol", "1e-8")
    assert code == 0
    header, row = (out / "summary.csv").read_text().splitlines()
    mu1 = float(row.split(",")[header.split(",").index("mu1")])
    assert mu1 >= 2.4


def test_solve_writes_field_and_report(tmp_path):
    code, out = _run(tmp_path, "solve", "--nr", "16", "--nz", "16")
    assert code == 0
    lines = (out / "solution.csv").read_text().splitlines()
    assert lines[0].startswith("# grid") and lines[1] == "r,z,value" and len(lines) == 2 + 256
    rep = json.loads((out / "report.jsonl").read_text())
    assert rep["final_residual"] <= 1e-10


def test_solve_from_file(tmp_path):
    _, first = _run(tmp_path, "solve", "--nr", "8", "--nz", "8", name="a")
    code, out = _run(tmp_path, "solve", "--nr", "8", "--nz", "8", "--rhs", "file",
                     "--rhs-file", str(first / "solution.csv"), name="b")
    assert code == 0
    code, _ = _run(tmp_path, "solve", "--nr", "9", "--nz", "8", "--rhs", "file",
                   "--rhs-file", str(first / "solution.csv"), name="c")
    assert code == 1
    code, _ = _run(tmp_path, "solve", "--rhs", "file", name="d")
    assert code == 1
    code, _ = _run(tmp_path, "solve", "--rhs", "file", "--rhs-file", str(tmp_path / "missing.csv"), name="e")
    assert code == 1


def test_determinism(tmp_path):
    args = ("hardy", "--nr", "12", "--nz", "12", "--dt", "0.05", "--samples", "3", "--seed", "5")
    _, a = _run(tmp_path, *args, name="a")
    _, b = _run(tmp_path, *args, name="b")
    assert (a / "hardy.csv").read_bytes() == (b / "hardy.csv").read_bytes()
    assert (a / "manifest.jsonl").read_bytes() == (b / "manifest.jsonl").read_bytes()


def test_jobs_do_not_change_output(tmp_path, monkeypatch):
    args = ("multiplier", "--nr", "16", "--nz", "16", "--samples", "4")
    _, a = _run(tmp_path, *args, "--jobs", "1", name="a")
    _, b = _run(tmp_path, *args, "--jobs", "3", name="b")
    monkeypatch.setenv("AXILIFT_JOBS", "2")
    _, c = _run(tmp_path, *args, name="c")
    ref = (a / "multiplier.csv").read_bytes()
    assert (b / "multiplier.csv").read_bytes() == ref == (c / "multiplier.csv").read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# sweep\nalpha = 0.9\nrho-max-exp = 7\n")
    code, out = _run(tmp_path, "quartic", "--config", str(conf), "--rho-max-exp", "8")
    assert code == 0
    cfg = _manifest(out)[0]["config"]
    assert cfg["alpha"] == 0.9 and cfg["rho_max_exp"] == 8
    bad = tmp_path / "bad.conf"
    bad.write_text("nonsense = 1\n")
    with pytest.raises(SystemExit) as info:
        main(["quartic", "--config", str(bad), "--out", str(tmp_path / "x")])
    assert info.value.code == 2


def test_series_csv_footer(tmp_path):
    code, out = _run(tmp_path, "capacity")
    assert code == 0
    text = (out / "capacity_mass.csv").read_text()
    assert text.endswith("\n")
    lines = text.splitlines()
    assert lines[0] == "param,value,log_param,log_value"
    assert lines[-1].startswith("slope,") and len(lines) == 1 + 7 + 1
    assert abs(float(lines[-1].split(",")[1]) - 4.0) < 0.1


@pytest.mark.parametrize("argv", [["morrey", "--threshold", "--r0-ladder", "4"],
                                  ["degiorgi", "--phase", "--y0-points", "11"],
                                  ["sobolev", "--nr", "32", "--nz", "32", "--dt", "0.0078125"]])
def test_other_subcommands(tmp_path, argv):
    code, out = _run(tmp_path, *argv)
    assert code == 0
    assert _manifest(out)[-1]["status"] == "ok"


def test_degiorgi_phase_csv(tmp_path):
    code, out = _run(tmp_path, "degiorgi", "--phase", "--y0-points", "9", "--K-list", "1",
                     "--phi-list", "0,1e-6", "--R-list", "1")
    lines = (out / "phase.csv").read_text().splitlines()
    assert lines[0] == "y0,K,phi_r,R,verdict,steps" and len(lines) == 1 + 9 * 2
