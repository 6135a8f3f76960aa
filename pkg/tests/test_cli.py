import subprocess
import sys

import numpy as np
import pytest

from kgeckart.cli import build_parser, main

from conftest import CONFIGS, FIXTURE_FAMILY, FIXTURES, config_name


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


@pytest.mark.parametrize("spec", FIXTURE_FAMILY)
def test_spectrum_matches_regression_fixture(spec, capsys):
    name = config_name(spec)
    code, out, _ = run(capsys, "spectrum", CONFIGS / f"{name}.ini")
    assert code == 0
    assert out == (FIXTURES / "spectrum" / f"{name}.csv").read_text(encoding="utf-8")


def test_spectrum_repulsive(capsys):
    code, out, _ = run(capsys, "spectrum", CONFIGS / "repulsive.ini")
    assert code == 0
    header, rows = _table(out)
    assert header == ["n", "E_n", "lambda_n", "delta_n", "p", "w", "residual", "iterations"]
    assert rows == []
    assert out.rstrip().endswith("# 0 bound states")


def test_output_file_and_line_endings(tmp_path, capsys):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "spectrum", CONFIGS / "v1m2_v20.ini", "--output", target)
    assert code == 0 and out == ""
    data = target.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    assert data.decode() == (FIXTURES / "spectrum" / "v1m2_v20.csv").read_text()


def test_seventeen_significant_digits(capsys):
    _, out, _ = run(capsys, "spectrum", CONFIGS / "v1m2_v20.ini")
    _, rows = _table(out)
    e0 = rows[0]["E_n"]
    assert float(e0) == float(f"{float(e0):.17g}")
    assert len(e0.lstrip("-0.").replace(".", "")) >= 16


@pytest.mark.parametrize("name, code", [
    ("err_malformed", 2), ("err_missing_mass", 2), ("err_unknown_key", 2), ("err_negative_alpha", 2),
    ("err_nonfinite", 2), ("err_noconvergence", 3),
])
def test_exit_codes(name, code, capsys):
    got, out, err = run(capsys, "spectrum", CONFIGS / f"{name}.ini")
    assert got == code
    assert out == "" and err.strip()


def test_missing_config_file(capsys, tmp_path):
    code, out, _ = run(capsys, "spectrum", tmp_path / "nope.ini")
    assert code == 2 and out == ""


def test_wavefunction_missing_level(capsys):
    code, out, err = run(capsys, "wavefunction", CONFIGS / "v1m2_v20.ini", "--level", 3)
    assert code == 4 and out == "" and "not bound" in err


def test_wavefunction_ground_state(capsys):
    code, out, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20p5.ini", "--level", 0, "--no-oracle")
    assert code == 0
    assert "# node_count = 0" in out
    header, rows = _table(out)
    assert header == ["r", "amplitude"] and len(rows) == 4001


def test_wavefunction_matches_oracle(capsys):
    code, out, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20.ini", "--level", 1)
    assert code == 0
    meta = dict(ln[2:].split(" = ", 1) for ln in out.splitlines() if ln.startswith("# ") and " = " in ln)
    assert meta["node_count"] == "1"
    assert float(meta["oracle_max_abs_difference"]) < float(meta["oracle_tolerance"]) == 1e-4
    assert meta["oracle_match"] == "pass"


def test_wavefunction_grid_override(capsys):
    code, out, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20.ini", "--level", 0, "--no-oracle",
                       "--grid", "n_points=801", "--grid", "r_max_factor=20")
    assert code == 0
    assert "# n_points = 801" in out and "# r_max = 20" in out
    assert len(_table(out)[1]) == 801
    code, _, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20.ini", "--level", 0, "--grid", "n_points=800")
    assert code == 2
    code, _, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20.ini", "--level", 0, "--grid", "bogus=1")
    assert code == 2


def test_wavefunction_half_line(capsys):
    code, out, _ = run(capsys, "wavefunction", CONFIGS / "v1m2_v20p5.ini", "--level", 0, "--domain", "half")
    assert code == 0
    assert "# domain_mode = half" in out and "oracle_comparison = skipped" in out


def test_verify_fixture_passes(capsys):
    code, out, _ = run(capsys, "verify", CONFIGS / "v1m2_v20p25.ini")
    assert code == 0
    header, rows = _table(out)
    assert header == ["n", "E_analytic", "E_oracle", "rel_diff", "status"]
    assert [r["status"] for r in rows] == ["pass", "pass"]
    assert "# all 2 levels pass" in out


def test_verify_tolerance_below_floor(capsys):
    code, out, _ = run(capsys, "verify", CONFIGS / "v1m2_v20.ini", "--rtol", "1e-15")
    assert code == 5
    assert "fail" in out


def test_verify_repulsive(capsys):
    code, out, _ = run(capsys, "verify", CONFIGS / "repulsive.ini")
    assert code == 0 and "0 levels, vacuously pass" in out


def test_verify_half_line_reports_mismatch(capsys):
    code, out, _ = run(capsys, "verify", CONFIGS / "v1m2_v20p5.ini", "--domain", "half")
    assert code == 5


def test_sweep_depth_monotone(capsys):
    code, out, _ = run(capsys, "sweep", CONFIGS / "v1m2_v20.ini", "--param", "v1", "--from", "-0.1",
                       "--to", "-10", "--steps", "20", "--jobs", "4")
    assert code == 0
    header, rows = _table(out)
    assert header == ["param_value", "n", "E_n"]
    values = np.linspace(-0.1, -10, 20)
    counts = [sum(1 for r in rows if float(r["param_value"]) == v) for v in values]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert counts[-1] > counts[0]


def test_sweep_v2_symmetry(capsys):
    code, out, _ = run(capsys, "sweep", CONFIGS / "v1m5_v20.ini", "--param", "v2", "--from", "-0.5",
                       "--to", "0.5", "--steps", "11", "--jobs", "3")
    assert code == 0
    _, rows = _table(out)
    values = sorted({float(r["param_value"]) for r in rows})
    assert len(values) == 11
    by_point = {v: [float(r["E_n"]) for r in rows if float(r["param_value"]) == v] for v in values}
    # paired rows: the i-th and the mirrored sweep point
    for v, w in zip(values, reversed(values)):
        assert abs(v + w) < 1e-15
        assert len(by_point[v]) == len(by_point[w])
        assert np.allclose(by_point[v], by_point[w], rtol=0, atol=1e-10)


def test_sweep_ordering_independent_of_jobs(capsys):
    args = ["sweep", CONFIGS / "v1m2_v20.ini", "--param", "alpha", "--from", "0.5", "--to", "2", "--steps", "7"]
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "6")
    assert serial == parallel


@pytest.mark.parametrize("extra", [["--steps", "0"], ["--steps", "5", "--param", "beta"]])
def test_sweep_errors(extra, capsys):
    argv = ["sweep", CONFIGS / "v1m2_v20.ini", "--from", "0.1", "--to", "1"]
    if "--param" not in extra:
        argv += ["--param", "v1"]
    code, out, _ = run(capsys, *argv, *extra)
    assert code == 2 and out == ""


def test_sweep_invalid_point(capsys):
    code, _, _ = run(capsys, "sweep", CONFIGS / "v1m2_v20.ini", "--param", "alpha", "--from", "-1",
                     "--to", "1", "--steps", "3")
    assert code == 2


def test_help_documents_exit_codes():
    text = build_parser().format_help()
    for code in ("0", "2", "3", "4", "5"):
        assert f"  {code}  " in text


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "kgeckart.cli", "spectrum", str(CONFIGS / "v1m0p5_v20.ini")],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == (FIXTURES / "spectrum" / "v1m0p5_v20.csv").read_text()
