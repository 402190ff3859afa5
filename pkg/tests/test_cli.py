import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from fractafold_spectra import cli
from fractafold_spectra import tree_harmonics as th


def run(tmp_path, *args):
    return cli.main(list(args) + ["--out", str(tmp_path), "--workers", "2"])


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_parse_cutoff():
    assert cli.parse_cutoff("4") == (4, 4)
    assert cli.parse_cutoff("2,5") == (2, 5)
    for bad in ("", ",", "a", "1,2,3", "-1"):
        with pytest.raises(Exception):
            cli.parse_cutoff(bad)


def test_empty_cutoff_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(tmp_path, "spectrum", "--cutoff", "")
    assert exc.value.code != 0


def test_bad_workers_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--workers", "0", "--out", str(tmp_path)])
    assert exc.value.code != 0


def test_spectrum_tree(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "tree", "--cutoff", "4") == 0
    rep = json.loads((tmp_path / "tree_spectrum.json").read_text())
    assert rep["cutoff"] == [4, 4]
    bands = read_csv(tmp_path / "tree_bands.csv")
    assert len(bands) == len(rep["bands"]) == 1 + 1 + 2 + 4 + 8
    # the tree band starts above 0, so every preimage band does too
    assert min(float(b["lower"]) for b in bands) > 0.0
    points = read_csv(tmp_path / "tree_points.csv")
    assert {"Sigma_inf", "Sigma_inf_prime"} & {p["series"] for p in points}


def test_spectrum_honeycomb_bloch_csv(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "honeycomb", "--cutoff", "1", "--grid", "8") == 0
    rows = read_csv(tmp_path / "honeycomb_bloch.csv")
    assert len(rows) == 64
    for r in rows:
        assert float(r["lambda_plus"]) <= 3.0 <= float(r["lambda_minus"])


def test_spectrum_triangular_field(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "triangular-field", "--cutoff", "0,1") == 0
    rep = json.loads((tmp_path / "triangular_field.json").read_text())
    np.testing.assert_allclose(rep["sigma0_computed"], [0.0, 6.0], atol=1e-10)


def test_verify_default_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(a, "verify") == 0
    out = capsys.readouterr().out
    assert run(b, "verify") == 0
    assert (a / "verify_report.json").read_bytes() == (b / "verify_report.json").read_bytes()
    report = json.loads(out)
    assert {r["suite"] for r in report} == {"k4", "decimation"}
    assert all(r["status"] == "pass" for r in report)


def test_verify_hex_e6(tmp_path, capsys):
    assert run(tmp_path, "verify", "--suite", "hex-e6", "--suite", "ladder") == 0
    report = json.loads(capsys.readouterr().out)
    assert [r["suite"] for r in report][:3] == ["hex-e6"] * 3


def test_verify_unknown_suite(tmp_path):
    assert run(tmp_path, "verify", "--suite", "nope") == 2


def test_kernel_tree_measure(tmp_path, capsys):
    assert run(tmp_path, "kernel", "--model", "tree", "--lam", "2.5,3", "--grid", "400") == 0
    msg = json.loads(capsys.readouterr().out)
    assert msg["status"] == "pass"
    rows = read_csv(tmp_path / "tree_kernel_2.5.csv")
    np.testing.assert_allclose(float(rows[0]["gamma"]), 1.0)
    p = th.TreeParameter.from_lambda(2.5)
    np.testing.assert_allclose(float(rows[3]["gamma"]), th.phi(p, 3), rtol=1e-15)


def test_kernel_fractafold(tmp_path):
    assert run(tmp_path, "kernel", "--model", "fractafold", "--lam", "4", "--N", "1") == 0
    rows = read_csv(tmp_path / "fractafold_kernel_4.csv")
    assert len(rows) == 18 * 18


def test_resolve(tmp_path, capsys):
    assert run(tmp_path, "resolve", "--model", "fractafold", "--N", "1") == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["identity_error"] < 1e-8
    assert run(tmp_path, "resolve", "--model", "tree", "--N", "5") == 0


def test_e6_and_julia(tmp_path):
    assert run(tmp_path, "e6", "--N", "3", "--grid", "64") == 0
    coeffs = json.loads((tmp_path / "e6_coefficients.json").read_text())
    assert len(coeffs) == 49
    assert run(tmp_path, "julia", "--N", "3", "--cutoff", "1") == 0
    assert len(read_csv(tmp_path / "julia_orbit.csv")) > 0


def test_data_dir_env(tmp_path):
    env_dir = tmp_path / "env"
    env = dict(os.environ, FRACTAFOLD_DATA_DIR=str(env_dir))
    res = subprocess.run([sys.executable, "-m", "fractafold_spectra", "julia", "--N", "2", "--cutoff", "1"],
                         env=env, capture_output=True, text=True, cwd=tmp_path)
    assert res.returncode == 0, res.stderr
    assert (env_dir / "julia_orbit.csv").exists()


def test_missing_graph_file_exits_nonzero(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "custom", "--graph", str(tmp_path / "none.json")) == 1
