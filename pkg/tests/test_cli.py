import csv
import subprocess
import sys

import numpy as np
import pytest

from quantos import ModelParams, fisher_point
from quantos.cli import main


def _read(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_winding_prints_invariant(capsys):
    assert main(["winding", "--t1", "0.5", "--t2", "0.5", "--gamma", "0.7",
                 "--out", "/tmp/quantos-test-w"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == "-1"


def test_winding_gapless_is_numeric_failure(tmp_path):
    code = main(["winding", "--t1", "0.2", "--t2", "0.5", "--gamma", "0.7",
                 "--out", str(tmp_path)])
    assert code == 3


def test_phase_diagram_csv(tmp_path):
    code = main(["phase-diagram", "--t1-points", "6", "--t2-points", "5",
                 "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "phase.csv")
    assert header == ["t1", "t2", "gamma", "nu"]
    assert len(rows) == 30
    assert all(r[3] in ("-1", "0", "1") for r in rows)
    manifest = (tmp_path / "manifest.txt").read_text()
    assert "subcommand = phase-diagram" in manifest
    assert "t1_points = 6" in manifest
    assert "version = " in manifest


def test_fisher_scaling_outputs(tmp_path):
    code = main(["fisher-scaling", "--n-min", "11", "--n-max", "23",
                 "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "fisher_n.csv")
    assert header == ["N", "t1", "t2", "gamma", "big_gamma", "omega",
                      "fisher", "mean_term", "cov_term", "nu", "stable"]
    assert [r[0] for r in rows] == ["11", "13", "15", "17", "19", "21", "23"]
    # full round-trip precision: the printed value is the computed value
    expect = fisher_point(ModelParams(1.0, 0.5, 0.7, 1e-11, 11)).value
    assert float(rows[0][6]) == expect
    fit_header, fit_rows = _read(tmp_path / "fit.csv")
    assert fit_header == ["alpha", "two_alpha", "intercept", "window_min",
                         "window_max", "r_squared", "saturated_value",
                         "reason"]
    assert len(fit_rows) == 1
    alpha = float(fit_rows[0][0])
    assert float(fit_rows[0][1]) == pytest.approx(2 * alpha)
    assert fit_rows[0][7] == ""


def test_fisher_scaling_trivial_records_reason(tmp_path):
    code = main(["fisher-scaling", "--t1", "1.5", "--n-min", "11",
                 "--n-max", "23", "--out", str(tmp_path)])
    assert code == 0
    _, fit_rows = _read(tmp_path / "fit.csv")
    assert fit_rows[0][0] == ""
    assert fit_rows[0][7] == "no_linear_window"


def test_resonance_t1_ordering(tmp_path):
    code = main(["resonance-t1", "--t1-list", "0.6,0.69", "--n-min", "5",
                 "--n-max", "25", "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "alpha_t1.csv")
    assert header == ["t1", "omega", "alpha", "two_alpha", "r_squared"]
    alphas = {r[0]: float(r[2]) for r in rows}
    assert alphas["0.69"] > alphas["0.6"]


def test_resonance_omega_peak_flag(tmp_path):
    code = main(["resonance-omega", "--omega-min", "-0.001",
                 "--omega-max", "0.001", "--omega-points", "21",
                 "--n-list", "31", "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "fisher_omega.csv")
    assert header == ["omega", "N", "fisher", "peak_flag"]
    assert len(rows) == 21
    assert sum(int(r[3]) for r in rows) == 1


def test_classical_shift_csv(tmp_path):
    code = main(["classical-shift", "--n-min", "5", "--n-max", "17",
                 "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "classical.csv")
    assert header == ["N", "big_gamma", "delta_e0", "alpha_c_running"]
    assert len(rows) == 7
    assert all(float(r[2]) > 0 for r in rows)
    assert rows[0][3] == ""
    assert rows[-1][3] != ""


def test_validate_cr_csv(tmp_path):
    code = main(["validate-cr", "--n-samples", "1000", "--batches", "30",
                 "--out", str(tmp_path)])
    assert code == 0
    header, rows = _read(tmp_path / "cr.csv")
    assert header == ["n_samples", "batches", "mle_variance",
                      "inverse_fisher", "ratio"]
    assert rows[0][0] == "1000"
    assert 0.5 < float(rows[0][4]) < 1.6


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[common]\n"
        "gamma = 0.7\n"
        "out = {out}\n"
        "[fisher-scaling]\n"
        "t1 = 1.5\n"
        "n_min = 11\n"
        "n_max = 21\n".format(out=tmp_path)
    )
    # file says t1=1.5, flag wins with 1.0
    code = main(["fisher-scaling", "--config", str(cfg), "--t1", "1.0"])
    assert code == 0
    _, rows = _read(tmp_path / "fisher_n.csv")
    assert rows[0][1] == "1.0"
    assert [r[0] for r in rows] == ["11", "13", "15", "17", "19", "21"]


def test_config_errors_exit_2(tmp_path):
    assert main(["fisher-scaling", "--config", str(tmp_path / "nope.ini"),
                 "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[fisher-scaling]\nnot_a_key = 3\n")
    assert main(["fisher-scaling", "--config", str(bad),
                 "--out", str(tmp_path)]) == 2
    # even n_min is rejected before any computation
    assert main(["fisher-scaling", "--n-min", "12", "--n-max", "20",
                 "--out", str(tmp_path)]) == 2


def test_bad_flag_value_exits_2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["fisher-scaling", "--n-min", "eleven", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_io_error_exit_4(tmp_path):
    blocker = tmp_path / "blocked"
    blocker.write_text("")
    code = main(["winding", "--out", str(blocker / "sub")])
    assert code == 4


def test_reruns_are_bit_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert main(["fisher-scaling", "--n-min", "11", "--n-max", "21",
                     "--out", str(out)]) == 0
    assert (a / "fisher_n.csv").read_bytes() == (b / "fisher_n.csv").read_bytes()
    assert (a / "fit.csv").read_bytes() == (b / "fit.csv").read_bytes()


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "quantos.cli", "winding", "--t1", "1.0",
         "--t2", "0.5", "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "-1"
