"""End-to-end: real sweep CLI runs feeding every panel layout.

Exercises the published CSV contract with no shared code between producer
and renderer. The seven layouts cover: single-series scaling with fit,
phase heatmap, multi-coupling saturation scaling, topological-vs-trivial
scaling with the no-window annotation, growth rate vs t1 with classical
inset, multi-t1 scaling, and information vs frequency.
"""

import shutil
import subprocess

import pytest

from quantos_figures import FigureSpec, render

pytestmark = pytest.mark.skipif(shutil.which("quantos") is None,
                                reason="sweep CLI not installed")


def _run(outdir, *args):
    cmd = ["quantos", *args, "--out", str(outdir)]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return outdir


@pytest.fixture(scope="module")
def runs(tmp_path_factory):
    base = tmp_path_factory.mktemp("runs")
    r = {}
    r["topo"] = _run(base / "topo", "fisher-scaling",
                     "--n-min", "11", "--n-max", "41")
    r["trivial"] = _run(base / "trivial", "fisher-scaling", "--t1", "1.5",
                        "--n-min", "11", "--n-max", "41")
    r["sat6"] = _run(base / "sat6", "fisher-scaling", "--big-gamma", "1e-6",
                     "--n-min", "11", "--n-max", "115")
    r["sat9"] = _run(base / "sat9", "fisher-scaling", "--big-gamma", "1e-9",
                     "--n-min", "11", "--n-max", "115")
    r["phase"] = _run(base / "phase", "phase-diagram")
    r["rest1"] = _run(base / "rest1", "resonance-t1")
    r["resom"] = _run(base / "resom", "resonance-omega")
    r["cls06"] = _run(base / "cls06", "classical-shift", "--t1", "0.6")
    r["cls069"] = _run(base / "cls069", "classical-shift", "--t1", "0.69")
    r["sc06"] = _run(base / "sc06", "fisher-scaling", "--t1", "0.6",
                     "--n-min", "5", "--n-max", "41")
    r["sc069"] = _run(base / "sc069", "fisher-scaling", "--t1", "0.69",
                      "--n-min", "5", "--n-max", "41")
    return r


def _check(path):
    data = path.read_bytes()
    assert data.startswith(b"%PDF") and len(data) > 1000


def test_scaling_with_fit_overlay(runs, tmp_path):
    out = tmp_path / "panel_scaling.pdf"
    render(FigureSpec("scaling", (runs["topo"] / "fisher_n.csv",), out,
                      fits=(runs["topo"] / "fit.csv",)))
    _check(out)


def test_phase_heatmap(runs, tmp_path):
    out = tmp_path / "panel_phase.pdf"
    render(FigureSpec("phase-heatmap", (runs["phase"] / "phase.csv",), out))
    _check(out)


def test_saturation_scaling_two_couplings(runs, tmp_path):
    out = tmp_path / "panel_saturation.pdf"
    render(FigureSpec("scaling",
                      (runs["sat6"] / "fisher_n.csv",
                       runs["sat9"] / "fisher_n.csv"), out,
                      label_by="big_gamma"))
    _check(out)


def test_topological_vs_trivial_scaling(runs, tmp_path):
    out = tmp_path / "panel_contrast.pdf"
    render(FigureSpec("scaling",
                      (runs["topo"] / "fisher_n.csv",
                       runs["trivial"] / "fisher_n.csv"), out,
                      fits=(runs["topo"] / "fit.csv",
                            runs["trivial"] / "fit.csv"),
                      label_by="t1"))
    _check(out)


def test_alpha_vs_t1_with_classical_inset(runs, tmp_path):
    out = tmp_path / "panel_alpha_t1.pdf"
    render(FigureSpec("alpha-vs-t1", (runs["rest1"] / "alpha_t1.csv",), out,
                      insets=(runs["cls06"] / "classical.csv",
                              runs["cls069"] / "classical.csv")))
    _check(out)


def test_multi_t1_scaling(runs, tmp_path):
    out = tmp_path / "panel_multi_t1.pdf"
    render(FigureSpec("scaling",
                      (runs["sc06"] / "fisher_n.csv",
                       runs["sc069"] / "fisher_n.csv",
                       runs["topo"] / "fisher_n.csv"), out, label_by="t1"))
    _check(out)


def test_fisher_vs_omega(runs, tmp_path):
    out = tmp_path / "panel_omega.pdf"
    render(FigureSpec("fisher-vs-omega",
                      (runs["resom"] / "fisher_omega.csv",), out))
    _check(out)
