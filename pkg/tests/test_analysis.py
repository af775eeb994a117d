import numpy as np
import pytest
from numpy.testing import assert_allclose

from quantos import (
    EdgeModeAmbiguousError,
    ModelParams,
    NoLinearWindowError,
    analytic_phase,
    classical_edge_shift,
    cramer_rao_check,
    fisher_point,
    fisher_vs_n,
    fit_classical_rate,
    fit_growth_rate,
    omega_scan,
    phase_diagram,
    t1_resonance_scan,
)
from quantos.analysis import SweepResult, SweepRow

TOPO = ModelParams(1.0, 0.5, 0.7, 1e-11)
TRIVIAL = ModelParams(1.5, 0.5, 0.7, 1e-11)


def _synthetic_sweep(n_values, fisher_values):
    rows = tuple(
        SweepRow(ModelParams(1.0, 0.5, n_modes=int(n)), float(f), float(f),
                 0.0, -1, True)
        for n, f in zip(n_values, fisher_values)
    )
    return SweepResult(rows, {"axis": "n_modes", "values": tuple(n_values)})


def test_fisher_point_grows_with_n():
    lo = fisher_point(TOPO.replace(n_modes=11))
    hi = fisher_point(TOPO.replace(n_modes=21))
    assert hi.value > lo.value > 0
    assert lo.params.n_modes == 11


def test_fisher_point_finite_at_zero_coupling():
    r = fisher_point(TOPO.replace(big_gamma=0.0, n_modes=15))
    assert np.isfinite(r.value)
    assert r.value > 0


def test_fisher_point_trivial_is_bounded():
    vals = [fisher_point(TRIVIAL.replace(n_modes=n)).value
            for n in (11, 21, 31)]
    assert max(vals) / min(vals) < 100


def test_fisher_vs_n_rows_and_monotonicity():
    sweep = fisher_vs_n(TOPO, range(11, 27, 2))
    ns = [r.params.n_modes for r in sweep.rows]
    assert ns == sorted(ns)
    vals = np.array([r.fisher for r in sweep.rows])
    assert np.all(np.diff(vals) > 0)
    assert all(r.nu == -1 for r in sweep.rows)
    assert all(r.stable for r in sweep.rows)
    assert sweep.metadata["axis"] == "n_modes"


def test_fisher_vs_n_validates_input():
    with pytest.raises(ValueError):
        fisher_vs_n(TOPO, [11, 12, 13])
    with pytest.raises(ValueError):
        fisher_vs_n(TOPO, [13, 11, 15])


def test_growth_ratio_stable_across_window():
    sweep = fisher_vs_n(TOPO, range(11, 33, 2))
    fit = fit_growth_rate(sweep)
    a, b = fit.window
    vals = {r.params.n_modes: r.fisher for r in sweep.rows}
    ratios = [vals[n + 2] / vals[n] for n in range(a, b, 2)]
    spread = (max(ratios) - min(ratios)) / np.mean(ratios)
    assert spread < 0.15


def test_fit_synthetic_reference_rate():
    # exponential at a known rate clipped at a plateau: the fit must
    # recover the rate to 1% and spot the plateau level
    ns = np.arange(11, 63, 2)
    y = np.minimum(np.exp(0.43011 * ns), 1e10)
    fit = fit_growth_rate(_synthetic_sweep(ns, y))
    assert abs(fit.alpha - 0.215055) / 0.215055 < 0.01
    assert fit.r_squared > 0.9999
    assert fit.saturated_value is not None
    assert_allclose(fit.saturated_value, 1e10, rtol=1e-6)


def test_fit_flat_series_has_no_window():
    ns = np.arange(11, 31, 2)
    with pytest.raises(NoLinearWindowError):
        fit_growth_rate(_synthetic_sweep(ns, np.full(len(ns), 3.7)))


def test_fit_pure_exponential_uses_full_range():
    ns = np.arange(11, 31, 2)
    fit = fit_growth_rate(_synthetic_sweep(ns, np.exp(0.3 * ns)))
    assert fit.window == (11, 29)
    assert fit.r_squared > 0.9999
    assert fit.saturated_value is None
    assert_allclose(fit.alpha, 0.15, rtol=1e-10)


def test_fit_needs_six_points():
    ns = np.arange(11, 21, 2)
    with pytest.raises(ValueError):
        fit_growth_rate(_synthetic_sweep(ns, np.exp(0.3 * ns)))


def test_saturation_plateau_orders_with_coupling():
    # past the growth window the information settles on a plateau whose
    # level rises as the coupling shrinks
    base = ModelParams(0.69, 0.5, 0.7)
    plateaus = {}
    for big_gamma in (1e-6, 1e-9):
        sweep = fisher_vs_n(base.replace(big_gamma=big_gamma),
                            range(17, 29, 2))
        plateaus[big_gamma] = np.mean([r.fisher for r in sweep.rows])
    assert plateaus[1e-9] > plateaus[1e-6] * 1e3


def test_phase_diagram_matches_analytic():
    t1s = (0.3, 0.8, 1.3, 1.9)
    t2s = (0.45, 0.9, 1.6)
    grid = phase_diagram(t1s, t2s, 0.7)
    assert len(grid) == len(t1s) and len(grid[0]) == len(t2s)
    for row in grid:
        for pt in row:
            expect = analytic_phase(ModelParams(pt.t1, pt.t2, pt.gamma))
            assert pt.nu == expect
    # Hermitian limit never winds
    for row in phase_diagram((0.3, 0.9, 1.7), (0.45, 1.1), 0.0):
        for pt in row:
            assert pt.nu == 0


def test_phase_diagram_t2_sign_symmetry():
    t1s = (0.45, 0.9, 1.5)
    t2s = (0.35, 0.85)
    plus = phase_diagram(t1s, t2s, 0.7)
    minus = phase_diagram(t1s, tuple(-t for t in t2s), 0.7)
    for rp, rm in zip(plus, minus):
        for pp, pm in zip(rp, rm):
            assert pp.nu == pm.nu


def test_t1_resonance_scan_orders_and_records_failures():
    pts = t1_resonance_scan((0.6, 0.69, 1.5),
                            ModelParams(1.0, 0.5, 0.7, 1e-11),
                            n_list=range(5, 29, 2))
    by_t1 = {p.t1: p for p in pts}
    assert by_t1[0.69].fit.alpha > by_t1[0.6].fit.alpha > 0
    assert by_t1[1.5].fit is None
    assert by_t1[1.5].reason == "no_linear_window"
    assert by_t1[0.6].reason is None


def test_omega_scan_records_peaks():
    params = ModelParams(0.69, 0.5, 0.7, 1e-11)
    omegas = np.linspace(-0.001, 0.001, 41)
    sweep = omega_scan(omegas, (31,), params)
    assert len(sweep.rows) == 41
    peaks = sweep.metadata["peaks"]
    assert len(peaks) == 1
    peak = peaks[0]
    assert peak["n_modes"] == 31
    assert np.isfinite(peak["fisher_at_zero"])
    assert peak["fisher_peak"] >= peak["fisher_at_zero"]
    # rows follow the omega axis
    ws = [r.params.omega for r in sweep.rows]
    assert ws == sorted(ws)


def test_classical_shift_growth_and_running_fit():
    shifts = classical_edge_shift(ModelParams(0.69, 0.5, 0.7),
                                  range(5, 31, 2))
    assert all(s.delta_e0 >= 0 for s in shifts)
    assert all(s.big_gamma == 1e-8 for s in shifts)
    assert shifts[0].alpha_c is None
    assert shifts[-1].alpha_c is not None
    fit = fit_classical_rate(shifts)
    assert 0.4 < fit.alpha < 0.65


def test_classical_shift_tie_detection():
    # all hoppings and rates zero: the matrix vanishes and every
    # eigenvalue ties at zero modulus
    with pytest.raises(EdgeModeAmbiguousError):
        classical_edge_shift(ModelParams(0.0, 0.0, 0.0), [5])


def test_sweep_determinism_serial_vs_threaded(monkeypatch):
    a = fisher_vs_n(TOPO, range(11, 23, 2))
    monkeypatch.setenv("QUANTOS_THREADS", "4")
    b = fisher_vs_n(TOPO, range(11, 23, 2))
    monkeypatch.delenv("QUANTOS_THREADS")
    for ra, rb in zip(a.rows, b.rows):
        assert ra == rb


def test_cramer_rao_check_quick():
    check = cramer_rao_check(n_samples=2000, n_batches=50, seed=5)
    assert 0.6 < check.ratio < 1.5
    assert check.inverse_fisher == pytest.approx(2.0 / 2000)
    assert abs(check.gamma_hat - 0.3) < 0.01
