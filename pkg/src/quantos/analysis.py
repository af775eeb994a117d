"""Sweeps, growth-rate fits, phase grids, and the classical comparison.

Every sweep is a pure map over parameter points; ordering of the output
rows follows the sweep axis, never completion order, so results are
deterministic whether or not points are evaluated in parallel (worker
count comes from the QUANTOS_THREADS environment variable, default 1).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    EdgeModeAmbiguousError,
    NoLinearWindowError,
    NonPositiveCovarianceError,
    SingularResolventError,
)
from .metrology import (
    FisherResult,
    HeterodyneDistribution,
    fisher_information,
    heterodyne,
    mle_gamma,
    output_derivatives,
    probe_state,
    propagate,
    sample_heterodyne,
)
from .model import (
    ModelParams,
    default_channel_layout,
    real_space_hamiltonian,
    stability_report,
    winding_number,
)
from .scattering import quadrature_response, response_derivative

__all__ = [
    "SweepRow",
    "SweepResult",
    "GrowthFit",
    "PhasePoint",
    "ResonancePoint",
    "ClassicalShift",
    "CrCheck",
    "fisher_point",
    "fisher_vs_n",
    "fit_growth_rate",
    "fit_classical_rate",
    "phase_diagram",
    "t1_resonance_scan",
    "omega_scan",
    "classical_edge_shift",
    "location_model",
    "cramer_rao_check",
]

THREADS_ENV = "QUANTOS_THREADS"

RESONANCE_N_LIST = tuple(range(5, 43, 2))

WINDOW_MIN_POINTS = 4
WINDOW_REL_VARIATION = 0.1
SATURATION_FRACTION = 0.1
EDGE_TIE_TOL = 1e-10


@dataclass(frozen=True)
class SweepRow:
    params: ModelParams
    fisher: float
    mean_term: float
    cov_term: float
    nu: int
    stable: bool
    flag: str = ""


@dataclass
class SweepResult:
    rows: tuple[SweepRow, ...]
    metadata: dict


@dataclass(frozen=True)
class GrowthFit:
    """Exponential-rate fit of an (N, value) series.

    ``alpha`` is the rate per the convention of the fitted quantity:
    information series fit log I ~ 2 alpha N, classical shift series fit
    log(dE/coupling) ~ alpha_c N.  ``window`` holds the (N_min, N_max) of
    the fitted segment; ``saturated_value`` is the trailing plateau mean
    when one is detected, else None.
    """

    alpha: float
    intercept: float
    window: tuple[int, int]
    r_squared: float
    saturated_value: float | None


@dataclass(frozen=True)
class PhasePoint:
    t1: float
    t2: float
    gamma: float
    nu: int


@dataclass(frozen=True)
class ResonancePoint:
    t1: float
    omega: float
    fit: GrowthFit | None
    reason: str | None = None


@dataclass(frozen=True)
class ClassicalShift:
    n_modes: int
    big_gamma: float
    delta_e0: float
    alpha_c: float | None


@dataclass(frozen=True)
class CrCheck:
    n_samples: int
    n_batches: int
    gamma_hat: float
    mle_variance: float
    inverse_fisher: float
    ratio: float


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _pmap(fn, items):
    items = list(items)
    w = _worker_count()
    if w == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=w) as ex:
        return list(ex.map(fn, items))


def fisher_point(params: ModelParams) -> FisherResult:
    """End-to-end information about the end coupling at one parameter point.

    Pipeline: open-chain matrix -> resolvent at params.omega -> port
    response with analytic coupling derivatives -> quadrature embedding ->
    coherent-probe propagation -> heterodyne statistics -> Fisher
    information.  Raises on numerical failure; instability is not an error
    here (sweeps record it as a flag).
    """
    h = real_space_hamiltonian(params)
    layout = default_channel_layout(params)
    pr = response_derivative(h, layout, params.omega)
    qr = quadrature_response(pr)
    probe = probe_state(params, len(layout.observed_ports))
    out = propagate(qr, probe)
    dist = heterodyne(out)
    dmu, dcov = output_derivatives(qr, probe)
    return fisher_information(dist.mean, dist.cov, dmu, dcov, params)


def _sweep_row(params: ModelParams, nu: int) -> SweepRow:
    report = stability_report(real_space_hamiltonian(params))
    try:
        fr = fisher_point(params)
    except SingularResolventError:
        return SweepRow(params, np.nan, np.nan, np.nan, nu, report.stable,
                        "singular")
    except NonPositiveCovarianceError:
        return SweepRow(params, np.nan, np.nan, np.nan, nu, report.stable,
                        "covariance")
    return SweepRow(params, fr.value, fr.mean_term, fr.cov_term, nu,
                    report.stable)


def fisher_vs_n(params: ModelParams, n_list) -> SweepResult:
    """One fisher_point per mode number, everything else fixed."""
    n_list = tuple(int(n) for n in n_list)
    if any(n % 2 == 0 or n < 3 for n in n_list):
        raise ValueError("n_list must contain odd integers >= 3")
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be ascending")
    nu = winding_number(params)
    rows = _pmap(lambda n: _sweep_row(params.replace(n_modes=n), nu), n_list)
    meta = {
        "axis": "n_modes",
        "values": n_list,
        "t1": params.t1, "t2": params.t2, "gamma": params.gamma,
        "big_gamma": params.big_gamma, "omega": params.omega,
    }
    return SweepResult(tuple(rows), meta)


def _series(sweep: SweepResult) -> tuple[np.ndarray, np.ndarray]:
    rows = [r for r in sweep.rows if r.flag == "" and np.isfinite(r.fisher)
            and r.fisher > 0]
    n = np.array([r.params.n_modes for r in rows], dtype=float)
    y = np.array([r.fisher for r in rows], dtype=float)
    return n, y


def _fit_window_series(n: np.ndarray, y: np.ndarray,
                       rate_factor: float) -> GrowthFit:
    """Largest stable-slope window of log y vs n, least squares inside it.

    Local slopes between consecutive points must all be positive and agree
    to within 10% relative over the window; windows span at least 4 points.
    The longest qualifying window wins (earliest on ties).  Saturation is
    flagged when every slope past the window stays below 10% of the fitted
    slope; the plateau mean of y over those trailing points is reported.
    """
    if len(n) < 6:
        raise ValueError(f"need at least 6 clean points, got {len(n)}")
    log_y = np.log(y)
    slopes = np.diff(log_y) / np.diff(n)
    m = len(slopes)
    best = None
    for a in range(m):
        for b in range(a + WINDOW_MIN_POINTS - 2, m):
            seg = slopes[a:b + 1]
            mu = seg.mean()
            if mu <= 0 or np.any(seg <= 0):
                continue
            if (seg.max() - seg.min()) / mu < WINDOW_REL_VARIATION:
                if best is None or (b - a) > (best[1] - best[0]):
                    best = (a, b)
    if best is None:
        raise NoLinearWindowError(
            "no contiguous window of >= 4 points with stable positive slope"
        )
    a, b = best
    x = n[a:b + 2]
    z = log_y[a:b + 2]
    A = np.vstack([x, np.ones_like(x)]).T
    coef, residual, *_ = np.linalg.lstsq(A, z, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    ss_res = float(residual[0]) if len(residual) else 0.0
    r2 = 1.0 if ss_tot == 0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    saturated = None
    threshold = SATURATION_FRACTION * slope
    for j in range(b + 1, m):
        if np.all(slopes[j:] < threshold):
            if len(n) - j >= 2:
                saturated = float(np.mean(y[j:]))
            break
    return GrowthFit(rate_factor * slope, intercept,
                     (int(n[a]), int(n[b + 1])), r2, saturated)


def fit_growth_rate(sweep: SweepResult) -> GrowthFit:
    """Growth rate alpha from log I vs N, with I taken to scale as e^{2 alpha N}."""
    n, y = _series(sweep)
    return _fit_window_series(n, y, 0.5)


def fit_classical_rate(shifts) -> GrowthFit:
    """Classical rate alpha_c from log(dE0 / coupling) vs N (slope, not slope/2)."""
    n = np.array([s.n_modes for s in shifts], dtype=float)
    y = np.array([s.delta_e0 / s.big_gamma for s in shifts], dtype=float)
    keep = np.isfinite(y) & (y > 0)
    return _fit_window_series(n[keep], y[keep], 1.0)


def phase_diagram(t1_grid, t2_grid, gamma: float):
    """Winding number over a (t1, t2) grid at fixed gamma.

    Returns a list of rows, one per t1, each a list of PhasePoint over t2.
    Grid values must avoid exact phase boundaries.
    """
    t2s = tuple(float(t) for t in t2_grid)

    def one_row(t1):
        t1 = float(t1)
        return [
            PhasePoint(t1, t2, gamma,
                       winding_number(ModelParams(t1, t2, gamma)))
            for t2 in t2s
        ]

    return _pmap(one_row, t1_grid)


def t1_resonance_scan(t1_list, params: ModelParams,
                      n_list=RESONANCE_N_LIST):
    """Fitted growth rate at each t1, from a fisher_vs_n sweep apiece.

    The default N range starts at 5: close to the resonance the growth
    window sits at small N because saturation arrives early, and the
    default desk-scale range would miss it entirely.
    """
    points = []
    for t1 in t1_list:
        p = params.replace(t1=float(t1))
        sweep = fisher_vs_n(p, n_list)
        try:
            fit = fit_growth_rate(sweep)
            points.append(ResonancePoint(p.t1, p.omega, fit))
        except NoLinearWindowError:
            points.append(ResonancePoint(p.t1, p.omega, None,
                                         "no_linear_window"))
    return points


def omega_scan(omega_list, n_list, params: ModelParams) -> SweepResult:
    """Information versus drive frequency for each mode number.

    Rows are ordered by (N, omega).  metadata["peaks"] records, per N, the
    grid argmax of I(omega), its height, and I at omega = 0 when the grid
    contains it (the resonance can be orders of magnitude above the
    stationary value and shifts with N).
    """
    omegas = tuple(float(w) for w in omega_list)
    rows: list[SweepRow] = []
    peaks = []
    nu = winding_number(params)
    for n in n_list:
        pn = params.replace(n_modes=int(n))
        block = _pmap(lambda w, p=pn: _sweep_row(p.replace(omega=w), nu),
                      omegas)
        rows.extend(block)
        vals = np.array([r.fisher for r in block])
        if np.all(np.isnan(vals)):
            continue
        i = int(np.nanargmax(vals))
        at_zero = np.nan
        zero_hits = [j for j, w in enumerate(omegas) if w == 0.0]
        if zero_hits:
            at_zero = float(vals[zero_hits[0]])
        peaks.append({
            "n_modes": int(n),
            "omega_peak": omegas[i],
            "fisher_peak": float(vals[i]),
            "fisher_at_zero": at_zero,
        })
    meta = {
        "axis": ("n_modes", "omega"),
        "omega_values": omegas,
        "n_values": tuple(int(n) for n in n_list),
        "peaks": tuple(peaks),
    }
    return SweepResult(tuple(rows), meta)


def classical_edge_shift(params: ModelParams, n_list,
                         big_gamma: float = 1e-8):
    """Coupling-induced shift of the near-zero edge eigenvalue versus N.

    At each N the edge mode is the minimal-modulus eigenvalue of the open
    chain at zero coupling (ties within 1e-10 raise
    EdgeModeAmbiguousError); the shift is its distance to the nearest
    eigenvalue at coupling ``big_gamma``.  The running alpha_c column is a
    plain least-squares slope of log(shift/coupling) over the points so
    far, None until three points exist.
    """
    if big_gamma <= 0:
        raise ValueError("big_gamma must be positive")
    shifts: list[ClassicalShift] = []
    ns: list[float] = []
    logs: list[float] = []
    for n in n_list:
        p0 = params.replace(n_modes=int(n), big_gamma=0.0)
        ev0 = np.linalg.eigvals(real_space_hamiltonian(p0).matrix)
        order = np.argsort(np.abs(ev0))
        edge = ev0[order[0]]
        if len(ev0) > 1 and abs(np.abs(ev0[order[1]]) - np.abs(edge)) < EDGE_TIE_TOL:
            raise EdgeModeAmbiguousError(
                f"two eigenvalues tie for minimal modulus at N={n}"
            )
        pg = p0.replace(big_gamma=big_gamma)
        evg = np.linalg.eigvals(real_space_hamiltonian(pg).matrix)
        delta = float(np.min(np.abs(evg - edge)))
        alpha_c = None
        if delta > 0:
            ns.append(float(n))
            logs.append(np.log(delta / big_gamma))
            if len(ns) >= 3:
                x = np.array(ns)
                z = np.array(logs)
                A = np.vstack([x, np.ones_like(x)]).T
                coef, *_ = np.linalg.lstsq(A, z, rcond=None)
                alpha_c = float(coef[0])
        shifts.append(ClassicalShift(int(n), big_gamma, delta, alpha_c))
    return shifts


def location_model(g: float) -> HeterodyneDistribution:
    """Two-outcome Gaussian location family: mean (g, 0), covariance 2."""
    return HeterodyneDistribution(np.array([float(g), 0.0]), 2.0 * np.eye(2))


def cramer_rao_check(true_gamma: float = 0.3,
                     bracket: tuple[float, float] = (0.0, 0.6),
                     n_samples: int = 10000, n_batches: int = 200,
                     seed: int = 42) -> CrCheck:
    """Batch-MLE variance against the Cramér-Rao bound on the location model.

    Draws ``n_batches`` independent seeded batches (seed + batch index),
    maximizes the likelihood per batch, and compares the batch variance
    with 1/(n I_1) where I_1 is the per-sample Fisher information.
    """
    dist = location_model(true_gamma)
    samples = np.stack([
        sample_heterodyne(dist, n_samples, seed + b) for b in range(n_batches)
    ])
    res = mle_gamma(samples, location_model, bracket)
    per_sample = fisher_information(
        dist.mean, dist.cov, np.array([1.0, 0.0]), np.zeros((2, 2))
    ).value
    bound = 1.0 / (n_samples * per_sample)
    return CrCheck(n_samples, n_batches, res.gamma_hat, res.batch_variance,
                   bound, res.batch_variance / bound)
