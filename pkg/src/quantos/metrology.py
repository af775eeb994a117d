"""Gaussian states, heterodyne statistics, Fisher information, estimation.

Quadrature convention: q = a + a*, p = i(a* - a), so the vacuum covariance
is the identity and heterodyne detection adds one unit of noise on top of
the output covariance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import minimize_scalar

from .errors import (
    BracketError,
    DimensionError,
    NonPositiveCovarianceError,
    ZeroInformationError,
)
from .model import ModelParams
from .scattering import QuadratureResponse

__all__ = [
    "GaussianState",
    "HeterodyneDistribution",
    "FisherResult",
    "MleResult",
    "vacuum_state",
    "probe_state",
    "propagate",
    "output_derivatives",
    "heterodyne",
    "fisher_information",
    "cramer_rao",
    "sample_heterodyne",
    "average_log_likelihood",
    "mle_gamma",
]

SYMMETRY_TOL = 1e-12
PROPAGATE_SYMMETRY_TOL = 1e-10


def _check_symmetric(cov: np.ndarray, tol: float, where: str) -> None:
    scale = max(1.0, float(np.max(np.abs(cov))))
    asym = float(np.max(np.abs(cov - cov.T)))
    if asym > tol * scale:
        raise NonPositiveCovarianceError(
            f"{where}: covariance asymmetry {asym:.3e} exceeds {tol:.0e} "
            f"relative to scale {scale:.3e}"
        )


@dataclass(frozen=True)
class GaussianState:
    """Quadrature mean and covariance, ordering (Q_1..Q_p, P_1..P_p)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        if mean.ndim != 1 or cov.shape != (len(mean), len(mean)):
            raise DimensionError(
                f"mean length {mean.shape} incompatible with cov {cov.shape}"
            )
        _check_symmetric(cov, SYMMETRY_TOL, "GaussianState")
        try:
            cho_factor(cov + np.eye(len(mean)), lower=True)
        except np.linalg.LinAlgError as exc:
            raise NonPositiveCovarianceError(
                "cov + 1 not positive definite; heterodyne statistics undefined"
            ) from exc
        self.mean.setflags(write=False)
        self.cov.setflags(write=False)

    @property
    def n_ports(self) -> int:
        return len(self.mean) // 2


@dataclass(frozen=True)
class HeterodyneDistribution:
    """Multivariate normal of heterodyne outcomes: mean mu_out, cov V_out + 1."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        self.mean.setflags(write=False)
        self.cov.setflags(write=False)


@dataclass(frozen=True)
class FisherResult:
    """Fisher information and its two contributions; value = mean + cov term."""

    value: float
    mean_term: float
    cov_term: float
    params: ModelParams | None = None


@dataclass(frozen=True)
class MleResult:
    gamma_hat: float
    batch_estimates: np.ndarray
    batch_variance: float | None

    def __post_init__(self):
        self.batch_estimates.setflags(write=False)


def vacuum_state(n_ports: int) -> GaussianState:
    return GaussianState(np.zeros(2 * n_ports), np.eye(2 * n_ports))


def probe_state(params: ModelParams, n_ports: int = 2) -> GaussianState:
    """Coherent probe: quadrature amplitude on the Q of one port, vacuum noise.

    The default amplitude 2 corresponds to mode amplitude 1 in the chosen
    convention.  The Fisher mean term scales with amplitude squared, so this
    choice sets the overall scale of reported information values.
    """
    if not 0 <= params.probe_port < n_ports:
        raise DimensionError(
            f"probe_port {params.probe_port} outside 0..{n_ports - 1}"
        )
    mean = np.zeros(2 * n_ports)
    mean[params.probe_port] = params.probe_amplitude
    return GaussianState(mean, np.eye(2 * n_ports))


def propagate(qr: QuadratureResponse, state: GaussianState) -> GaussianState:
    """Push a Gaussian state through the stationary input-output map.

    mu_out = S mu_in and V_out = S V_in S^T + L L^T with vacuum in every
    unmonitored channel.  Because the gain block is embedded conjugated,
    this single expression reproduces the Hermitian-ordered port moments
    (s s* + l_loss l_loss* antinormal, l_gain l_gain* normal) at every
    frequency, not just omega = 0.
    """
    d = qr.n_quadratures
    if len(state.mean) != d:
        raise DimensionError(
            f"state dimension {len(state.mean)} != response dimension {d}"
        )
    mean = qr.s_quad @ state.mean
    cov = qr.s_quad @ state.cov @ qr.s_quad.T + qr.l_quad @ qr.l_quad.T
    _check_symmetric(cov, PROPAGATE_SYMMETRY_TOL, "propagate")
    cov = 0.5 * (cov + cov.T)
    return GaussianState(mean, cov)


def output_derivatives(qr: QuadratureResponse,
                       state: GaussianState) -> tuple[np.ndarray, np.ndarray]:
    """d(mu_out)/d(big_gamma) and d(V_out)/d(big_gamma) by the product rule.

    Requires a QuadratureResponse carrying derivative blocks.
    """
    if qr.ds_quad is None:
        raise ValueError("quadrature response has no derivative blocks")
    dmu = qr.ds_quad @ state.mean
    dcov = (qr.ds_quad @ state.cov @ qr.s_quad.T
            + qr.s_quad @ state.cov @ qr.ds_quad.T
            + qr.dl_quad @ qr.l_quad.T
            + qr.l_quad @ qr.dl_quad.T)
    return dmu, 0.5 * (dcov + dcov.T)


def heterodyne(out: GaussianState) -> HeterodyneDistribution:
    """Outcome distribution of simultaneous Q/P detection: cov = V_out + 1."""
    cov = out.cov + np.eye(len(out.mean))
    try:
        cho_factor(cov, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NonPositiveCovarianceError(
            "heterodyne covariance not positive definite"
        ) from exc
    return HeterodyneDistribution(out.mean.copy(), cov)


def fisher_information(mu: np.ndarray, cov: np.ndarray, dmu: np.ndarray,
                       dcov: np.ndarray,
                       params: ModelParams | None = None) -> FisherResult:
    """Gaussian Fisher information 0.5 tr[(V^-1 dV)^2] + dmu^T V^-1 dmu.

    ``cov`` is the full outcome covariance (already including detection
    noise) and must be positive definite.  Solves use a Cholesky
    factorization; the inverse is never formed.
    """
    mu = np.asarray(mu, dtype=float)
    cov = np.asarray(cov, dtype=float)
    dmu = np.asarray(dmu, dtype=float)
    dcov = np.asarray(dcov, dtype=float)
    d = len(mu)
    if cov.shape != (d, d) or dmu.shape != (d,) or dcov.shape != (d, d):
        raise DimensionError(
            f"inconsistent shapes mu {mu.shape}, cov {cov.shape}, "
            f"dmu {dmu.shape}, dcov {dcov.shape}"
        )
    try:
        c = cho_factor(cov, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NonPositiveCovarianceError("outcome covariance not PD") from exc
    X = cho_solve(c, dcov)
    cov_term = max(0.5 * float(np.sum(X * X.T)), 0.0)
    mean_term = float(dmu @ cho_solve(c, dmu))
    return FisherResult(mean_term + cov_term, mean_term, cov_term, params)


def cramer_rao(fisher: FisherResult) -> float:
    """Minimal standard deviation 1/sqrt(I) of any unbiased estimator."""
    if fisher.value <= 1e-300:
        raise ZeroInformationError(f"Fisher information {fisher.value} is zero")
    return 1.0 / np.sqrt(fisher.value)


def sample_heterodyne(dist: HeterodyneDistribution, n: int,
                      seed: int) -> np.ndarray:
    """n seeded draws from the outcome distribution, one sample per row."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    chol = np.linalg.cholesky(dist.cov)
    z = rng.standard_normal((n, len(dist.mean)))
    return dist.mean + z @ chol.T


def average_log_likelihood(samples: np.ndarray,
                           dist: HeterodyneDistribution) -> float:
    """Mean Gaussian log density of the rows of ``samples`` under ``dist``."""
    X = np.atleast_2d(np.asarray(samples, dtype=float))
    d = X.shape[1]
    c = cho_factor(dist.cov, lower=True)
    logdet = 2.0 * float(np.sum(np.log(np.diag(c[0]))))
    R = X - dist.mean
    quad = float(np.mean(np.sum(R * cho_solve(c, R.T).T, axis=1)))
    return -0.5 * (quad + logdet + d * np.log(2.0 * np.pi))


def mle_gamma(samples: np.ndarray, model, bracket: tuple[float, float],
              grid_points: int = 41) -> MleResult:
    """Maximum-likelihood coupling estimate by derivative-free search.

    ``model`` maps a coupling value to a HeterodyneDistribution.  ``samples``
    is either one batch (n x d) or a stack of batches (b x n x d); each batch
    is maximized independently and the batch variance of the estimates is
    reported for comparison against the Cramér-Rao bound.

    A coarse likelihood grid over the bracket locates the maximum; if it
    lands on either end the optimum is outside and BracketError is raised.
    The surviving interval is polished by bounded scalar minimization to
    1e-3 of the bracket width.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 2:
        samples = samples[None, :, :]
    if samples.ndim != 3:
        raise DimensionError("samples must be (n, d) or (batches, n, d)")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    grid = np.linspace(lo, hi, grid_points)
    dists = [model(g) for g in grid]
    estimates = np.empty(samples.shape[0])
    xatol = 1e-3 * (hi - lo)
    for b in range(samples.shape[0]):
        batch = samples[b]
        ll = np.array([average_log_likelihood(batch, d) for d in dists])
        i = int(np.argmax(ll))
        if i == 0 or i == grid_points - 1:
            raise BracketError(
                f"likelihood maximal at bracket edge {grid[i]!r}; "
                "true coupling outside bracket?"
            )
        res = minimize_scalar(
            lambda g: -average_log_likelihood(batch, model(g)),
            bounds=(grid[i - 1], grid[i + 1]),
            method="bounded",
            options={"xatol": xatol},
        )
        estimates[b] = res.x
    variance = float(np.var(estimates, ddof=1)) if len(estimates) > 1 else None
    return MleResult(float(np.mean(estimates)), estimates, variance)
