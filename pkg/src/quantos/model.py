"""Lattice model: Bloch Hamiltonian, real-space matrix, channels, invariant.

The model is a 1-D two-band non-Hermitian lattice with staggered gain and
loss of rate ``gamma``, hoppings ``t1`` (intra-cell) and ``t2`` (inter-cell),
and a weak coherent coupling ``big_gamma`` between the two end sites.  The
end coupling is the parameter the sensor estimates.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, GaplessError, NonIntegerWindingError

__all__ = [
    "ModelParams",
    "RealSpaceHamiltonian",
    "ChannelLayout",
    "StabilityReport",
    "bloch_hamiltonian",
    "bloch_determinant",
    "winding_number",
    "analytic_phase",
    "real_space_hamiltonian",
    "coupling_derivative",
    "default_channel_layout",
    "stability_report",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

BOUNDARY_TOL = 1e-12
GAP_TOL = 1e-12
STABILITY_TOL = 1e-10


@dataclass(frozen=True)
class ModelParams:
    """Parameter set for one sensor configuration.

    ``gamma`` may be negative for topology sweeps (the invariant is defined
    for either sign); the dissipative channel layout requires ``gamma >= 0``
    and :func:`default_channel_layout` enforces that separately.
    """

    t1: float
    t2: float
    gamma: float = 0.7
    big_gamma: float = 0.0
    n_modes: int = 21
    omega: float = 0.0
    probe_amplitude: float = 2.0
    probe_port: int = 0

    def __post_init__(self):
        if self.n_modes < 3 or self.n_modes % 2 == 0:
            raise ValueError(f"n_modes must be odd and >= 3, got {self.n_modes}")
        if self.probe_amplitude < 0:
            raise ValueError("probe_amplitude must be non-negative")
        if self.probe_port not in (0, 1):
            raise ValueError("probe_port must be 0 or 1 (left or right end)")

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class RealSpaceHamiltonian:
    """Open-chain effective Hamiltonian (non-Hermitian, N x N).

    ``params`` is None for synthetic matrices built directly in diagnostics;
    the scattering layer only needs the matrix itself.
    """

    matrix: np.ndarray
    params: ModelParams | None = None

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]

    def hermitian_part(self) -> np.ndarray:
        return 0.5 * (self.matrix + self.matrix.conj().T)

    def antihermitian_part(self) -> np.ndarray:
        return 0.5 * (self.matrix - self.matrix.conj().T)


@dataclass(frozen=True)
class ChannelLayout:
    """Per-site dissipation rates and the observed ports.

    ``kappa`` holds the monitored loss rates (end sites only), ``eta_loss``
    the unmonitored interior loss, ``eta_gain`` the unmonitored gain.
    ``observed_ports`` lists the site indices with kappa > 0, in order.
    """

    kappa: np.ndarray
    eta_loss: np.ndarray
    eta_gain: np.ndarray
    observed_ports: tuple[int, ...]

    def __post_init__(self):
        for a in (self.kappa, self.eta_loss, self.eta_gain):
            a.setflags(write=False)
        if not (len(self.kappa) == len(self.eta_loss) == len(self.eta_gain)):
            raise ValueError("rate vectors must share one length")
        if np.any(self.kappa < 0) or np.any(self.eta_loss < 0) or np.any(self.eta_gain < 0):
            raise ValueError("rates must be non-negative")

    @property
    def n_modes(self) -> int:
        return len(self.kappa)

    def net_rate(self) -> np.ndarray:
        """Net per-site rate -kappa - eta_loss + eta_gain.

        Must match the diagonal of the anti-Hermitian part of the open-chain
        matrix divided by i.
        """
        return -self.kappa - self.eta_loss + self.eta_gain


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    max_imag: float
    stable: bool

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)


def bloch_hamiltonian(params: ModelParams, k: float) -> np.ndarray:
    """2x2 Bloch matrix (t1 + t2 cos k) sigma_x + (t2 sin k - i gamma) sigma_z."""
    hx = params.t1 + params.t2 * np.cos(k)
    hz = params.t2 * np.sin(k) - 1j * params.gamma
    return hx * SIGMA_X + hz * SIGMA_Z


def bloch_determinant(params: ModelParams, k: np.ndarray) -> np.ndarray:
    """det H(k) = -(hx^2 + hz^2), vectorised over k."""
    k = np.asarray(k, dtype=float)
    hx = params.t1 + params.t2 * np.cos(k)
    hz = params.t2 * np.sin(k) - 1j * params.gamma
    return -(hx * hx + hz * hz)


def winding_number(params: ModelParams, n_k: int = 1024) -> int:
    """Spectral winding of det H(k) around zero over one Brillouin zone.

    Accumulates branch-safe phase increments angle(d_{j+1}/d_j) on a uniform
    k grid.  The grid is doubled (up to 8 times) whenever a single increment
    exceeds pi/2, since the telescoped sum is always an exact multiple of
    2 pi and under-resolution would otherwise pass the integer check with a
    wrong value.

    Raises GaplessError if |det| dips below 1e-12 anywhere on the loop and
    NonIntegerWindingError if the accumulated phase still fails the integer
    check at the finest grid.
    """
    if n_k < 8:
        raise ValueError("n_k too small")
    total = None
    for _ in range(9):
        k = np.linspace(0.0, 2.0 * np.pi, n_k, endpoint=False)
        det = bloch_determinant(params, k)
        if np.min(np.abs(det)) < GAP_TOL:
            raise GaplessError(
                f"Bloch determinant vanishes on the loop at t1={params.t1}, "
                f"t2={params.t2}, gamma={params.gamma}"
            )
        steps = np.angle(np.roll(det, -1) / det)
        if np.max(np.abs(steps)) > 0.5 * np.pi:
            n_k *= 2
            continue
        total = steps.sum() / (2.0 * np.pi)
        nu = round(total)
        if abs(total - nu) > 1e-6:
            n_k *= 2
            continue
        return int(nu)
    raise NonIntegerWindingError(
        f"winding did not converge to an integer (last total {total!r})"
    )


def analytic_phase(params: ModelParams) -> int:
    """Closed-form winding: nonzero iff ||t1|-|t2|| < |gamma| < |t1|+|t2|.

    Inside that window the value is -sign(t1) sign(gamma).  Within 1e-12 of
    either boundary the phase is ill-defined and BoundaryError is raised.
    """
    lower = abs(abs(params.t1) - abs(params.t2))
    upper = abs(params.t1) + abs(params.t2)
    g = abs(params.gamma)
    if min(abs(g - lower), abs(g - upper)) < BOUNDARY_TOL:
        raise BoundaryError(
            f"|gamma|={g} within {BOUNDARY_TOL} of a phase boundary "
            f"[{lower}, {upper}]"
        )
    if lower < g < upper:
        return -int(np.sign(params.t1) * np.sign(params.gamma))
    return 0


def real_space_hamiltonian(params: ModelParams) -> RealSpaceHamiltonian:
    """Open chain of N modes (N odd) with end-to-end coupling big_gamma.

    Structure, 0-indexed: diagonal alternates -i gamma (even sites) and
    +i gamma (odd sites), so both ends carry loss.  First neighbours
    alternate t1 (even i) and t2/2 (odd i), real symmetric.  Second
    neighbours carry +/- i t2/2 (sign by parity of i), Hermitian.  Third
    neighbours carry t2/2 from even i only.  The end coupling enters
    additively at the (0, N-1) corner, so the matrix is affine in
    big_gamma.
    """
    N = params.n_modes
    H = np.zeros((N, N), dtype=complex)
    for i in range(N):
        H[i, i] = -1j * params.gamma if i % 2 == 0 else 1j * params.gamma
    for i in range(N - 1):
        t = params.t1 if i % 2 == 0 else params.t2 / 2.0
        H[i, i + 1] = t
        H[i + 1, i] = t
    for i in range(N - 2):
        v = 1j * params.t2 / 2.0 if i % 2 == 0 else -1j * params.t2 / 2.0
        H[i, i + 2] = v
        H[i + 2, i] = np.conj(v)
    for i in range(N - 3):
        if i % 2 == 0:
            H[i, i + 3] = params.t2 / 2.0
            H[i + 3, i] = params.t2 / 2.0
    H[0, N - 1] += params.big_gamma
    H[N - 1, 0] += params.big_gamma
    return RealSpaceHamiltonian(H, params)


def coupling_derivative(n_modes: int) -> np.ndarray:
    """d(matrix)/d(big_gamma): ones at the two corners, zero elsewhere."""
    P = np.zeros((n_modes, n_modes))
    P[0, n_modes - 1] = 1.0
    P[n_modes - 1, 0] = 1.0
    return P


def default_channel_layout(params: ModelParams) -> ChannelLayout:
    """Standard monitoring scheme: observe the two ends, nothing else.

    Even sites (0-indexed) are lossy at rate gamma; the two end sites route
    that loss into monitored ports (kappa), interior even sites into
    unmonitored loss (eta_loss).  Odd sites carry unmonitored gain at rate
    gamma (eta_gain).  Requires gamma >= 0.
    """
    if params.gamma < 0:
        raise ValueError("channel rates need gamma >= 0")
    N = params.n_modes
    kappa = np.zeros(N)
    eta_loss = np.zeros(N)
    eta_gain = np.zeros(N)
    kappa[0] = kappa[N - 1] = params.gamma
    for i in range(1, N - 1):
        if i % 2 == 1:
            eta_gain[i] = params.gamma
        else:
            eta_loss[i] = params.gamma
    observed = tuple(int(j) for j in np.nonzero(kappa > 0)[0])
    return ChannelLayout(kappa, eta_loss, eta_gain, observed)


def stability_report(h: RealSpaceHamiltonian) -> StabilityReport:
    """Eigenvalues of the open-chain matrix, sorted by |eigenvalue|.

    The mode equations damp iff every eigenvalue has negative imaginary
    part; ``stable`` is max Im < -1e-10 so marginal points count as
    unstable.
    """
    ev = np.linalg.eigvals(h.matrix)
    ev = ev[np.argsort(np.abs(ev))]
    max_imag = float(np.max(ev.imag))
    return StabilityReport(ev, max_imag, bool(max_imag < -STABILITY_TOL))
