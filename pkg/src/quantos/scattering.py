"""Frequency-space response of the monitored lattice.

Everything here is stationary (single frequency omega).  The chain of
objects is: resolvent of the open-chain matrix -> complex port response
(scattering block plus loss/gain noise blocks) -> real quadrature-space
response used by the Gaussian-state layer.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import get_lapack_funcs, lu_factor, lu_solve

from .errors import DimensionError, SingularResolventError
from .model import ChannelLayout, RealSpaceHamiltonian, coupling_derivative

__all__ = [
    "ModeGreenFunction",
    "PortResponse",
    "QuadratureResponse",
    "mode_green_function",
    "port_response",
    "response_derivative",
    "linear_embedding",
    "conjugate_embedding",
    "quadrature_response",
]

CONDITION_LIMIT = 1e14


@dataclass(frozen=True)
class ModeGreenFunction:
    """Resolvent -i (H - omega)^-1 with a 1-norm condition estimate."""

    matrix: np.ndarray
    omega: float
    condition_estimate: float

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PortResponse:
    """Complex response blocks at the observed ports.

    ``s`` maps monitored inputs to monitored outputs, ``l_loss`` and
    ``l_gain`` map the unmonitored loss and gain channels in.  The
    ``d*_dgamma`` fields hold derivatives with respect to the end coupling
    and are None unless filled by :func:`response_derivative`.
    """

    s: np.ndarray
    l_loss: np.ndarray
    l_gain: np.ndarray
    omega: float
    ds_dgamma: np.ndarray | None = None
    dl_loss_dgamma: np.ndarray | None = None
    dl_gain_dgamma: np.ndarray | None = None

    def __post_init__(self):
        for a in (self.s, self.l_loss, self.l_gain,
                  self.ds_dgamma, self.dl_loss_dgamma, self.dl_gain_dgamma):
            if a is not None:
                a.setflags(write=False)

    @property
    def n_ports(self) -> int:
        return self.s.shape[0]


@dataclass(frozen=True)
class QuadratureResponse:
    """Real-embedded response acting on (Q_1..Q_p, P_1..P_p) vectors."""

    s_quad: np.ndarray
    l_quad: np.ndarray
    omega: float
    ds_quad: np.ndarray | None = None
    dl_quad: np.ndarray | None = None

    def __post_init__(self):
        for a in (self.s_quad, self.l_quad, self.ds_quad, self.dl_quad):
            if a is not None:
                a.setflags(write=False)

    @property
    def n_quadratures(self) -> int:
        return self.s_quad.shape[0]


def mode_green_function(h: RealSpaceHamiltonian, omega: float) -> ModeGreenFunction:
    """Solve -i (H - omega)^-1 by pivoted LU, never by explicit inversion.

    The condition number of (H - omega) is estimated in the 1-norm from the
    LU factors; if it exceeds 1e14 the solve is untrustworthy and
    SingularResolventError is raised.
    """
    N = h.n_modes
    A = h.matrix - omega * np.eye(N)
    anorm = np.linalg.norm(A, 1)
    try:
        lu, piv = lu_factor(A)
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(f"resolvent singular at omega={omega}") from exc
    gecon, = get_lapack_funcs(("gecon",), (A,))
    rcond, info = gecon(lu, anorm, norm="1")
    if info != 0:
        raise SingularResolventError(f"condition estimate failed (info={info})")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if cond > CONDITION_LIMIT:
        raise SingularResolventError(
            f"resolvent condition {cond:.3e} exceeds {CONDITION_LIMIT:.0e} "
            f"at omega={omega}"
        )
    G = lu_solve((lu, piv), -1j * np.eye(N, dtype=complex))
    return ModeGreenFunction(G, float(omega), float(cond))


def _coupling_columns(rates: np.ndarray, sites: np.ndarray, n_modes: int) -> np.ndarray:
    """Column j carries sqrt(2 rate) at its site, one column per channel."""
    K = np.zeros((n_modes, len(sites)))
    for c, j in enumerate(sites):
        K[j, c] = np.sqrt(2.0 * rates[j])
    return K


def _channel_matrices(layout: ChannelLayout):
    N = layout.n_modes
    k_obs = _coupling_columns(layout.kappa, np.asarray(layout.observed_ports), N)
    k_loss = _coupling_columns(layout.eta_loss, np.nonzero(layout.eta_loss > 0)[0], N)
    k_gain = _coupling_columns(layout.eta_gain, np.nonzero(layout.eta_gain > 0)[0], N)
    return k_obs, k_loss, k_gain


def port_response(g: ModeGreenFunction, layout: ChannelLayout) -> PortResponse:
    """Input-output blocks at the observed ports.

    s = 1 - k_o^T G k_o,  l_loss = -k_o^T G k_loss,  l_gain = +k_o^T G k_gain,
    with coupling columns sqrt(2 rate).  The sign split between the loss and
    gain blocks reflects the conjugated coupling of amplifying channels.
    """
    if layout.n_modes != g.n_modes:
        raise DimensionError(
            f"layout has {layout.n_modes} modes, Green function {g.n_modes}"
        )
    k_obs, k_loss, k_gain = _channel_matrices(layout)
    s = np.eye(k_obs.shape[1], dtype=complex) - k_obs.T @ g.matrix @ k_obs
    l_loss = -k_obs.T @ g.matrix @ k_loss
    l_gain = k_obs.T @ g.matrix @ k_gain
    return PortResponse(s, l_loss, l_gain, g.omega)


def response_derivative(h: RealSpaceHamiltonian, layout: ChannelLayout,
                        omega: float) -> PortResponse:
    """Port response with exact derivatives in the end coupling.

    Uses dG/d(big_gamma) = -i G P G where P is the corner pattern, so no
    finite differencing is involved.
    """
    g = mode_green_function(h, omega)
    base = port_response(g, layout)
    P = coupling_derivative(h.n_modes)
    dG = -1j * (g.matrix @ P @ g.matrix)
    k_obs, k_loss, k_gain = _channel_matrices(layout)
    return dataclasses.replace(
        base,
        ds_dgamma=-(k_obs.T @ dG @ k_obs),
        dl_loss_dgamma=-(k_obs.T @ dG @ k_loss),
        dl_gain_dgamma=k_obs.T @ dG @ k_gain,
    )


def linear_embedding(m: np.ndarray) -> np.ndarray:
    """Real 2p x 2q block [[Re, -Im], [Im, Re]] of a complex map."""
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def conjugate_embedding(m: np.ndarray) -> np.ndarray:
    """Real embedding [[Re, Im], [Im, -Re]] for channels that enter conjugated."""
    return np.block([[m.real, m.imag], [m.imag, -m.real]])


def quadrature_response(pr: PortResponse) -> QuadratureResponse:
    """Assemble the real quadrature-space response.

    The monitored block and the loss block embed linearly; the gain block
    embeds conjugated.  Noise blocks are concatenated column-wise so
    l_quad @ l_quad.T is the total added covariance.  Derivative fields are
    embedded the same way when present.
    """
    s_quad = linear_embedding(pr.s)
    l_quad = np.hstack([linear_embedding(pr.l_loss), conjugate_embedding(pr.l_gain)])
    ds_quad = None
    dl_quad = None
    if pr.ds_dgamma is not None:
        ds_quad = linear_embedding(pr.ds_dgamma)
        dl_quad = np.hstack([
            linear_embedding(pr.dl_loss_dgamma),
            conjugate_embedding(pr.dl_gain_dgamma),
        ])
    return QuadratureResponse(s_quad, l_quad, pr.omega, ds_quad, dl_quad)
