"""Simulation and metrology toolkit for dissipative topological lattice sensors.

The package is organized as a pipeline: `model` builds the non-Hermitian
lattice and its invariant, `scattering` turns it into a stationary
input-output map, `metrology` propagates Gaussian states and computes
Fisher information for the end-coupling estimate, `analysis` sweeps and
fits, `cli` drives everything from the command line.
"""

__version__ = "0.1.0"

from .analysis import (
    ClassicalShift,
    CrCheck,
    GrowthFit,
    PhasePoint,
    ResonancePoint,
    SweepResult,
    SweepRow,
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
from .errors import (
    BoundaryError,
    BracketError,
    DimensionError,
    EdgeModeAmbiguousError,
    GaplessError,
    NoLinearWindowError,
    NonIntegerWindingError,
    NonPositiveCovarianceError,
    QuantosError,
    SingularResolventError,
    ZeroInformationError,
)
from .metrology import (
    FisherResult,
    GaussianState,
    HeterodyneDistribution,
    MleResult,
    cramer_rao,
    fisher_information,
    heterodyne,
    mle_gamma,
    output_derivatives,
    probe_state,
    propagate,
    sample_heterodyne,
    vacuum_state,
)
from .model import (
    ChannelLayout,
    ModelParams,
    RealSpaceHamiltonian,
    StabilityReport,
    analytic_phase,
    bloch_determinant,
    bloch_hamiltonian,
    coupling_derivative,
    default_channel_layout,
    real_space_hamiltonian,
    stability_report,
    winding_number,
)
from .scattering import (
    ModeGreenFunction,
    PortResponse,
    QuadratureResponse,
    conjugate_embedding,
    linear_embedding,
    mode_green_function,
    port_response,
    quadrature_response,
    response_derivative,
)
