"""Exception types raised across the package.

Every failure mode that callers are expected to handle gets its own class so
that sweep drivers can distinguish "flag the row and move on" from "abort".
All of them derive from :class:`QuantosError`.
"""


class QuantosError(Exception):
    """Base class for all package-specific errors."""


class GaplessError(QuantosError):
    """The Bloch determinant vanishes somewhere on the sampled loop.

    The winding number is undefined on a gapless loop, so the invariant
    computation refuses to return a value.
    """


class NonIntegerWindingError(QuantosError):
    """Accumulated phase fails the integer check even after grid refinement."""


class BoundaryError(QuantosError):
    """Parameters sit on (or numerically at) a phase boundary."""


class SingularResolventError(QuantosError):
    """Resolvent solve is too ill-conditioned to trust."""


class DimensionError(QuantosError):
    """Array shapes are inconsistent with the lattice or port layout."""


class NonPositiveCovarianceError(QuantosError):
    """A covariance matrix lost positivity (or symmetry).

    This always signals instability or a convention bug upstream; it is never
    clipped or silently repaired.
    """


class ZeroInformationError(QuantosError):
    """Fisher information is zero (or numerically so); no bound exists."""


class BracketError(QuantosError):
    """Likelihood maximiser hit the edge of the search bracket."""


class NoLinearWindowError(QuantosError):
    """No contiguous stable-slope window found in a growth-rate fit."""


class EdgeModeAmbiguousError(QuantosError):
    """Two candidate edge eigenvalues are too close to tell apart."""
