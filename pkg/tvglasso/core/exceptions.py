"""
Exception hierarchy for the toolkit.

Every failure a command can report maps to one of three exit codes through
its base class: configuration (2), numerical (3), I/O (4, OSError or a malformed
input artifact).
"""

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from tvglasso.models.fit import GlassoFit


class TvglassoError(Exception):
    """Base exception for toolkit errors"""

    exit_code: int = 1


class ConfigInvalid(TvglassoError):
    """Configuration failed validation"""

    exit_code = 2


class DimensionMismatch(TvglassoError, ValueError):
    """Operands have incompatible dimensions"""

    exit_code = 2


class NumericalError(TvglassoError):
    """Base class for numerical failures"""

    exit_code = 3


class NotPositiveDefinite(NumericalError):
    """Matrix lies outside the positive definite cone"""

    pass


class SingularInput(NumericalError):
    """Unpenalized problem on a singular covariance: the MLE does not exist"""

    pass


class ZeroDiagonal(NumericalError):
    """Covariance diagonal entry is not strictly positive"""

    pass


class EmptyWindow(NumericalError):
    """All kernel weights are zero: bandwidth too small for the grid"""

    pass


class OutOfDomain(NumericalError):
    """Argument at or beyond a singularity of a closed-form expression"""

    pass


class MissingDerivatives(NumericalError):
    """Analytic derivatives required but not supplied"""

    pass


class MaxIterationsExceeded(NumericalError):
    """
    Solver stopped at its iteration cap.

    The best iterate is attached as ``fit`` (flagged ``converged=False``)
    together with its KKT residual.
    """

    def __init__(self, message: str, fit: Optional["GlassoFit"] = None):
        super().__init__(message)
        self.fit = fit


class ArtifactFormatError(TvglassoError):
    """Input artifact (CSV, JSON, JSON-lines) is missing or malformed"""

    exit_code = 4
