"""Exception hierarchy.

Divergent self-energies are *not* errors; they travel as flagged values
through :class:`~ccaphoton.green.SelfEnergy` and
:class:`~ccaphoton.scatter1.ScatteringResult`. The exceptions below cover
inputs where a requested quantity is genuinely undefined, and numerical
procedures that failed to reach their accuracy target.
"""


class CCAError(Exception):
    """Base class for all package errors."""


class NumericalError(CCAError):
    """A numerical procedure failed to reach its accuracy target."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not converge.

    Attributes
    ----------
    error_estimate : float
        Absolute error estimate achieved by the integrator.
    """

    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (achieved error estimate {error_estimate:.3e})")
        self.error_estimate = error_estimate


class IllConditionedError(NumericalError):
    """The strip matching system is too ill-conditioned to trust."""

    def __init__(self, message, condition):
        super().__init__(f"{message} (condition number {condition:.3e})")
        self.condition = condition


class WrapAroundError(NumericalError):
    """A time-domain run let probability reach the lattice guard band."""


class SingularChannelError(CCAError, ValueError):
    """A channel (or the incident momentum) sits on a band edge."""


class DivergentSelfEnergyError(CCAError, ValueError):
    """An operation needs a finite self-energy but the self-energy diverges."""


class OutOfBandError(CCAError, ValueError):
    """Energy lies outside the band of a quasi-1D channel."""


class InvalidSpecError(CCAError, ValueError):
    """A sweep specification or configuration file is invalid."""
