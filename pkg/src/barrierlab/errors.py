"""Exception hierarchy shared by all barrierlab modules."""

from __future__ import annotations


class BarrierLabError(Exception):
    """Base class for every error raised by barrierlab."""


class InvalidParameter(BarrierLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(InvalidParameter):
    """Argument sits on a pole of the Gamma function."""


class GammaPole(PoleError):
    """A Gamma factor of a closed-form coefficient landed on a pole."""


class OutOfSupport(InvalidParameter):
    """Position lies outside the segment the basis is defined on."""


class WronskianCollapse(InvalidParameter):
    """The two basis functions are linearly dependent."""


class ZeroEnergy(InvalidParameter):
    """Zero (or negative) incidence energy; the incoming current vanishes."""


class InvalidComposite(InvalidParameter):
    """A composite potential failed validation."""

    def __init__(self, message: str, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NonConvergence(BarrierLabError, ArithmeticError):
    """An iterative procedure exhausted its budget before meeting tolerance."""


class QuadratureFailure(NonConvergence):
    """Adaptive quadrature could not reach tolerance within its evaluation budget."""


class DegenerateBoundary(BarrierLabError, ArithmeticError):
    """A boundary value used as a denominator vanished to rounding."""


class RepresentationBreakdown(BarrierLabError, ArithmeticError):
    """No hypergeometric representation has its argument inside the safe disc."""


class SingularSystem(BarrierLabError, ArithmeticError):
    """The interface matching system is singular or too badly conditioned."""

    def __init__(self, message: str, condition: float | None = None, diagnostics=None):
        super().__init__(message)
        self.condition = condition
        self.diagnostics = diagnostics or {}


class StiffnessWarning(UserWarning):
    """The oracle step size underflowed relative to the integration domain."""
