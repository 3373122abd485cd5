"""Exception hierarchy shared by all rotzeta modules.

Every error carries an optional context dict so the CLI can emit
machine-readable error JSON ({code, message, context}).
"""

from __future__ import annotations


class RotzetaError(Exception):
    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def code(self) -> str:
        return type(self).__name__


class ParseError(RotzetaError):
    """CLI argument or spec-string parsing failed (exit code 1)."""


# continued fractions / alpha handling
class PrecisionExhausted(RotzetaError):
    """Decimal digits insufficient to certify the next partial quotient."""


class DepthExceeded(RotzetaError):
    pass


class RationalAlpha(RotzetaError):
    """Operation requires an irrational rotation number."""


# periodic function models
class EmptyCoefficients(RotzetaError):
    pass


class DomainError(RotzetaError):
    pass


class EvaluationAtSingularity(RotzetaError):
    pass


class ToleranceUnreachable(RotzetaError):
    pass


class NonzeroMean(RotzetaError):
    pass


class SmallDivisorOverflow(RotzetaError):
    """A divisor e^{2 pi i k alpha} - 1 fell below the safe floor; the
    offending frequency is reported in context["k"]."""


# walks
class MissingCheckpoints(RotzetaError):
    pass


class DegenerateTrace(RotzetaError):
    pass


# lerch / quadrature
class PoleError(RotzetaError):
    pass


class IllConditioned(RotzetaError):
    pass


class QuadratureFailure(RotzetaError):
    pass


class DepthCap(RotzetaError):
    pass


# zeta
class ConvergenceTooSlow(RotzetaError):
    pass


class NonOddResidue(RotzetaError):
    pass


# taylor
class NearPole(RotzetaError):
    pass


class ZeroTargetCoefficient(RotzetaError):
    pass


class PoleAtRootOfUnity(RotzetaError):
    pass


class EmptyMask(RotzetaError):
    pass
