"""Exception hierarchy.

Every error carries its class name as the diagnostic tag the CLI prints, so
``NonPositiveKappa`` on the command line is the class of the same name here.
"""


class LCError(Exception):
    """Base class for all package errors."""


class ValidationError(LCError, ValueError):
    """Physical parameter outside its admissible range."""


class NonPositiveMass(ValidationError):
    pass


class NonPositiveKappa(ValidationError):
    pass


class NegativeOmega(ValidationError):
    pass


class CouplingTooStrong(ValidationError):
    pass


class NonPositiveN(ValidationError):
    pass


class NonPositiveS(ValidationError):
    pass


class NonNegativeEnergy(ValidationError):
    pass


class EpsilonBelowMass(ValidationError):
    pass


class MassNonPositive(ValidationError):
    pass


class ImaginaryFrequency(ValidationError):
    pass


class UnmatchedHydrogenLevel(LCError):
    pass


class DomainNotCovered(LCError, ValueError):
    pass


class OriginOnGrid(LCError, ValueError):
    pass


class ZeroField(LCError, ValueError):
    pass


class NumericalError(LCError, ArithmeticError):
    """A solver failed to produce a trustworthy result."""


class ConvergenceFailure(NumericalError):
    pass


class NegativeDiscriminant(NumericalError):
    pass


class MaxIterExceeded(NumericalError):
    pass


class DegenerateEnergy(NumericalError):
    pass
