"""Exception hierarchy.

Input problems derive from :class:`InputError`, numerical breakdowns from
:class:`NumericalError`. The CLI maps these to exit codes 1 and 2.
"""


class OpMetricError(Exception):
    """Base class for all package errors."""


class InputError(OpMetricError, ValueError):
    pass


class NumericalError(OpMetricError, ArithmeticError):
    pass


class ParseError(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonFiniteEntry(InputError):
    pass


class LengthMismatch(InputError):
    pass


class DegenerateConfiguration(InputError):
    pass


class OutsideDisc(InputError):
    pass


class NotHermitian(NumericalError):
    pass


class SpectrumOutOfDomain(NumericalError):
    pass


class SingularResolvent(NumericalError):
    pass


class NormTooCloseToOne(NumericalError):
    pass


class NormalFormFailure(NumericalError):
    pass


class NoConvergence(OpMetricError):
    """Iteration budget exhausted; ``result`` holds the best iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class UnboundedOrbitSuspected(OpMetricError):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
