"""Exception hierarchy.

Errors that abandon a partially finished computation carry the best result
reached so far in ``payload``.
"""


class SpectraSketchError(Exception):
    """Base class for all errors raised by the package."""

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload


class SizingError(SpectraSketchError, OverflowError):
    pass


class DegenerateSpan(SpectraSketchError, ValueError):
    pass


class IterationLimit(SpectraSketchError, RuntimeError):
    pass


class ResidualTooLarge(SpectraSketchError, ArithmeticError):
    pass


class NumericalBreakdown(SpectraSketchError, ArithmeticError):
    pass


class NodesTooClose(SpectraSketchError, ValueError):
    pass


class DegreeCapExceeded(SpectraSketchError, ValueError):
    pass


class NegativeEntry(SpectraSketchError, ValueError):
    pass


class EntryOutOfRange(SpectraSketchError, ValueError):
    pass


class EnumerationTooLarge(SpectraSketchError, ValueError):
    pass


class InconsistentInputs(SpectraSketchError, ValueError):
    pass


class AssemblyResidual(SpectraSketchError, ArithmeticError):
    pass


class Infeasible(SpectraSketchError, RuntimeError):
    pass


class DivisionDegenerate(SpectraSketchError, ArithmeticError):
    """max over the sketch vanished while max over the body did not."""
