"""Exception hierarchy shared by every module."""


class SurfBundleError(Exception):
    """Base class for all errors raised by surfbundle."""


class GenusError(SurfBundleError, ValueError):
    pass


class DimensionError(SurfBundleError, ValueError):
    pass


class NonSymplecticError(SurfBundleError, ValueError):
    """A matrix failed M^T J M = J.

    ``witness`` is ``(row, col, lhs, rhs)`` for the first violated entry.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInImage(SurfBundleError, ArithmeticError):
    """A functional is not of the form C*(alpha) with integral alpha."""


class NotEquivalent(NotInImage):
    """Two lifts do not represent the same Johnson class."""


class IndeterminatePairing(SurfBundleError):
    """A pairing matrix needs an entry the ring does not determine."""


class IndeterminateContribution(SurfBundleError):
    """A formula needs a ring value that is flagged indeterminate."""


class PrimitivityViolation(SurfBundleError):
    """A would-be fiber class is not primitive."""

    def __init__(self, message, coeffs=None):
        super().__init__(message)
        self.coeffs = coeffs


class InconsistentData(SurfBundleError, ValueError):
    """Declared flags or supplied data contradict each other."""


class ProblemFileError(SurfBundleError, ValueError):
    """Parse or validation failure in a problem file, with a line number when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
