"""Exception types shared across the package."""


class CotesrootError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedRule(CotesrootError, ValueError):
    """Requested a closed rule outside the supported node counts (n = 0..7)."""


class ParseError(CotesrootError, ValueError):
    """Function text could not be parsed; carries the offending offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifier(ParseError):
    """Identifier in the function text is not a known function or constant."""


class DomainError(CotesrootError, ArithmeticError):
    """Evaluation left the domain of a node (log of nonpositive, division by
    zero, derivative of cbrt/abs at zero, 0/0 in the multiple-root transform)."""


class Breakdown(CotesrootError, ArithmeticError):
    """A map denominator vanished numerically; carries the breakdown kind."""

    ZERO_DERIVATIVE = "zero_derivative"
    ZERO_DENOMINATOR = "zero_denominator"

    def __init__(self, kind: str, message: str = ""):
        super().__init__(message or kind)
        self.kind = kind


class SingularMatrix(CotesrootError, ArithmeticError):
    """LU elimination met a pivot below the working-precision threshold."""


class InsufficientData(CotesrootError, ValueError):
    """Not enough usable iterates to estimate a convergence order."""


class RoundoffFloor(CotesrootError, ArithmeticError):
    """Quantities sank below what the working precision can resolve."""
