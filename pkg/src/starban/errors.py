"""Exception types shared across the package."""


class UsageError(ValueError):
    """Raised on malformed input: dimension mismatches, bad arguments, parse errors."""


class ParseError(UsageError):
    """A space expression or vector literal could not be parsed.

    ``position`` is the 0-based character offset where parsing stopped.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NumericalFailure(ArithmeticError):
    """An iterative routine did not meet its accuracy contract."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual
