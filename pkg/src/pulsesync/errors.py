"""Exception types shared across the package."""


class PulseSyncError(Exception):
    """Base class for every error raised by pulsesync."""


class InvalidParameter(PulseSyncError, ValueError):
    pass


class EvaluationSingularity(PulseSyncError, ArithmeticError):
    """A PRF or expression produced a non-finite value.

    ``phi`` and ``eps`` locate the failing evaluation; ``path`` names the
    offending subexpression when the value came from the expression DSL.
    """

    def __init__(self, message, phi=None, eps=None, path=None):
        super().__init__(message)
        self.phi = phi
        self.eps = eps
        self.path = path


class InfiniteVoltage(InvalidParameter):
    pass


class EndpointSingularity(InvalidParameter):
    pass


class PhaseRangeError(PulseSyncError):
    """An intermediate phase left [0, 1] by more than rounding allows.

    Raised by the strobe map; it means the PRF violates the range axiom.
    """


class InvalidPRF(PulseSyncError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ParseError(PulseSyncError, ValueError):
    def __init__(self, message, position, expected, found):
        super().__init__(message)
        self.position = position
        self.expected = expected
        self.found = found


class NonConstantExponent(ParseError):
    pass
