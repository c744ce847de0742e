"""Exception hierarchy shared by every module."""


class GameError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(GameError, ValueError):
    pass


class IllegalMove(GameError):
    pass


class InvalidState(GameError):
    pass


class SizeLimitExceeded(GameError, ValueError):
    pass


class FamilyTooLarge(GameError):
    """Raised when a family would exceed the enumeration cap.

    ``estimate`` carries the exact (or estimated) number of sets that would
    have been produced.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class InvariantViolation(GameError):
    """A strategy or solver detected that one of its guarantees broke."""


class DegenerateParameters(GameError, ValueError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoBunch(GameError):
    pass
