"""Exception types shared across the package."""


class HomshiftError(Exception):
    """Base class for all package errors."""


class ParseError(HomshiftError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyGraphError(HomshiftError):
    pass


class Unreachable(HomshiftError):
    pass


class CompositionError(HomshiftError):
    pass


class LengthError(HomshiftError):
    pass


class PreconditionError(HomshiftError):
    pass


class VerificationError(HomshiftError):
    pass


class CycleBudgetError(HomshiftError):
    pass


class GammaError(HomshiftError):
    pass


class ShapeError(HomshiftError):
    pass


class FoldImpossible(HomshiftError):
    pass


class GluingFailed(HomshiftError):
    pass


class AtlasIncomplete(HomshiftError):
    pass


class AtlasUnsound(HomshiftError):
    """A plaquette inconsistency while lifting; indicates a bug, not bad input."""


class InvalidCactus(HomshiftError):
    pass


class UsageError(HomshiftError):
    pass
