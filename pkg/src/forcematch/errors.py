"""Exception hierarchy shared by every forcematch module."""


class ForceMatchError(Exception):
    """Base class for all package errors."""


class ValidationError(ForceMatchError, ValueError):
    pass


class ZeroDisplacement(ForceMatchError, ValueError):
    """Two points coincide, so no bearing exists between them."""


class DegenerateResultant(ForceMatchError, ValueError):
    """Directions cancel out; the circular mean is undefined."""


class OutOfRange(ForceMatchError, ValueError):
    """Requested time lies outside a trajectory's observed span."""


class FocalNotFound(ForceMatchError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class TooFewFixes(ForceMatchError, ValueError):
    pass


class EmptyRows(ForceMatchError, ValueError):
    pass


class MaxIterations(ForceMatchError, RuntimeError):
    pass


class InvalidBounds(ForceMatchError, ValueError):
    pass


class InvalidConfig(ForceMatchError, ValueError):
    pass


class ZeroVariance(ForceMatchError, ValueError):
    pass


class TooFewRows(ForceMatchError, ValueError):
    pass


class EmptyTrajectory(ForceMatchError, ValueError):
    pass


class MalformedRow(ForceMatchError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class DuplicateTimestamp(MalformedRow):
    pass


class NonFiniteValue(MalformedRow):
    pass
