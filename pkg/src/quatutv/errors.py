"""Exception hierarchy shared by every module of the package."""


class QuatError(Exception):
    """Base class for all errors raised by quatutv."""


class DimensionMismatch(QuatError, ValueError):
    pass


class NotAnAdjoint(QuatError, ValueError):
    """A complex matrix lacks the block symmetry of a quaternion adjoint."""


class ConvergenceFailure(QuatError, RuntimeError):
    pass


class BadRank(QuatError, ValueError):
    """A truncation rank or sketch size is outside its admissible range."""


class BadParams(QuatError, ValueError):
    pass


class SingularSketch(QuatError, RuntimeError):
    """The pseudo-inverse shortcut met a numerically singular sketch.

    Callers are expected to retry without the shortcut.
    """


class ZeroReference(QuatError, ValueError):
    pass


class ParseError(QuatError, ValueError):
    pass


class FrameSizeMismatch(QuatError, ValueError):
    pass


class FormatVersionMismatch(QuatError, ValueError):
    pass


class IoError(QuatError, OSError):
    pass


class ConfigError(QuatError, ValueError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field
