"""Exception hierarchy shared by all mesocat modules."""


class MesocatError(Exception):
    """Base class for all domain errors raised by this package."""


class InvalidArgumentError(MesocatError, ValueError):
    """An argument violates a documented precondition."""


class ZeroStateError(MesocatError):
    """A state has (numerically) zero norm, e.g. a zero-probability detection branch."""


class PositivityError(MesocatError):
    """A density operator shows an eigenvalue below the roundoff tolerance.

    Raised instead of clamping so that genuine bugs are not masked as noise.
    """


class DegenerateSpanError(MesocatError):
    """The coherent labels span a numerically singular subspace even after merging."""


class TruncationError(MesocatError):
    """A Fock-space cutoff is too small for the requested amplitude."""


class CapacityError(MesocatError):
    """A brute-force computation would exceed the documented size limits."""


class UnsupportedInputError(MesocatError):
    """The input is valid in principle but outside this implementation's scope."""


class ConfigError(MesocatError):
    """A scenario configuration fails schema validation.

    ``field_path`` points at the offending entry, e.g. ``bath.modes``.
    """

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")
