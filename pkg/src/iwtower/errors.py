"""Exception hierarchy shared by all modules."""


class IwtowerError(Exception):
    """Base class for every error raised by this package."""


class PrimeMismatchError(IwtowerError, ValueError):
    pass


class NonUnitError(IwtowerError, ValueError):
    pass


class HenselError(IwtowerError, ValueError):
    pass


class PrecisionError(IwtowerError):
    """A quantity cannot be decided at the working precision."""


class LinkParseError(IwtowerError, ValueError):
    pass


class InvalidTauError(IwtowerError, ValueError):
    pass


class DegreeCapError(IwtowerError):
    pass


class OracleBoundError(IwtowerError):
    pass


class FitError(IwtowerError):
    """Growth-law fit failed; ``table`` holds the exponents that were used."""

    def __init__(self, message, table=None):
        super().__init__(message)
        self.table = table or {}


class ModuleActionError(IwtowerError, ValueError):
    pass


class HypothesisError(IwtowerError, ValueError):
    pass


class SpecError(IwtowerError, ValueError):
    """Malformed input file (tower, morphism or module description)."""
