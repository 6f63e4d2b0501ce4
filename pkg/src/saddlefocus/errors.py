class SaddleFocusError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SaddleFocusError, ValueError):
    """A state or parameter lies outside the domain of the requested map."""


class NonFiniteError(SaddleFocusError, ArithmeticError):
    """A map evaluation overflowed or produced a non-finite value."""


class DegenerateParameterError(SaddleFocusError, ValueError):
    """The parameters make the requested object undefined (e.g. mu = 0)."""


class EmptySequenceError(SaddleFocusError, ValueError):
    """A symbol sequence is too short for the requested measure."""


class EmptyResultError(SaddleFocusError):
    """A search completed without finding anything to return."""
