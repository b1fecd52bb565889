"""Exception hierarchy shared by all relaframe modules."""


class RelaframeError(Exception):
    """Base class for domain errors raised by relaframe."""


class ShapeError(RelaframeError, ValueError):
    """Operands live on incompatible Hilbert-space shapes."""


class StateError(RelaframeError, ValueError):
    """A matrix failed the density-operator checks."""


class TruncationError(RelaframeError):
    """Fock-space truncation discards more weight than allowed."""


class QuadratureError(RelaframeError, ValueError):
    """A uniform grid is too coarse to integrate the integrand exactly."""


class QuadratureWarning(UserWarning):
    """A binned sum is being used where aliasing can occur."""


class EmptySelection(RelaframeError, ValueError):
    """An empty set of bins was passed where a non-empty one is required."""


class SequenceError(RelaframeError, ValueError):
    """A localisation sequence is empty or malformed."""


class ParseError(RelaframeError):
    """A configuration document could not be parsed."""


class ValidationError(RelaframeError):
    """A configuration document violates the schema.

    ``errors`` holds every violation as ``(field_path, message)`` pairs.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = [f"{path}: {msg}" if path else msg for path, msg in self.errors]
        super().__init__(
            f"{len(self.errors)} validation error(s):\n  " + "\n  ".join(lines))
