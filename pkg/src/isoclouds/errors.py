"""Exception hierarchy for isoclouds."""


class IsoCloudsError(Exception):
    """Base class for all library errors."""


class InvalidInput(IsoCloudsError, ValueError):
    """Malformed or mismatched input (empty cloud, shape mismatch, bad indices)."""


class NotGeneric(IsoCloudsError):
    """The cloud is not principally generic, so PCM/SM are undefined for it."""


class NumericalFailure(IsoCloudsError, ArithmeticError):
    """An iterative numerical routine did not converge."""


class TooLarge(IsoCloudsError):
    """An exhaustive oracle was asked for an instance above its size cap."""


class GenerationFailure(IsoCloudsError):
    """Random instance generation exhausted its resampling budget."""


class ParseError(InvalidInput):
    """A cloud file could not be parsed; ``line`` is 1-based (0 for whole-file problems)."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line else self.path
        super().__init__(f"{where}: {message}")
