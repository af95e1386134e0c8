"""Exception hierarchy shared by every stage of the pipeline."""


class OrdtrajError(Exception):
    """Base class for all package errors."""


class InvalidInputError(OrdtrajError, ValueError):
    """Input violates a documented precondition."""


class SeriesTooShortError(InvalidInputError):
    """The series cannot hold a single window for the requested embedding."""

    def __init__(self, n, dim, delay):
        self.n = n
        self.dim = dim
        self.delay = delay
        need = (dim - 1) * delay + 1
        super().__init__(
            f"series of length {n} is too short for D={dim}, tau={delay} "
            f"(needs at least {need} samples)"
        )


class SequenceTooShortError(InvalidInputError):
    """An ordinal sequence with fewer than two patterns has no transitions."""


class ParseError(OrdtrajError, ValueError):
    """Malformed input file content."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(ParseError):
    """Well-formed content holding out-of-range values."""


class EmptyDatasetError(InvalidInputError):
    """Every trajectory was skipped during feature extraction."""
