"""Exception types shared across the package.

The CLI maps these onto its exit-code envelope: usage errors exit 1,
data errors (unknown terms, bad parameters, parse failures) exit 2,
store corruption exits 3.
"""


class RvssError(Exception):
    """Base class for all package errors."""


class ParseError(RvssError):
    """Clique source file could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TermNotFoundError(RvssError, LookupError):
    def __init__(self, term: str):
        super().__init__(f"term not found: {term}")
        self.term = term


class DomainError(RvssError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateTermError(RvssError):
    """Term whose vector collapsed to zero during the build; it cannot be queried."""

    def __init__(self, term: str):
        super().__init__(f"degenerate term (zero vector): {term}")
        self.term = term


class DependentMinusError(RvssError):
    """A subtrahend is numerically dependent on the ones before it."""

    def __init__(self, term: str):
        super().__init__(f"dependent subtrahend: {term}")
        self.term = term


class StoreCorruptionError(RvssError):
    """Vector store failed a structural or integrity check on load."""
