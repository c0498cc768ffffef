"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class WordValidationError(DomainError):
    """A letter sequence violates the word adjacency rule.

    ``index`` is the 0-based position of the first letter whose union with
    its successor is not a d-cell.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ResourceError(RuntimeError):
    """A computation would exceed an enumeration or memory guardrail."""
