"""Exception types shared across the package."""


class CodeScoutError(Exception):
    """Base class for all package errors."""


class SourceUnavailable(CodeScoutError):
    """Repository source cannot be read or cloned."""


class SizeLimitExceeded(CodeScoutError):
    """Repository working copy is larger than the configured byte limit."""

    def __init__(self, total_bytes: int, limit: int):
        super().__init__(f"repository is {total_bytes} bytes, limit is {limit}")
        self.total_bytes = total_bytes
        self.limit = limit


class ParseFailure(CodeScoutError):
    """Source text does not parse as Python."""


class ProviderUnavailable(CodeScoutError):
    """A remote provider could not be reached or refused the request."""


class EmptyInput(CodeScoutError):
    """Text was empty after normalization; nothing to embed."""


class DimensionMismatch(CodeScoutError):
    """Vectors being compared differ in dimension or provider tag."""


class ZeroVector(CodeScoutError):
    """Cosine similarity is undefined for an all-zero vector."""


class EmptyIndex(CodeScoutError):
    """A ranking stream was asked to select from an empty snippet pool."""


class EmptySet(CodeScoutError):
    """All streams were empty; there is no final target set to build."""


class FileUnreadable(CodeScoutError):
    """An input file could not be opened or decoded."""
