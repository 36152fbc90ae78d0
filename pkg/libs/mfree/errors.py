"""
Exception hierarchy for the mfree library.

Every error raised on purpose by the library derives from MfreeError so that
callers (the mfreelab CLI in particular) can catch one base class.
"""


class MfreeError(Exception):
    """Base exception for mfree errors."""
    pass


class InvalidParameterError(MfreeError, ValueError):
    """Raised when a scalar parameter is outside its allowed range."""
    pass


class ModelError(MfreeError):
    """Raised when a BlockModel violates one of its invariants."""
    pass


class PartitionError(MfreeError):
    """Raised for malformed, crossing or otherwise unusable pair partitions."""
    pass


class DimensionMismatchError(MfreeError):
    """Raised when matrix or coloring dimensions disagree."""
    pass


class PoleError(MfreeError):
    """Raised when a continued fraction hits a zero denominator."""

    def __init__(self, depth: int, message: str = ""):
        self.depth = depth
        super().__init__(message or f"zero denominator at continued-fraction depth {depth}")


class FockError(MfreeError):
    """Raised for inadmissible Fock words, bad indices or unsupported engine settings."""
    pass


class TruncationOverflowError(FockError):
    """Raised when a creation operator would produce a word longer than the truncation."""

    def __init__(self, length: int, truncation: int):
        self.length = length
        self.truncation = truncation
        super().__init__(f"word of length {length} exceeds truncation L={truncation}")


class UnsupportedPatternError(MfreeError):
    """Raised when a 2x2 zero pattern has no closed form."""
    pass


class FixedPointError(MfreeError):
    """Raised when assembled K-transforms fail the matricial fixed-point equation."""
    pass


class StabilizationError(MfreeError):
    """Raised when the s-free iteration has not stabilized at the expected step."""
    pass


class ConfigError(MfreeError):
    """Raised for invalid run configuration."""
    pass
