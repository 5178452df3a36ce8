"""Exception hierarchy shared by every module of the toolkit."""


class HLSubError(Exception):
    """Base class for errors raised by hlsub."""


class DomainError(HLSubError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(HLSubError, IndexError):
    """A query exceeds the range covered by a precomputed table."""


class ResourceError(HLSubError, MemoryError):
    """A computation would exceed its configured memory or work budget."""


class ConfigurationError(HLSubError, ValueError):
    """A required setting is missing, or settings are mutually inadmissible."""


class CacheError(HLSubError, OSError):
    """A cached prime table is malformed or fails re-validation."""
