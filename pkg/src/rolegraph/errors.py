"""Exception hierarchy shared across the toolkit.

``ConfigError`` signals a parameter value outside its allowed range and maps
to CLI exit code 1. ``DataError`` and its subclasses signal problems with
input data or artifact files and map to CLI exit code 2.
"""


class RoleGraphError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(RoleGraphError):
    """A parameter value is outside its allowed range."""


class DataError(RoleGraphError):
    """Input data violates a documented contract."""


class TaxonomyError(DataError):
    """A label name or code is not part of the 13-class taxonomy."""


class CorpusError(DataError):
    """A corpus file or record stream is malformed."""


class PartitionError(DataError):
    """A train/eval partition is inconsistent with the corpus."""


class FormatError(DataError):
    """A binary or text artifact file violates its format."""


class NonFiniteError(DataError):
    """A NaN or infinity appeared where finite values are required."""


class DimensionError(DataError):
    """Array shapes or lengths do not agree."""


class ZeroVectorError(DataError):
    """A vector has zero norm, so cosine similarity is undefined."""
