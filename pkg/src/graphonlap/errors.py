"""Shared exception types."""


class ConfigError(ValueError):
    """Malformed or inconsistent configuration (CLI exit code 2)."""


class DatasetError(RuntimeError):
    """Missing or malformed dataset file (CLI exit code 3)."""


class DegenerateInputError(ValueError):
    """Input is degenerate for the requested operation (e.g. zero-norm matrix)."""


class InvalidFilterError(ValueError):
    """Filter coefficients violate the spectral bound for the given Laplacian."""
