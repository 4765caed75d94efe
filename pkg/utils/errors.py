"""
Exception types shared across the analyzer.
"""


class InputDataError(ValueError):
    """An input file is unreadable or holds no usable rows."""


class ConfigurationError(ValueError):
    """The run configuration is invalid or references missing files."""


class DegenerateChainError(ValueError):
    """A diagnostic was asked for on draws with zero variance."""


class ModelFitError(RuntimeError):
    """The model or the sampler could not produce a usable fit."""
