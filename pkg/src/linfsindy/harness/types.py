"""
Module providing simple and independent types of the experiment harness.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import enum


class HarnessError(Exception):
    """An error occurred while running or reporting an experiment."""


class ConfigError(HarnessError):
    """A scenario configuration (file) is invalid."""


class EmitError(HarnessError):
    """A result table could not be written."""


class DerivativeKind(enum.Enum):
    """Enum to indicate the source of the derivative data that is regressed upon."""
    MEASURED_NOISY = 'MeasuredNoisy'
    CENTRAL_DIFFERENCE = 'CentralDifference'
    POLYNOMIAL_INTERP = 'PolynomialInterp'


class TableId(enum.Enum):
    """Enum to indicate one of the predefined experiment grids."""
    T1 = 1
    T2 = 2
    T3 = 3
    T4 = 4
    T5 = 5


class OutputFormat(enum.Enum):
    """Enum to indicate the file format of an emitted result table."""
    CSV = 'csv'
    MARKDOWN = 'markdown'
