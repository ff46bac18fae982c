"""
Module providing miscellaneous simple utility functions.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from typing import Any, Type

# third-party modules
import numpy as np


def assert_t(value: Any, expected_type: Any):
    """Assert the user specified value has a type that equals (or is a subclass of) the specified
    expected_type argument. Otherwise, a TypeError exception is raised.
    ValueError exceptions are raised when the function arguments are invalid."""
    if value is None:
        raise ValueError('Value argument is None and therefore it can not be asserted.')

    if expected_type is None:
        raise ValueError('Expected type argument is None and therefore assertion is impossible.')

    if not isinstance(value, expected_type):
        raise TypeError(f'Value argument "{value}" is not equal to the expected type: '
                        f'{expected_type}, actual type found: {type(value)}.')


def assert_t_optional(value: Any, expected_type: Any):
    """Assert the user specified value has a type that equals (or is a subclass of) the specified
    expected_type argument -OR- the user specified value equals None, meaning it is optional.
    On inequality a TypeError exception is raised.
    ValueError exceptions are raised when the function arguments are invalid."""
    if value is None:
        return
    assert_t(value, expected_type)


def as_float_vector(value: Any, name: str, error_type: Type[Exception] = ValueError) -> np.ndarray:
    """Coerce the argument into a 1-dimensional float64 array. A scalar becomes a vector of
    length 1. The specified error_type is raised (prefixed with the argument name) when the
    argument can not be interpreted as a vector."""
    try:
        result = np.atleast_1d(np.asarray(value, dtype=float))
    except (TypeError, ValueError) as exc:
        raise error_type(f'{name}: can not be converted to a float vector ({exc})') from exc

    if result.ndim != 1:
        raise error_type(f'{name}: expecting a vector, got an array of shape {result.shape}')
    return result


def as_float_matrix(value: Any, name: str, error_type: Type[Exception] = ValueError) -> np.ndarray:
    """Coerce the argument into a 2-dimensional float64 array. A vector is interpreted as a
    single column. The specified error_type is raised when coercion is not possible."""
    try:
        result = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise error_type(f'{name}: can not be converted to a float matrix ({exc})') from exc

    if result.ndim == 1:
        result = result.reshape(-1, 1)
    if result.ndim != 2:
        raise error_type(f'{name}: expecting a matrix, got an array of shape {result.shape}')
    return result


def is_all_finite(value: np.ndarray) -> bool:
    """Check whether all entries of the array are finite (no NaN, no +/- infinity)."""
    return bool(np.all(np.isfinite(value)))


def plural(singular_noun: str, ref_collection: Any) -> str:
    """Generate a plural form of a single noun when the referenced collection contains more
    than 1 item. The collection type can not be a string."""

    # check preconditions
    if not singular_noun:
        raise TypeError('Argument single_noun can not be empty')
    if not isinstance(singular_noun, str):
        raise TypeError('Argument single_noun must be a string type')
    if not hasattr(ref_collection, "__len__") or isinstance(ref_collection, str):
        raise TypeError('Argument collection must be a collection type (str excluded)')

    # process
    if len(ref_collection) > 1:
        addition = 's'
        if singular_noun[-1] in ['s', 'x', 'z'] or singular_noun[-2::] in ['ss', 'sh', 'ch']:
            addition = 'es'
        return f'{singular_noun}{addition}'

    return singular_noun
