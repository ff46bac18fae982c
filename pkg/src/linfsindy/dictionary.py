"""
Module providing the candidate-function dictionary Theta of multivariate monomials.

Term ordering (stable, column indices appear in result files): total degree ascending, then
graded lexicographic on the exponent vectors. For d=3 and degree 2 this yields the columns
1, x, y, z, x^2, xy, xz, y^2, yz, z^2.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from typing import List, Optional, Sequence, Tuple

# third-party modules
import numpy as np

# linfsindy modules
from .misc_utils import as_float_matrix, as_float_vector, is_all_finite

# constants
DEFAULT_VAR_NAMES = ('x', 'y', 'z', 'w')


###############################################################################
# Types
#

class DictionaryError(Exception):
    """An error occurred while building or addressing a dictionary."""


class DictionaryInputError(DictionaryError, ValueError):
    """The states to build a dictionary from are invalid."""


@dataclass(frozen=True)
class TermSpec:
    """A monomial x1^e1 * ... * xd^ed, identified by its exponent vector."""
    exponents: Tuple[int, ...]

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not self.exponents or any(not isinstance(e, int) or e < 0 for e in self.exponents):
            raise DictionaryError(f'exponents {self.exponents} must be nonnegative integers')

    @property
    def degree(self) -> int:
        """Get the total degree of the monomial."""
        return sum(self.exponents)

    def evaluate(self, states: np.ndarray) -> np.ndarray:
        """Evaluate the monomial at every row of an n x d matrix. Powers are formed by repeated
        multiplication in variable order, so results are reproducible to the last bit."""
        column = np.ones(states.shape[0])
        for var, exponent in enumerate(self.exponents):
            for _ in range(exponent):
                column = column * states[:, var]
        return column


@dataclass(frozen=True)
class DictionarySpec:
    """The shape of a polynomial dictionary: the state dimension and the maximum total degree.
    Sufficient to rebuild the term order and to evaluate an identified model."""
    dimension: int
    max_degree: int

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise DictionaryError(f'dimension must be a positive integer, got {self.dimension}')
        if not isinstance(self.max_degree, int) or self.max_degree < 1:
            raise DictionaryError(f'max_degree must be a positive integer, got '
                                  f'{self.max_degree}')

    @cached_property
    def terms(self) -> List[TermSpec]:
        """Get the ordered list of dictionary terms."""
        return enumerate_terms(self.dimension, self.max_degree)

    @property
    def size(self) -> int:
        """Get the number of dictionary columns M = C(d + m, m)."""
        return len(self.terms)

    def evaluate(self, states: np.ndarray) -> np.ndarray:
        """Evaluate all terms at every row of an n x d matrix of states."""
        states = as_float_matrix(states, 'states', DictionaryInputError)
        if states.shape[1] != self.dimension:
            raise DictionaryInputError(f'states have {states.shape[1]} columns, expecting '
                                       f'{self.dimension}')
        return np.column_stack([term.evaluate(states) for term in self.terms])

    def evaluate_row(self, state: Sequence[float]) -> np.ndarray:
        """Evaluate all terms at a single state vector."""
        return self.evaluate(as_float_vector(state, 'state').reshape(1, -1))[0]

    def labels(self, var_names: Optional[Sequence[str]] = None) -> List[str]:
        """Get the human readable labels of all terms."""
        names = default_var_names(self.dimension) if var_names is None else var_names
        return [term_label(term, names) for term in self.terms]


@dataclass(frozen=True, eq=False)
class DictionaryMatrix:
    """The n x M feature matrix Theta with its per-column term descriptors."""
    matrix: np.ndarray
    terms: List[TermSpec] = field(repr=False)
    max_degree: int
    dimension: int

    @property
    def spec(self) -> DictionarySpec:
        """Get the dictionary specification this matrix was built from."""
        return DictionarySpec(dimension=self.dimension, max_degree=self.max_degree)


###############################################################################
# Module functions
#

def enumerate_terms(dimension: int, max_degree: int) -> List[TermSpec]:
    """Enumerate all monomials up to max_degree in the stable package term order."""
    terms = []
    for degree in range(max_degree + 1):
        for combo in combinations_with_replacement(range(dimension), degree):
            exponents = np.bincount(np.array(combo, dtype=int), minlength=dimension)
            terms.append(TermSpec(exponents=tuple(int(e) for e in exponents)))
    return terms


def default_var_names(dimension: int) -> List[str]:
    """Get the default variable names: x, y, z, w for up to 4 dimensions, else x1..xd."""
    if dimension <= len(DEFAULT_VAR_NAMES):
        return list(DEFAULT_VAR_NAMES[:dimension])
    return [f'x{i + 1}' for i in range(dimension)]


def build_dictionary(states: np.ndarray, max_degree: int) -> DictionaryMatrix:
    """Build the polynomial dictionary of the n x d states; the first column is all ones."""
    states = as_float_matrix(states, 'states', DictionaryInputError)
    if states.shape[0] < 1:
        raise DictionaryInputError('states must contain at least one row')
    if not is_all_finite(states):
        raise DictionaryInputError('states contain non-finite entries')

    spec = DictionarySpec(dimension=states.shape[1], max_degree=max_degree)
    return DictionaryMatrix(matrix=spec.evaluate(states), terms=spec.terms,
                            max_degree=max_degree, dimension=spec.dimension)


def term_label(term: TermSpec, var_names: Sequence[str]) -> str:
    """Get a human readable monomial string, e.g. x*y or y^2; the constant term yields 1."""
    if len(var_names) != len(term.exponents):
        raise DictionaryError(f'{len(var_names)} variable names for a term of dimension '
                              f'{len(term.exponents)}')
    factors = []
    for name, exponent in zip(var_names, term.exponents):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f'{name}^{exponent}')
    return '*'.join(factors) if factors else '1'


def column_scales(matrix: np.ndarray) -> np.ndarray:
    """Get the per-column maximum absolute value, with all-zero columns mapped to 1 so the
    scaling stays invertible."""
    scales = np.max(np.abs(matrix), axis=0) if matrix.shape[0] else np.ones(matrix.shape[1])
    return np.where(scales > 0, scales, 1.0)
