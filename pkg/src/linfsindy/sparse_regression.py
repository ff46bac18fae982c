"""
Module providing the sparse regression solvers of the identification problem

    xi* = argmin ||y - Theta xi|| + lambda ||xi||_0

under two residual norms:
 - L2: sequentially-thresholded least squares (STLSQ);
 - L-infinity: a particle swarm search. In the default coefficient encoding every particle
   carries one coefficient per max-abs scaled dictionary column. A coefficient is active when
   its magnitude exceeds the activation floor (1e-4 of the coefficient bound) and the fitness
   is ||y - Theta xi_active||_inf + lambda * (active count). In the gate encoding a particle
   carries one gate in [-1, 1] per column, a column is active above 0.5 and the fitness is the
   exact minimax residual of the gated support plus lambda per active column.
   The support of the best particle is refined by single-flip descent on exact minimax costs,
   and the reported coefficients are the minimax fit on the final support.
linf_lambda_sweep() solves for a decreasing grid of lambda values and keeps the support that is
stable over the longest run of the grid. An exhaustive enumeration oracle solves small
instances exactly for validation.

The minimax (Chebyshev) fit on a fixed support is the linear program
min t subject to -t <= y - Theta c <= t, solved with the HiGHS dual simplex so the solution is
a vertex that equioscillates. Tall problems are solved by row generation: the LP is solved on a
subset of rows and the most violated rows are added until the fit holds for all rows.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import enum
from itertools import combinations
import logging
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

# third-party modules
import numpy as np
from scipy.linalg import lstsq
from scipy.optimize import linprog

# linfsindy modules
from .dictionary import DictionarySpec, column_scales, default_var_names
from .misc_utils import as_float_matrix, as_float_vector, is_all_finite
from .pso import PsoConfig, pso_minimize, uniform_bounds

logger = logging.getLogger(__name__)

# constants
DEFAULT_THRESHOLD = 0.1
DEFAULT_STLSQ_ITERS = 10
DEFAULT_LAMBDA_FRACTION = 0.05
DEFAULT_LAMBDA_FRACTIONS = (0.05, 0.02, 0.01, 0.005, 0.002)
DEFAULT_ACTIVATION = 0.5
DEFAULT_ACTIVATION_FLOOR = 1e-4
COEFFICIENT_BOUND_FACTOR = 2.0
ORACLE_GUARD = 200_000
ROW_GENERATION_MIN_ROWS = 400
ROW_GENERATION_BATCH = 50
ROW_GENERATION_MAX_ROUNDS = 100
LP_OPTIONS = {'primal_feasibility_tolerance': 1e-9, 'dual_feasibility_tolerance': 1e-9}
SOLVER_LABEL = 'PSO-restart'


###############################################################################
# Types
#

class RegressionError(Exception):
    """An error occurred while solving a sparse regression problem."""


class ShapeError(RegressionError, ValueError):
    """The shapes of the regression arguments do not agree or contain non-finite values."""


class LinearProgramError(RegressionError):
    """The minimax linear program could not be solved."""


class OracleSizeError(RegressionError):
    """The number of supports to enumerate exceeds the oracle guard."""


class ObjectiveKind(enum.Enum):
    """Enum to indicate the residual norm of the regression objective."""
    L2 = 'L2'
    LINF = 'Linf'


class SearchEncoding(enum.Enum):
    """Enum to indicate what a particle position of the L-infinity search represents."""
    COEFFICIENTS = 'coefficients'
    GATES = 'gates'


@dataclass(frozen=True, eq=False)
class Residual:
    """Signed residual vector r = y - Theta xi; norms are derived on demand."""
    r: np.ndarray

    @property
    def l2(self) -> float:
        """Get the Euclidean norm of the residual."""
        return float(np.linalg.norm(self.r)) if self.r.size else 0.0

    @property
    def linf(self) -> float:
        """Get the maximum absolute residual entry."""
        return float(np.max(np.abs(self.r))) if self.r.size else 0.0

    def norm(self, kind: ObjectiveKind) -> float:
        """Get the norm that belongs to the objective kind."""
        return self.l2 if kind is ObjectiveKind.L2 else self.linf


@dataclass(frozen=True, eq=False)
class SparseCoefficients:
    """Identified sparse weight vector of one sub-system (one state dimension), the objective
    value ||y - Theta xi|| + lambda |support| it achieves and solver diagnostics."""
    xi: np.ndarray
    support: Tuple[int, ...]
    objective_value: float
    objective_kind: ObjectiveKind
    lam: float
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        xi = as_float_vector(self.xi, 'xi', RegressionError)
        object.__setattr__(self, 'xi', xi)
        object.__setattr__(self, 'support', tuple(int(j) for j in self.support))
        nonzero = tuple(int(j) for j in np.flatnonzero(xi))
        if nonzero != self.support:
            raise RegressionError(f'support {self.support} does not match the nonzero '
                                  f'coefficients {nonzero}')
        if not isinstance(self.objective_kind, ObjectiveKind):
            raise RegressionError(f'objective_kind "{self.objective_kind}" is invalid')
        if self.lam < 0:
            raise RegressionError(f'lambda must be nonnegative, got {self.lam}')


@dataclass(frozen=True, eq=False)
class IdentifiedModel:
    """The identified model of a multivariate system: one SparseCoefficients per state dimension
    on a common polynomial dictionary."""
    coefficients: List[SparseCoefficients]
    dictionary: DictionarySpec
    var_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if len(self.coefficients) != self.dictionary.dimension:
            raise RegressionError(f'{len(self.coefficients)} coefficient vectors for a '
                                  f'{self.dictionary.dimension}-dimensional dictionary')
        for coeffs in self.coefficients:
            if coeffs.xi.shape[0] != self.dictionary.size:
                raise RegressionError(f'coefficient vector of length {coeffs.xi.shape[0]} for '
                                      f'a dictionary of {self.dictionary.size} terms')
        if not self.var_names:
            object.__setattr__(self, 'var_names', default_var_names(self.dictionary.dimension))

    @property
    def objective_kind(self) -> ObjectiveKind:
        """Get the objective kind shared by all sub-systems."""
        return self.coefficients[0].objective_kind

    def xi_matrix(self) -> np.ndarray:
        """Get the M x d matrix of stacked coefficient vectors (column k is sub-system k)."""
        return np.column_stack([c.xi for c in self.coefficients])

    def equations(self, precision: int = 4) -> List[str]:
        """Get one human readable equation per sub-system, e.g. dx/dt = -10.0000*x + 10.0000*y."""
        labels = self.dictionary.labels(self.var_names)
        result = []
        for name, coeffs in zip(self.var_names, self.coefficients):
            parts = []
            for j in coeffs.support:
                value = coeffs.xi[j]
                factor = f'{abs(value):.{precision}f}' if labels[j] == '1' else \
                    f'{abs(value):.{precision}f}*{labels[j]}'
                sign = '-' if value < 0 else '+'
                parts.append(f'{sign} {factor}' if parts else f'{"-" if value < 0 else ""}{factor}')
            result.append(f'd{name}/dt = {" ".join(parts) if parts else "0"}')
        return result


###############################################################################
# Helper functions
#

def _check_problem(theta: Any, y: Any) -> Tuple[np.ndarray, np.ndarray]:
    theta = as_float_matrix(theta, 'theta', ShapeError)
    y = as_float_vector(y, 'y', ShapeError)
    if theta.shape[0] != y.shape[0]:
        raise ShapeError(f'theta has {theta.shape[0]} rows while y has {y.shape[0]} entries')
    if theta.shape[0] < 1:
        raise ShapeError('the regression problem has no rows')
    if not (is_all_finite(theta) and is_all_finite(y)):
        raise ShapeError('theta and y must contain finite values only')
    return theta, y


def _least_squares_fit(theta: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Minimum-norm least squares through the SVD based LAPACK driver; flags rank deficiency."""
    k = theta.shape[1]
    if k == 0:
        return np.zeros(0), False
    coef, _, rank, _ = lstsq(theta, y, lapack_driver='gelsd')
    return coef, rank < k


def _chebyshev_lp(theta: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve min t s.t. -t <= y - theta c <= t and return the vertex solution c."""
    n, k = theta.shape
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    ones = np.ones((n, 1))
    a_ub = np.vstack([np.hstack([theta, -ones]), np.hstack([-theta, -ones])])
    b_ub = np.concatenate([y, -y])
    bounds = [(None, None)] * k + [(0, None)]
    result = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method='highs-ds',
                     options=LP_OPTIONS)
    if result.status != 0 or result.x is None:
        raise LinearProgramError(f'minimax linear program failed: {result.message}')
    return np.asarray(result.x[:k], dtype=float)


def _chebyshev_row_generation(theta: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve the minimax fit of a tall problem on a growing subset of rows. The subset starts
    with evenly spaced rows plus the rows of largest least-squares residual."""
    n, k = theta.shape
    tolerance = 1e-9 * max(1.0, float(np.max(np.abs(y))))
    coef_ls, _ = _least_squares_fit(theta, y)
    largest = np.argsort(-np.abs(y - theta @ coef_ls), kind='stable')[:4 * (k + 1)]
    rows = np.union1d(np.linspace(0, n - 1, ROW_GENERATION_MIN_ROWS // 4, dtype=int), largest)

    for round_nr in range(ROW_GENERATION_MAX_ROUNDS):
        coef = _chebyshev_lp(theta[rows], y[rows])
        magnitudes = np.abs(y - theta @ coef)
        level = float(np.max(magnitudes[rows]))
        violating = np.flatnonzero(magnitudes > level + tolerance)
        if violating.size == 0:
            logger.debug('row generation converged after %d rounds with %d rows', round_nr + 1,
                         rows.size)
            return coef
        worst = violating[np.argsort(-magnitudes[violating], kind='stable')]
        rows = np.union1d(rows, worst[:ROW_GENERATION_BATCH])

    logger.warning('row generation did not converge, solving the full minimax program')
    return _chebyshev_lp(theta, y)


def objective_value(theta: np.ndarray, xi: np.ndarray, y: np.ndarray, lam: float,
                    kind: ObjectiveKind) -> float:
    """Compute ||y - Theta xi|| (in the norm of the objective kind) + lambda * |support|."""
    return residual(theta, xi, y).norm(kind) + lam * int(np.count_nonzero(xi))


def _to_coefficients(theta: np.ndarray, y: np.ndarray, xi: np.ndarray, lam: float,
                     kind: ObjectiveKind, diagnostics: Dict[str, Any]) -> SparseCoefficients:
    return SparseCoefficients(xi=xi, support=tuple(int(j) for j in np.flatnonzero(xi)),
                              objective_value=objective_value(theta, xi, y, lam, kind),
                              objective_kind=kind, lam=lam, diagnostics=diagnostics)


###############################################################################
# Module functions
#

def residual(theta: Any, xi: Any, y: Any) -> Residual:
    """Compute the signed residual r = y - Theta xi."""
    theta, y = _check_problem(theta, y)
    xi = as_float_vector(xi, 'xi', ShapeError)
    if xi.shape[0] != theta.shape[1]:
        raise ShapeError(f'xi has {xi.shape[0]} entries while theta has {theta.shape[1]} '
                         'columns')
    return Residual(r=y - theta @ xi)


def least_squares(theta: Any, y: Any) -> np.ndarray:
    """Minimize ||y - Theta c||_2 with a rank revealing (SVD) factorization; the minimum-norm
    solution is returned on rank deficiency."""
    theta, y = _check_problem(theta, y)
    coef, rank_deficient = _least_squares_fit(theta, y)
    if rank_deficient:
        logger.warning('least squares: rank deficient matrix of shape %s', theta.shape)
    return coef


def stlsq(theta: Any, y: Any, threshold: float = DEFAULT_THRESHOLD,
          max_iters: int = DEFAULT_STLSQ_ITERS, lam: float = 0.0) -> SparseCoefficients:
    """Sequentially-thresholded least squares: alternate a least-squares fit on the active set
    with zeroing the coefficients of magnitude below the threshold, until the support is stable
    or max_iters refits have been done. All returned nonzeros have magnitude >= threshold.
    The lambda argument only prices the support in the reported objective value."""
    theta, y = _check_problem(theta, y)
    if not threshold > 0:
        raise RegressionError(f'threshold must be positive, got {threshold}')
    if not isinstance(max_iters, int) or max_iters < 1:
        raise RegressionError(f'max_iters must be a positive integer, got {max_iters}')

    xi, rank_deficient = _least_squares_fit(theta, y)
    support = np.abs(xi) >= threshold
    iterations, converged = 0, False
    while iterations < max_iters and support.any():
        iterations += 1
        xi = np.zeros(theta.shape[1])
        xi[support], deficient = _least_squares_fit(theta[:, support], y)
        rank_deficient = rank_deficient or deficient
        new_support = np.abs(xi) >= threshold
        if np.array_equal(new_support, support):
            converged = True
            break
        support = new_support

    xi = np.where(np.abs(xi) >= threshold, xi, 0.0)
    zero_model = not np.any(xi)
    if zero_model:
        logger.warning('STLSQ: all coefficients fell below the threshold %g, zero model', threshold)

    diagnostics = {'solver': 'STLSQ', 'threshold': threshold, 'iterations': iterations,
                   'converged': converged or zero_model, 'zero_model': zero_model,
                   'rank_deficient': bool(rank_deficient)}
    return _to_coefficients(theta, y, xi, lam, ObjectiveKind.L2, diagnostics)


def linf_fit_fixed_support(theta_sub: Any, y: Any) -> Tuple[np.ndarray, float]:
    """Chebyshev (minimax) fit: the coefficients minimizing max_i |y_i - (Theta c)_i| and the
    attained minimax residual."""
    theta_sub, y = _check_problem(theta_sub, y)
    n, k = theta_sub.shape
    if k == 0:
        return np.zeros(0), float(np.max(np.abs(y)))
    if np.linalg.matrix_rank(theta_sub) < k:
        logger.warning('minimax fit: rank deficient support of %d columns', k)

    coef = _chebyshev_row_generation(theta_sub, y) if n > ROW_GENERATION_MIN_ROWS else \
        _chebyshev_lp(theta_sub, y)
    return coef, float(np.max(np.abs(y - theta_sub @ coef)))


def _inner_fit(theta: np.ndarray, y: np.ndarray, support: Tuple[int, ...],
               kind: ObjectiveKind) -> Tuple[np.ndarray, float, bool]:
    """Solve the inner problem on a fixed support exactly. Returns the full length coefficient
    vector, the residual norm and the rank deficiency flag."""
    xi = np.zeros(theta.shape[1])
    sub = theta[:, list(support)]
    rank_deficient = bool(support) and np.linalg.matrix_rank(sub) < len(support)
    if kind is ObjectiveKind.L2:
        coef, _ = _least_squares_fit(sub, y)
    else:
        coef = _chebyshev_lp(sub, y) if support else np.zeros(0)
    xi[list(support)] = coef
    return xi, residual(theta, xi, y).norm(kind), rank_deficient


class SupportSearch:
    """Fitness of gated supports for the L-infinity solver: the exact minimax residual of the
    active columns plus lambda per active column. Minimax residuals are memoized per support;
    solves of the same (theta, y) may share the memo through minimax_cache."""

    def __init__(self, theta: np.ndarray, y: np.ndarray, lam: float,
                 activation: float = DEFAULT_ACTIVATION, max_support: Optional[int] = None,
                 minimax_cache: Optional[Dict[Tuple[int, ...], float]] = None):
        self._theta = theta
        self._y = y
        self._lam = lam
        self._activation = activation
        self._max_support = max_support
        self._cache: Dict[Tuple[int, ...], float] = {} if minimax_cache is None else \
            minimax_cache
        self._oversize_cost = float(np.max(np.abs(y))) + lam * (theta.shape[1] + 1) + 1.0

    @property
    def evaluated(self) -> int:
        """Get the number of distinct supports for which the inner fit has been solved."""
        return len(self._cache)

    def support_of(self, position: np.ndarray) -> Tuple[int, ...]:
        """Get the support gated open by the particle position."""
        return tuple(int(j) for j in np.flatnonzero(np.abs(position) > self._activation))

    def cost(self, support: Tuple[int, ...]) -> float:
        """Get the objective value of the best fit on the support. Supports larger than
        max_support cost more than the empty support."""
        if self._max_support is not None and len(support) > self._max_support:
            return self._oversize_cost + self._lam * len(support)
        if support not in self._cache:
            self._cache[support] = \
                linf_fit_fixed_support(self._theta[:, list(support)], self._y)[1] if support \
                else float(np.max(np.abs(self._y)))
        return self._cache[support] + self._lam * len(support)

    def __call__(self, position: np.ndarray) -> float:
        return self.cost(self.support_of(position))

    def refine(self, support: Tuple[int, ...]) -> Tuple[Tuple[int, ...], int]:
        """Single-flip descent: repeatedly toggle the one column that lowers the cost most,
        preferring smaller then lexicographically smaller supports on ties. Returns the local
        optimum and the number of accepted flips."""
        current, current_cost, flips = support, self.cost(support), 0
        while True:
            best, best_cost = current, current_cost
            for j in range(self._theta.shape[1]):
                candidate = tuple(sorted(set(current) ^ {j}))
                candidate_cost = self.cost(candidate)
                if candidate_cost < best_cost or (candidate_cost == best_cost and best != current
                                                  and (len(candidate), candidate) <
                                                  (len(best), best)):
                    best, best_cost = candidate, candidate_cost
            if best == current:
                return current, flips
            current, current_cost, flips = best, best_cost, flips + 1


class CoefficientFitness:
    """Fitness of the coefficient encoding: a particle position holds one coefficient per
    column, the entries with a magnitude above the floor are active and the fitness is
    ||y - Theta xi_active||_inf + lambda * (active count)."""

    def __init__(self, theta: np.ndarray, y: np.ndarray, lam: float, floor: float,
                 max_support: Optional[int] = None):
        self._theta = theta
        self._y = y
        self._lam = lam
        self._floor = floor
        self._max_support = max_support
        self._oversize_cost = float(np.max(np.abs(y))) + lam * (theta.shape[1] + 1) + 1.0

    @property
    def floor(self) -> float:
        """Get the activation floor."""
        return self._floor

    def support_of(self, position: np.ndarray) -> Tuple[int, ...]:
        """Get the columns whose coefficient magnitude exceeds the floor."""
        return tuple(int(j) for j in np.flatnonzero(np.abs(position) > self._floor))

    def __call__(self, position: np.ndarray) -> float:
        active = np.abs(position) > self._floor
        count = int(np.count_nonzero(active))
        if self._max_support is not None and count > self._max_support:
            return self._oversize_cost + self._lam * count
        r = self._y - self._theta[:, active] @ position[active]
        return float(np.max(np.abs(r))) + self._lam * count


def default_lambda(y: Any, fraction: float = DEFAULT_LAMBDA_FRACTION) -> float:
    """Get the default sparsity weight fraction * ||y||_inf."""
    return fraction * float(np.max(np.abs(as_float_vector(y, 'y', ShapeError))))


def coefficient_bound(theta: np.ndarray, y: np.ndarray) -> float:
    """Get the magnitude bound of the coefficient encoding: COEFFICIENT_BOUND_FACTOR times the
    larger of ||y||_inf and the largest least-squares coefficient (1 for an all-zero problem)."""
    coef, _ = _least_squares_fit(theta, y)
    reach = max(float(np.max(np.abs(y))), float(np.max(np.abs(coef))) if coef.size else 0.0)
    return COEFFICIENT_BOUND_FACTOR * reach if reach > 0 else 1.0


def linf_sparse_solve(theta: Any, y: Any, lam: Optional[float] = None,
                      pso_config: Optional[PsoConfig] = None,
                      encoding: SearchEncoding = SearchEncoding.COEFFICIENTS,
                      activation: Optional[float] = None,
                      max_support: Optional[int] = None, refine: bool = True,
                      normalize_columns: bool = False,
                      minimax_cache: Optional[Dict[Tuple[int, ...], float]] = None
                      ) -> SparseCoefficients:
    """Minimize ||y - Theta xi||_inf + lambda ||xi||_0 with the particle swarm search.
    The activation is the floor relative to the coefficient bound in the coefficient encoding
    (default 1e-4) and the gate level in the gate encoding (default 0.5). The coefficient
    encoding always searches on max-abs scaled columns; normalize_columns scales the columns
    of the gate encoding too. The returned coefficients are the exact minimax fit on the final
    support. Deterministic given pso_config.seed."""
    theta, y = _check_problem(theta, y)
    lam = default_lambda(y) if lam is None else float(lam)
    if lam < 0:
        raise RegressionError(f'lambda must be nonnegative, got {lam}')
    if not isinstance(encoding, SearchEncoding):
        raise RegressionError(f'encoding "{encoding}" is invalid')
    if activation is None:
        activation = DEFAULT_ACTIVATION_FLOOR if encoding is SearchEncoding.COEFFICIENTS else \
            DEFAULT_ACTIVATION
    if not 0 < activation < 1:
        raise RegressionError(f'activation must lie within (0, 1), got {activation}')

    n_columns = theta.shape[1]
    scaled_search = normalize_columns or encoding is SearchEncoding.COEFFICIENTS
    scales = column_scales(theta) if scaled_search else np.ones(n_columns)
    scaled = theta / scales
    search = SupportSearch(scaled, y, lam, activation, max_support, minimax_cache)
    config = pso_config or PsoConfig()
    if encoding is SearchEncoding.COEFFICIENTS:
        bound = coefficient_bound(scaled, y)
        fitness = CoefficientFitness(scaled, y, lam, activation * bound, max_support)
        config = config.with_bounds(uniform_bounds(n_columns, -bound, bound))
    else:
        fitness = search
        config = config.with_bounds(uniform_bounds(n_columns, -1.0, 1.0))
    result = pso_minimize(fitness, config)

    pso_support = fitness.support_of(result.position)
    support, flips = search.refine(pso_support) if refine else (pso_support, 0)

    xi_scaled, _, rank_deficient = _inner_fit(scaled, y, support, ObjectiveKind.LINF)
    xi = xi_scaled / scales
    diagnostics = {'solver': SOLVER_LABEL, 'encoding': encoding.value, 'activation': activation,
                   'pso': result.diagnostics.to_dict(), 'pso_value': result.value,
                   'pso_support': list(pso_support), 'supports_evaluated': search.evaluated,
                   'refine_flips': flips, 'rank_deficient': bool(rank_deficient),
                   'normalize_columns': normalize_columns, 'seed': config.seed}
    return _to_coefficients(theta, y, xi, lam, ObjectiveKind.LINF, diagnostics)


def linf_lambda_sweep(theta: Any, y: Any,
                      fractions: Sequence[float] = DEFAULT_LAMBDA_FRACTIONS,
                      pso_config: Optional[PsoConfig] = None, **solver_args) -> SparseCoefficients:
    """Solve linf_sparse_solve() for lambda = fraction * ||y||_inf, fractions in decreasing
    order, and keep the support that is stable over the longest run of consecutive fractions
    (ties go to the run of larger lambda). The reply is the solution at the largest lambda of
    that run; the diagnostics hold the chosen fraction and every solve of the sweep."""
    theta, y = _check_problem(theta, y)
    ordered = sorted({float(f) for f in fractions}, reverse=True)
    if not ordered:
        raise RegressionError('the lambda sweep needs at least one fraction')
    if not all(np.isfinite(f) and f >= 0 for f in ordered):
        raise RegressionError(f'lambda fractions must be finite and nonnegative, got '
                              f'{[float(f) for f in fractions]}')

    y_max = float(np.max(np.abs(y)))
    cache: Dict[Tuple[int, ...], float] = {}
    solutions = [linf_sparse_solve(theta, y, lam=fraction * y_max, pso_config=pso_config,
                                   minimax_cache=cache, **solver_args) for fraction in ordered]

    best_start, best_length, start = 0, 0, 0
    for index in range(1, len(solutions) + 1):
        if index == len(solutions) or solutions[index].support != solutions[start].support:
            if index - start > best_length:
                best_start, best_length = start, index - start
            start = index

    chosen = solutions[best_start]
    diagnostics = dict(chosen.diagnostics)
    diagnostics['lambda_fraction'] = ordered[best_start]
    diagnostics['lambda_sweep'] = [{'fraction': fraction, 'lambda': solution.lam,
                                    'support': list(solution.support),
                                    'objective_value': solution.objective_value}
                                   for fraction, solution in zip(ordered, solutions)]
    logger.debug('lambda sweep: fraction %g keeps support %s over %d of %d solves',
                 ordered[best_start], chosen.support, best_length, len(solutions))
    return SparseCoefficients(xi=chosen.xi, support=chosen.support,
                              objective_value=chosen.objective_value,
                              objective_kind=ObjectiveKind.LINF, lam=chosen.lam,
                              diagnostics=diagnostics)


def exhaustive_sparse_oracle(theta: Any, y: Any, lam: float, norm: ObjectiveKind,
                             max_support: int, workers: int = 1) -> SparseCoefficients:
    """Enumerate every support of size <= max_support, solve the inner problem exactly and
    return the global optimum of residual norm + lambda * |support|. Ties are broken by the
    smaller, then lexicographically smaller support; the result does not depend on workers."""
    theta, y = _check_problem(theta, y)
    n_columns = theta.shape[1]
    max_support = min(int(max_support), n_columns)
    count = sum(comb(n_columns, k) for k in range(max_support + 1))
    if count > ORACLE_GUARD:
        raise OracleSizeError(f'{count} supports exceed the enumeration guard of {ORACLE_GUARD}')
    logger.debug('oracle: enumerating %d supports', count)

    supports = [combo for k in range(max_support + 1)
                for combo in combinations(range(n_columns), k)]

    def solve(support: Tuple[int, ...]) -> Tuple[np.ndarray, float, bool]:
        return _inner_fit(theta, y, support, norm)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            solutions = list(executor.map(solve, supports))
    else:
        solutions = [solve(support) for support in supports]

    best_index, best_cost = 0, np.inf
    for index, (support, (_, norm_value, _)) in enumerate(zip(supports, solutions)):
        cost = norm_value + lam * len(support)
        if cost < best_cost:
            best_index, best_cost = index, cost

    xi, _, rank_deficient = solutions[best_index]
    xi = np.where(np.isin(np.arange(n_columns), supports[best_index]), xi, 0.0)
    diagnostics = {'solver': 'exhaustive', 'supports_evaluated': count,
                   'rank_deficient': bool(rank_deficient)}
    return _to_coefficients(theta, y, xi, lam, norm, diagnostics)


def sparse_solve(theta: Any, y: Any, kind: ObjectiveKind, threshold: float = DEFAULT_THRESHOLD,
                 lam: Optional[float] = None, pso_config: Optional[PsoConfig] = None,
                 stlsq_iters: int = DEFAULT_STLSQ_ITERS,
                 lam_fractions: Sequence[float] = DEFAULT_LAMBDA_FRACTIONS,
                 encoding: SearchEncoding = SearchEncoding.COEFFICIENTS,
                 normalize_columns: bool = False) -> SparseCoefficients:
    """Dispatch to stlsq() for the L2 objective. For L-infinity, a given lambda goes to
    linf_sparse_solve(), otherwise linf_lambda_sweep() runs over lam_fractions."""
    if kind is ObjectiveKind.L2:
        return stlsq(theta, y, threshold=threshold, max_iters=stlsq_iters,
                     lam=0.0 if lam is None else lam)
    if lam is None:
        return linf_lambda_sweep(theta, y, fractions=lam_fractions, pso_config=pso_config,
                                 encoding=encoding, normalize_columns=normalize_columns)
    return linf_sparse_solve(theta, y, lam=lam, pso_config=pso_config, encoding=encoding,
                             normalize_columns=normalize_columns)


def identify(theta: np.ndarray, derivatives: np.ndarray, dictionary: DictionarySpec,
             kind: ObjectiveKind, var_names: Optional[Sequence[str]] = None,
             **solver_args) -> IdentifiedModel:
    """Solve one sparse regression per derivative column (sub-system) on the common dictionary."""
    derivatives = as_float_matrix(derivatives, 'derivatives', ShapeError)
    coefficients = [sparse_solve(theta, derivatives[:, k], kind, **solver_args)
                    for k in range(derivatives.shape[1])]
    return IdentifiedModel(coefficients=coefficients, dictionary=dictionary,
                           var_names=list(var_names) if var_names else [])
