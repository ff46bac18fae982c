"""
Testsuite validating the sparse_regression module

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import logging
import pytest

# third-party modules
import numpy as np

# system-under-test
from linfsindy.sparse_regression import *
from linfsindy.dictionary import DictionarySpec, build_dictionary
from linfsindy.differentiation import true_derivative
from linfsindy.dynamics import integrate, lorenz_system
from linfsindy.pso import PsoConfig

# test data
from common.helpers import coefficients_of, minimax_line, sparse_problem
from common.testdata import IDENT_X0, LORENZ_EQUATIONS, LORENZ_SUPPORTS, LORENZ_XI
from testdata_sparse_regression import *

SMALL_PSO = PsoConfig(swarm_size=30, max_iters=200, restarts=1, stall_tolerance=(40, 1e-9))


def lorenz_regression(t_end: float):
    traj = integrate(lorenz_system(), IDENT_X0, 0.01, t_end)
    return build_dictionary(traj.values, 2), true_derivative(lorenz_system(), traj).values


###############################################################################
# Tests for the types
#

def test_residual_norms():
    r = Residual(np.array([3.0, -4.0]))
    assert r.l2 == 5.0
    assert r.linf == 4.0
    assert r.norm(ObjectiveKind.L2) == 5.0
    assert r.norm(ObjectiveKind.LINF) == 4.0


def test_residual_computation():
    theta = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    result = residual(theta, [1.0, 2.0], [1.0, 1.0, 1.0])
    assert result.r.tolist() == [0.0, -1.0, -2.0]


def test_sparse_coefficients_fail():
    with pytest.raises(RegressionError) as exc:
        SparseCoefficients(xi=np.array([0.0, 1.0]), support=(0,), objective_value=0.0,
                           objective_kind=ObjectiveKind.L2, lam=0.0)
    assert str(exc.value) == 'support (0,) does not match the nonzero coefficients (1,)'

    with pytest.raises(RegressionError):
        SparseCoefficients(xi=np.zeros(2), support=(), objective_value=0.0,
                           objective_kind=ObjectiveKind.L2, lam=-1.0)


def test_identified_model_equations():
    model = IdentifiedModel(coefficients=coefficients_of(LORENZ_XI),
                            dictionary=DictionarySpec(3, 2))
    assert model.var_names == ['x', 'y', 'z']
    assert model.equations() == LORENZ_EQUATIONS
    assert np.array_equal(model.xi_matrix(), LORENZ_XI)
    assert model.objective_kind is ObjectiveKind.L2


def test_identified_model_zero_equation_and_fail():
    model = IdentifiedModel(coefficients=coefficients_of(np.zeros((3, 1))),
                            dictionary=DictionarySpec(1, 2), var_names=['u'])
    assert model.equations() == ['du/dt = 0']

    with pytest.raises(RegressionError) as exc:
        IdentifiedModel(coefficients=coefficients_of(np.zeros((10, 2))),
                        dictionary=DictionarySpec(3, 2))
    assert str(exc.value) == '2 coefficient vectors for a 3-dimensional dictionary'


###############################################################################
# Tests for least_squares() and stlsq()
#

def test_least_squares_exact():
    theta, y, xi = sparse_problem(seed=1, noise=0.0)
    assert np.allclose(least_squares(theta, y), xi, atol=1e-10)


def test_least_squares_shape_fail():
    with pytest.raises(ShapeError) as exc:
        least_squares(np.ones((3, 2)), np.ones(4))
    assert str(exc.value) == 'theta has 3 rows while y has 4 entries'
    assert isinstance(exc.value, ValueError)

    with pytest.raises(ShapeError) as exc:
        least_squares(np.array([[1.0], [np.inf]]), np.ones(2))
    assert str(exc.value) == 'theta and y must contain finite values only'


def test_least_squares_rank_deficient_minimum_norm(caplog):
    theta = np.column_stack([np.arange(5.0), np.arange(5.0)])
    with caplog.at_level(logging.WARNING):
        coef = least_squares(theta, 2.0 * np.arange(5.0))
    assert np.allclose(coef, [1.0, 1.0])
    assert 'rank deficient' in caplog.text


def test_stlsq_exact_sparse():
    theta, y, xi = sparse_problem(seed=2, n=100, m=6, noise=0.0)
    result = stlsq(theta, y, threshold=0.1)
    assert result.support == tuple(np.flatnonzero(xi))
    assert np.allclose(result.xi, xi, atol=1e-10)
    assert result.objective_kind is ObjectiveKind.L2
    assert result.objective_value < 1e-9
    assert result.diagnostics['converged'] is True
    assert result.diagnostics['zero_model'] is False


@pytest.mark.parametrize('seed', [3, 4, 5])
def test_stlsq_threshold_respected(seed):
    theta, y, _ = sparse_problem(seed=seed, n=60, m=8, noise=0.5)
    result = stlsq(theta, y, threshold=0.3, max_iters=5)
    nonzero = result.xi[list(result.support)]
    assert np.all(np.abs(nonzero) >= 0.3)
    assert result.diagnostics['iterations'] <= 5


def test_stlsq_zero_model(caplog):
    rng = np.random.Generator(np.random.PCG64(6))
    theta = rng.standard_normal((30, 4))
    y = 1e-3 * rng.standard_normal(30)
    with caplog.at_level(logging.WARNING):
        result = stlsq(theta, y, threshold=0.1)
    assert result.support == ()
    assert result.diagnostics['zero_model'] is True
    assert result.objective_value == pytest.approx(np.linalg.norm(y))
    assert 'zero model' in caplog.text


def test_stlsq_objective_includes_support_penalty():
    theta, y, _ = sparse_problem(seed=7, noise=0.1)
    result = stlsq(theta, y, threshold=0.1, lam=0.25)
    expected = residual(theta, result.xi, y).l2 + 0.25 * len(result.support)
    assert result.objective_value == pytest.approx(expected)


def test_stlsq_fail():
    with pytest.raises(RegressionError) as exc:
        stlsq(np.ones((3, 2)), np.ones(3), threshold=0.0)
    assert str(exc.value) == 'threshold must be positive, got 0.0'

    with pytest.raises(RegressionError):
        stlsq(np.ones((3, 2)), np.ones(3), max_iters=0)


def test_stlsq_recovers_lorenz():
    dictionary, derivatives = lorenz_regression(t_end=10.0)
    for k in range(3):
        result = stlsq(dictionary.matrix, derivatives[:, k], threshold=0.1)
        assert result.support == LORENZ_SUPPORTS[k]
        assert np.allclose(result.xi, LORENZ_XI[:, k], atol=1e-6)


def test_identify_builds_model():
    dictionary, derivatives = lorenz_regression(t_end=5.0)
    model = identify(dictionary.matrix, derivatives, dictionary.spec, ObjectiveKind.L2)
    assert np.allclose(model.xi_matrix(), LORENZ_XI, atol=1e-6)
    assert model.equations() == LORENZ_EQUATIONS


###############################################################################
# Tests for linf_fit_fixed_support()
#

def test_linf_fit_parabola():
    coef, t = linf_fit_fixed_support(PARABOLA_THETA, PARABOLA_Y)
    assert coef.tolist() == pytest.approx(PARABOLA_COEF, abs=1e-9)
    assert t == pytest.approx(PARABOLA_MINIMAX, abs=1e-9)


def test_linf_fit_empty_support():
    coef, t = linf_fit_fixed_support(np.zeros((3, 0)), np.array([1.0, -4.0, 2.0]))
    assert coef.shape == (0,)
    assert t == 4.0


@pytest.mark.parametrize('seed', range(20))
def test_linf_fit_matches_brute_force(seed):
    rng = np.random.Generator(np.random.PCG64(1000 + seed))
    t_axis = np.sort(rng.uniform(0.0, 1.0, 25))
    y = rng.standard_normal(25)
    _, minimax = linf_fit_fixed_support(np.column_stack([np.ones(25), t_axis]), y)
    assert minimax == pytest.approx(minimax_line(t_axis, y), abs=1e-4)


@pytest.mark.parametrize('seed', range(10))
def test_linf_fit_equioscillation(seed):
    rng = np.random.Generator(np.random.PCG64(2000 + seed))
    theta = rng.standard_normal((30, 3))
    y = rng.standard_normal(30)
    coef, t = linf_fit_fixed_support(theta, y)
    magnitudes = np.abs(y - theta @ coef)
    assert np.max(magnitudes) == pytest.approx(t)
    assert np.count_nonzero(magnitudes >= t * (1.0 - 1e-6)) >= theta.shape[1] + 1


def test_linf_fit_row_generation_on_tall_problem():
    rng = np.random.Generator(np.random.PCG64(3000))
    t_axis = np.linspace(0.0, 1.0, 2000)
    y = np.sin(6.0 * t_axis) + 0.01 * rng.standard_normal(2000)
    _, minimax = linf_fit_fixed_support(np.column_stack([np.ones(2000), t_axis]), y)
    assert minimax == pytest.approx(minimax_line(t_axis, y), abs=1e-6)


@pytest.mark.parametrize('seed', INVARIANCE_SEEDS)
@pytest.mark.parametrize('factor', SCALE_FACTORS)
def test_inner_fits_follow_rescaling(seed, factor):
    theta, y, _ = sparse_problem(seed=seed, m=4)
    ls = least_squares(theta, y)
    assert np.allclose(least_squares(factor * theta, y), ls / factor, rtol=1e-8, atol=1e-10)
    assert np.allclose(least_squares(theta, factor * y), factor * ls, rtol=1e-8, atol=1e-10)

    coef, t = linf_fit_fixed_support(theta, y)
    coef_theta, t_theta = linf_fit_fixed_support(factor * theta, y)
    coef_y, t_y = linf_fit_fixed_support(theta, factor * y)
    assert np.allclose(coef_theta, coef / factor, rtol=1e-6, atol=1e-8)
    assert t_theta == pytest.approx(t, rel=1e-6)
    assert np.allclose(coef_y, factor * coef, rtol=1e-6, atol=1e-8)
    assert t_y == pytest.approx(factor * t, rel=1e-6)


@pytest.mark.parametrize('seed', INVARIANCE_SEEDS)
def test_linf_fit_never_exceeds_least_squares_residual(seed):
    theta, y, _ = sparse_problem(seed=seed, m=5, noise=0.5)
    _, t = linf_fit_fixed_support(theta, y)
    assert t <= np.max(np.abs(y - theta @ least_squares(theta, y))) + 1e-12


###############################################################################
# Tests for exhaustive_sparse_oracle()
#

@pytest.mark.parametrize('norm', [ObjectiveKind.L2, ObjectiveKind.LINF])
def test_oracle_finds_true_support(norm):
    theta, y, xi = sparse_problem(seed=8, n=40, m=6)
    result = exhaustive_sparse_oracle(theta, y, lam=0.1, norm=norm, max_support=6)
    assert result.support == tuple(np.flatnonzero(xi))
    assert result.objective_kind is norm
    assert result.diagnostics['supports_evaluated'] == 64


def test_oracle_tie_break_prefers_first_support():
    column = np.array([1.0, 2.0, 3.0])
    theta = np.column_stack([column, column])
    result = exhaustive_sparse_oracle(theta, column, lam=0.1, norm=ObjectiveKind.LINF,
                                      max_support=2)
    assert result.support == (0,)
    assert result.xi[0] == pytest.approx(1.0)


def test_oracle_workers_do_not_change_result():
    theta, y, _ = sparse_problem(seed=9, n=30, m=7)
    single = exhaustive_sparse_oracle(theta, y, lam=0.05, norm=ObjectiveKind.LINF,
                                      max_support=3)
    threaded = exhaustive_sparse_oracle(theta, y, lam=0.05, norm=ObjectiveKind.LINF,
                                        max_support=3, workers=3)
    assert np.array_equal(single.xi, threaded.xi)
    assert single.objective_value == threaded.objective_value


@pytest.mark.parametrize('seed', INVARIANCE_SEEDS)
@pytest.mark.parametrize('norm', [ObjectiveKind.L2, ObjectiveKind.LINF])
def test_oracle_permuted_columns(seed, norm):
    theta, y, _ = sparse_problem(seed=seed, m=6)
    permutation = np.random.Generator(np.random.PCG64(seed)).permutation(6)
    result = exhaustive_sparse_oracle(theta, y, lam=0.1, norm=norm, max_support=6)
    permuted = exhaustive_sparse_oracle(theta[:, permutation], y, lam=0.1, norm=norm,
                                        max_support=6)
    assert np.allclose(permuted.xi, result.xi[permutation], atol=1e-8)
    assert permuted.objective_value == pytest.approx(result.objective_value, abs=1e-8)


@pytest.mark.parametrize('seed', INVARIANCE_SEEDS)
def test_oracle_dominates_the_solvers(seed):
    theta, y, _ = sparse_problem(seed=seed, m=6)
    linf = exhaustive_sparse_oracle(theta, y, lam=0.1, norm=ObjectiveKind.LINF, max_support=6)
    found = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO.with_seed(seed))
    assert linf.objective_value <= found.objective_value + 1e-9

    l2 = exhaustive_sparse_oracle(theta, y, lam=0.1, norm=ObjectiveKind.L2, max_support=6)
    thresholded = stlsq(theta, y, threshold=0.1, lam=0.1)
    assert l2.objective_value <= thresholded.objective_value + 1e-9


def test_oracle_size_guard():
    with pytest.raises(OracleSizeError) as exc:
        exhaustive_sparse_oracle(np.ones((40, 30)), np.ones(40), lam=0.1,
                                 norm=ObjectiveKind.L2, max_support=30)
    assert 'exceed the enumeration guard' in str(exc.value)


###############################################################################
# Tests for linf_sparse_solve()
#

@pytest.mark.parametrize('seed', RECOVERY_SEEDS)
@pytest.mark.parametrize('encoding', [SearchEncoding.COEFFICIENTS, SearchEncoding.GATES])
def test_linf_sparse_solve_recovers_exact_support(seed, encoding):
    theta, y, xi = sparse_problem(seed=seed, noise=0.0)
    result = linf_sparse_solve(theta, y, pso_config=SMALL_PSO.with_seed(seed), encoding=encoding)
    assert result.support == tuple(np.flatnonzero(xi))
    assert np.allclose(result.xi, xi, atol=1e-6)
    assert result.objective_kind is ObjectiveKind.LINF
    assert result.lam == pytest.approx(0.05 * np.max(np.abs(y)))
    assert result.diagnostics['encoding'] == encoding.value


def test_linf_sparse_solve_default_encoding():
    theta, y, _ = sparse_problem(seed=10)
    result = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO)
    assert result.diagnostics['encoding'] == 'coefficients'
    assert result.diagnostics['activation'] == 1e-4

    gated = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO,
                              encoding=SearchEncoding.GATES)
    assert gated.diagnostics['encoding'] == 'gates'
    assert gated.diagnostics['activation'] == 0.5


def test_linf_sparse_solve_matches_oracle():
    matches = 0
    for seed in ORACLE_SEEDS:
        theta, y, _ = sparse_problem(seed=seed)
        found = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO.with_seed(seed))
        best = exhaustive_sparse_oracle(theta, y, lam=0.1, norm=ObjectiveKind.LINF,
                                        max_support=theta.shape[1])
        if found.objective_value <= best.objective_value * (1.0 + 1e-6):
            matches += 1
    assert matches >= 9


def test_linf_sparse_solve_deterministic():
    theta, y, _ = sparse_problem(seed=11)
    first = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO.with_seed(5))
    second = linf_sparse_solve(theta, y, lam=0.1, pso_config=SMALL_PSO.with_seed(5))
    assert np.array_equal(first.xi, second.xi)
    assert first.diagnostics == second.diagnostics
    assert first.diagnostics['solver'] == 'PSO-restart'
    assert first.diagnostics['seed'] == 5


@pytest.mark.parametrize('encoding', [SearchEncoding.COEFFICIENTS, SearchEncoding.GATES])
def test_linf_sparse_solve_normalized_columns(encoding):
    theta, y, xi = sparse_problem(seed=12, noise=0.0)
    theta[:, 0] *= 100.0
    xi[0] /= 100.0
    result = linf_sparse_solve(theta, y, pso_config=SMALL_PSO, encoding=encoding,
                               normalize_columns=True)
    assert result.support == tuple(np.flatnonzero(xi))
    assert np.allclose(result.xi, xi, atol=1e-6)


def test_linf_sparse_solve_max_support():
    theta, y, _ = sparse_problem(seed=13, support_size=3)
    result = linf_sparse_solve(theta, y, lam=0.01, pso_config=SMALL_PSO, max_support=1)
    assert len(result.support) <= 1


def test_linf_sparse_solve_fail():
    theta, y, _ = sparse_problem(seed=14)
    with pytest.raises(RegressionError) as exc:
        linf_sparse_solve(theta, y, lam=-1.0)
    assert str(exc.value) == 'lambda must be nonnegative, got -1.0'

    with pytest.raises(RegressionError) as exc:
        linf_sparse_solve(theta, y, activation=1.5)
    assert str(exc.value) == 'activation must lie within (0, 1), got 1.5'

    with pytest.raises(RegressionError) as exc:
        linf_sparse_solve(theta, y, encoding='values')
    assert str(exc.value) == 'encoding "values" is invalid'


###############################################################################
# Tests for linf_lambda_sweep()
#

def test_lambda_sweep_recovers_lorenz():
    dictionary, derivatives = lorenz_regression(t_end=3.0)
    for k in range(3):
        y = derivatives[:, k]
        result = linf_lambda_sweep(dictionary.matrix, y, pso_config=SMALL_PSO.with_seed(k))
        assert result.support == LORENZ_SUPPORTS[k]
        assert np.allclose(result.xi, LORENZ_XI[:, k], atol=1e-3)
        fraction = result.diagnostics['lambda_fraction']
        assert fraction in DEFAULT_LAMBDA_FRACTIONS
        assert result.lam == pytest.approx(fraction * np.max(np.abs(y)))
        assert len(result.diagnostics['lambda_sweep']) == len(DEFAULT_LAMBDA_FRACTIONS)


def test_lambda_sweep_order_and_stable_run():
    theta, y, xi = sparse_problem(seed=16, noise=0.0)
    result = linf_lambda_sweep(theta, y, fractions=UNSORTED_FRACTIONS, pso_config=SMALL_PSO)
    sweep = result.diagnostics['lambda_sweep']
    assert [entry['fraction'] for entry in sweep] == [0.05, 0.02, 0.01]
    assert all(entry['support'] == list(np.flatnonzero(xi)) for entry in sweep)
    # every fraction keeps the same support, so the run starts at the largest lambda
    assert result.diagnostics['lambda_fraction'] == 0.05
    assert result.lam == sweep[0]['lambda']
    assert result.objective_value == sweep[0]['objective_value']


def test_lambda_sweep_deterministic():
    theta, y, _ = sparse_problem(seed=17)
    first = linf_lambda_sweep(theta, y, pso_config=SMALL_PSO.with_seed(3))
    second = linf_lambda_sweep(theta, y, pso_config=SMALL_PSO.with_seed(3))
    assert np.array_equal(first.xi, second.xi)
    assert first.diagnostics == second.diagnostics


def test_lambda_sweep_fail():
    theta, y, _ = sparse_problem(seed=18)
    with pytest.raises(RegressionError) as exc:
        linf_lambda_sweep(theta, y, fractions=[])
    assert str(exc.value) == 'the lambda sweep needs at least one fraction'

    with pytest.raises(RegressionError) as exc:
        linf_lambda_sweep(theta, y, fractions=[0.05, -0.1])
    assert str(exc.value) == 'lambda fractions must be finite and nonnegative, got [0.05, -0.1]'


def test_sparse_solve_dispatch():
    theta, y, xi = sparse_problem(seed=19, noise=0.0)
    swept = sparse_solve(theta, y, ObjectiveKind.LINF, pso_config=SMALL_PSO,
                         lam_fractions=[0.05, 0.01])
    assert 'lambda_sweep' in swept.diagnostics
    assert swept.support == tuple(np.flatnonzero(xi))

    fixed = sparse_solve(theta, y, ObjectiveKind.LINF, lam=0.1, pso_config=SMALL_PSO)
    assert 'lambda_sweep' not in fixed.diagnostics
    assert fixed.lam == 0.1


###############################################################################
# Tests for the fitness functions
#

def test_coefficient_fitness():
    theta, y, _ = sparse_problem(seed=20, m=4)
    fitness = CoefficientFitness(theta, y, lam=0.1, floor=0.01, max_support=2)
    assert fitness.floor == 0.01

    position = np.array([1.5, 0.005, -0.8, -0.01])
    assert fitness.support_of(position) == (0, 2)
    active = np.array([1.5, 0.0, -0.8, 0.0])
    assert fitness(position) == pytest.approx(np.max(np.abs(y - theta @ active)) + 0.2)
    assert fitness(np.zeros(4)) == pytest.approx(np.max(np.abs(y)))
    assert fitness(np.ones(4)) > fitness(np.zeros(4))


def test_support_search_memoizes_and_refines():
    theta, y, xi = sparse_problem(seed=15, noise=0.0)
    search = SupportSearch(theta, y, lam=0.1, activation=0.5)
    assert search.support_of(np.array([0.9, -0.6, 0.1, 0.5, 0.0, 0.0, 0.0, -1.0])) == (0, 1, 7)

    full = tuple(range(theta.shape[1]))
    assert search.cost(full) == search.cost(full)
    assert search.evaluated == 1

    support, flips = search.refine(full)
    assert support == tuple(np.flatnonzero(xi))
    assert flips == theta.shape[1] - len(support)


def test_support_search_shares_minimax_cache():
    theta, y, _ = sparse_problem(seed=15)
    cache = {}
    low = SupportSearch(theta, y, lam=0.1, minimax_cache=cache)
    high = SupportSearch(theta, y, lam=0.5, minimax_cache=cache)
    assert high.cost((0, 3)) - low.cost((0, 3)) == pytest.approx(0.8)
    assert list(cache) == [(0, 3)]
    assert low.evaluated == high.evaluated == 1
