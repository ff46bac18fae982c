"""
Testsuite validating the pso module

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import pytest

# third-party modules
import numpy as np

# system-under-test
from linfsindy.pso import *

SPHERE_CONFIG = PsoConfig(swarm_size=30, max_iters=1000, restarts=0,
                          bounds=uniform_bounds(5, -5.0, 5.0))


###############################################################################
# Tests for PsoConfig
#

def test_config_defaults_and_copies():
    config = PsoConfig()
    assert config.swarm_size == 50
    assert config.bounds is None
    bounded = config.with_bounds(((0, 1), (-2, 2)))
    assert bounded.bounds == ((0.0, 1.0), (-2.0, 2.0))
    assert bounded.dimension == 2
    assert bounded.with_seed(9).seed == 9
    assert config.seed == 0


@pytest.mark.parametrize('kwargs, message', [
    ({'swarm_size': 1}, 'swarm_size must be an integer >= 2, got 1'),
    ({'max_iters': 0}, 'max_iters must be a positive integer, got 0'),
    ({'inertia': 1.5}, 'inertia must lie within [0, 1.2], got 1.5'),
    ({'restarts': -1}, 'restarts must be a nonnegative integer, got -1'),
    ({'seed': -3}, 'seed must be a 64-bit unsigned integer, got -3'),
    ({'bounds': ((1.0, 0.0),)}, 'invalid bound (1.0, 0.0): expecting lo < hi'),
])
def test_config_fail(kwargs, message):
    with pytest.raises(PsoConfigError) as exc:
        PsoConfig(**kwargs)
    assert str(exc.value) == message


def test_config_without_bounds_fail():
    with pytest.raises(PsoConfigError) as exc:
        pso_minimize(sphere, PsoConfig())
    assert str(exc.value) == 'bounds are not configured'

    with pytest.raises(PsoConfigError):
        _ = PsoConfig().dimension


###############################################################################
# Tests for the swarm update
#

def test_reflect():
    positions, velocities = reflect(np.array([1.2, -0.3, 0.5]), np.array([0.5, -0.5, 0.1]),
                                    np.zeros(3), np.ones(3))
    assert positions.tolist() == pytest.approx([0.8, 0.3, 0.5])
    assert velocities.tolist() == [-0.5, 0.5, 0.1]


def test_step_leaves_input_untouched():
    state = init_swarm(sphere, SPHERE_CONFIG)
    positions = state.positions.copy()
    pbest_values = state.pbest_values.copy()
    rng_state = state.rng.bit_generator.state

    following = step(state, sphere, SPHERE_CONFIG)
    assert np.array_equal(state.positions, positions)
    assert np.array_equal(state.pbest_values, pbest_values)
    assert state.rng.bit_generator.state == rng_state
    assert following.iteration == state.iteration + 1

    again = step(state, sphere, SPHERE_CONFIG)
    assert np.array_equal(again.positions, following.positions)


def test_step_invariants():
    config = PsoConfig(swarm_size=20, bounds=uniform_bounds(3, -1.0, 2.0), seed=4)
    state = init_swarm(sphere, config)
    for _ in range(50):
        following = step(state, sphere, config)
        assert np.all(following.positions >= -1.0)
        assert np.all(following.positions <= 2.0)
        assert np.all(following.pbest_values <= state.pbest_values)
        assert following.gbest_value == np.min(following.pbest_values)
        assert following.gbest_value <= state.gbest_value
        state = following


def test_non_finite_fitness():
    with pytest.raises(FitnessError) as exc:
        pso_minimize(lambda position: float('nan'), SPHERE_CONFIG)
    assert str(exc.value) == 'Non-finite fitness nan for particle 0 at iteration 0'
    assert exc.value.particle == 0
    assert exc.value.iteration == 0


###############################################################################
# Tests for pso_minimize()
#

def test_sphere_convergence():
    result = pso_minimize(sphere, SPHERE_CONFIG)
    assert result.value < 1e-8
    assert sphere(result.position) == result.value
    assert np.all(np.abs(result.position) < 1e-3)


def test_sphere_calibration_over_seeds():
    for seed in range(20):
        assert pso_minimize(sphere, SPHERE_CONFIG.with_seed(seed)).value < 1e-6


@pytest.mark.slow
@pytest.mark.parametrize('dimension', [2, 4, 8])
def test_sphere_calibration_at_default_settings(dimension):
    config = PsoConfig(max_iters=500, bounds=uniform_bounds(dimension, -5.0, 5.0))
    solved = sum(pso_minimize(sphere, config.with_seed(seed)).value < 1e-4 for seed in range(100))
    assert solved >= 95


def test_pso_deterministic():
    config = SPHERE_CONFIG.with_seed(17)
    first = pso_minimize(sphere, config)
    second = pso_minimize(sphere, config)
    assert np.array_equal(first.position, second.position)
    assert first.value == second.value
    assert first.diagnostics.history == second.diagnostics.history


def test_restarts_and_stall():
    config = PsoConfig(swarm_size=10, max_iters=100, restarts=2, stall_tolerance=(5, 1e-9),
                       bounds=uniform_bounds(2, 0.0, 1.0))
    result = pso_minimize(lambda position: 1.0, config)
    diagnostics = result.diagnostics
    assert diagnostics.iterations == [5, 5, 5]
    assert diagnostics.restart_values == [1.0, 1.0, 1.0]
    assert diagnostics.best_restart == 0
    assert diagnostics.evaluations == 10 * 6 * 3
    assert diagnostics.to_dict()['evaluations'] == 180


def test_best_restart_selected():
    config = PsoConfig(swarm_size=5, max_iters=3, restarts=3,
                       bounds=uniform_bounds(2, -5.0, 5.0), seed=8)
    result = pso_minimize(sphere, config)
    values = result.diagnostics.restart_values
    assert len(values) == 4
    assert result.value == min(values)
    assert result.diagnostics.best_restart == values.index(min(values))


def test_write_convergence_csv(tmp_path):
    result = pso_minimize(sphere, PsoConfig(swarm_size=5, max_iters=4, restarts=1,
                                            bounds=uniform_bounds(2, -1.0, 1.0)))
    path = tmp_path / 'convergence.csv'
    write_convergence_csv(result.diagnostics, str(path))
    lines = path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == 'restart,iteration,global_best_value'
    assert len(lines) == 1 + 2 * 5
    assert lines[1].startswith('0,0,')
    assert lines[-1].startswith('1,4,')


def test_sphere():
    assert sphere([1.0, 2.0]) == 5.0
    assert sphere(np.zeros(4)) == 0.0
