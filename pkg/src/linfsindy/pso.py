"""
Module providing a self-contained, seedable global-best particle swarm optimizer.

Each run executes restarts+1 independent swarms seeded with seed, seed+1, ... A swarm stops
early when its global best has not improved (relatively) for a configured number of
iterations; the restarts take over the exploration role. Updates are synchronous: all random
draws happen on the single-threaded update path, never inside fitness calls, so runs with equal
seeds are bitwise identical. Particles leaving the box are reflected back at the bounds.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
import copy
import csv
from dataclasses import dataclass, field, replace
import logging
import math
from typing import Callable, List, Optional, Sequence, Tuple
from typing_extensions import Self

# third-party modules
import numpy as np

logger = logging.getLogger(__name__)

# constants
MAX_SEED = 2 ** 64 - 1

Objective = Callable[[np.ndarray], float]
Bounds = Tuple[Tuple[float, float], ...]


###############################################################################
# Types
#

class PsoError(Exception):
    """An error occurred during particle swarm optimization."""


class PsoConfigError(PsoError, ValueError):
    """The particle swarm configuration is invalid."""


class FitnessError(PsoError):
    """The objective returned a non-finite value."""

    def __init__(self, particle: int, iteration: int, value: float):
        super().__init__(f'Non-finite fitness {value} for particle {particle} at iteration '
                         f'{iteration}')
        self.particle = particle
        self.iteration = iteration


@dataclass(frozen=True)
class PsoConfig:
    """Particle swarm hyperparameters. The bounds may be left unset by callers that derive the
    search box from their problem (see uniform_bounds() and with_bounds())."""
    swarm_size: int = field(default=50)
    max_iters: int = field(default=1000)
    inertia: float = field(default=0.72)
    cognitive: float = field(default=1.49)
    social: float = field(default=1.49)
    bounds: Optional[Bounds] = field(default=None)
    velocity_clamp: float = field(default=0.5)
    restarts: int = field(default=3)
    seed: int = field(default=0)
    stall_tolerance: Tuple[int, float] = field(default=(100, 1e-9))

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not isinstance(self.swarm_size, int) or self.swarm_size < 2:
            raise PsoConfigError(f'swarm_size must be an integer >= 2, got {self.swarm_size}')
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise PsoConfigError(f'max_iters must be a positive integer, got {self.max_iters}')
        if not 0 <= self.inertia <= 1.2:
            raise PsoConfigError(f'inertia must lie within [0, 1.2], got {self.inertia}')
        if self.cognitive < 0 or self.social < 0:
            raise PsoConfigError('cognitive and social coefficients must be nonnegative')
        if not 0 < self.velocity_clamp <= 1:
            raise PsoConfigError(f'velocity_clamp must lie within (0, 1], got '
                                 f'{self.velocity_clamp}')
        if not isinstance(self.restarts, int) or self.restarts < 0:
            raise PsoConfigError(f'restarts must be a nonnegative integer, got {self.restarts}')
        if not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise PsoConfigError(f'seed must be a 64-bit unsigned integer, got {self.seed}')
        stall_iters, stall_improvement = self.stall_tolerance
        if not isinstance(stall_iters, int) or stall_iters < 1 or stall_improvement < 0:
            raise PsoConfigError(f'invalid stall_tolerance {self.stall_tolerance}')
        if self.bounds is not None:
            object.__setattr__(self, 'bounds', tuple((float(lo), float(hi))
                                                     for lo, hi in self.bounds))
            for lo, hi in self.bounds:
                if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                    raise PsoConfigError(f'invalid bound ({lo}, {hi}): expecting lo < hi')

    @property
    def dimension(self) -> int:
        """Get the number of search coordinates D, which follows from the bounds."""
        if self.bounds is None:
            raise PsoConfigError('bounds are not configured')
        return len(self.bounds)

    def with_bounds(self, bounds: Bounds) -> Self:
        """Create a copy of this configuration with other bounds."""
        return replace(self, bounds=bounds)

    def with_seed(self, seed: int) -> Self:
        """Create a copy of this configuration with another seed."""
        return replace(self, seed=seed)


@dataclass(frozen=True, eq=False)
class SwarmState:
    """Complete state of one swarm between two synchronous update steps."""
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_values: np.ndarray
    gbest_position: np.ndarray
    gbest_value: float
    iteration: int
    rng: np.random.Generator = field(repr=False)


@dataclass
class PsoDiagnostics:
    """Convergence bookkeeping of a pso_minimize() run."""
    history: List[Tuple[int, int, float]] = field(default_factory=list)
    restart_values: List[float] = field(default_factory=list)
    iterations: List[int] = field(default_factory=list)
    evaluations: int = field(default=0)
    best_restart: int = field(default=0)

    def to_dict(self) -> dict:
        """Get a JSON friendly summary, without the full convergence history."""
        return {'restart_values': list(self.restart_values), 'iterations': list(self.iterations),
                'evaluations': self.evaluations, 'best_restart': self.best_restart}


@dataclass(frozen=True, eq=False)
class PsoResult:
    """Best position and value found across all restarts, with the run diagnostics."""
    position: np.ndarray
    value: float
    diagnostics: PsoDiagnostics


###############################################################################
# Module functions
#

def uniform_bounds(dimension: int, lo: float, hi: float) -> Bounds:
    """Create bounds with the same (lo, hi) interval for each of the coordinates."""
    return tuple((float(lo), float(hi)) for _ in range(dimension))


def _bounds_arrays(config: PsoConfig) -> Tuple[np.ndarray, np.ndarray]:
    if config.bounds is None:
        raise PsoConfigError('bounds are not configured')
    bounds = np.array(config.bounds, dtype=float)
    return bounds[:, 0], bounds[:, 1]


def _evaluate(objective: Objective, positions: np.ndarray, iteration: int) -> np.ndarray:
    values = np.empty(positions.shape[0])
    for particle, position in enumerate(positions):
        value = float(objective(position))
        if not math.isfinite(value):
            raise FitnessError(particle, iteration, value)
        values[particle] = value
    return values


def init_swarm(objective: Objective, config: PsoConfig, seed: Optional[int] = None) -> SwarmState:
    """Create a swarm with positions uniformly drawn inside the bounds and velocities uniformly
    drawn within the velocity clamp, and evaluate it."""
    lo, hi = _bounds_arrays(config)
    rng = np.random.Generator(np.random.PCG64(config.seed if seed is None else seed))
    vmax = config.velocity_clamp * (hi - lo)
    shape = (config.swarm_size, lo.shape[0])
    positions = lo + rng.random(shape) * (hi - lo)
    velocities = (2.0 * rng.random(shape) - 1.0) * vmax

    values = _evaluate(objective, positions, 0)
    best = int(np.argmin(values))
    return SwarmState(positions=positions, velocities=velocities,
                      pbest_positions=positions.copy(), pbest_values=values,
                      gbest_position=positions[best].copy(), gbest_value=float(values[best]),
                      iteration=0, rng=rng)


def reflect(positions: np.ndarray, velocities: np.ndarray, lo: np.ndarray,
            hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Reflect coordinates that left the box back inside and flip their velocity component."""
    below = positions < lo
    above = positions > hi
    positions = np.where(below, 2.0 * lo - positions, positions)
    positions = np.where(above, 2.0 * hi - positions, positions)
    velocities = np.where(below | above, -velocities, velocities)
    return np.clip(positions, lo, hi), velocities


def step(state: SwarmState, objective: Objective, config: PsoConfig) -> SwarmState:
    """Perform one synchronous swarm update:
    v <- inertia*v + cognitive*r1*(pbest - x) + social*r2*(gbest - x), clamped per coordinate;
    x <- x + v, reflected at the bounds; then personal and global bests are updated.
    The input state is left untouched."""
    lo, hi = _bounds_arrays(config)
    rng = copy.deepcopy(state.rng)
    vmax = config.velocity_clamp * (hi - lo)
    x = state.positions

    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    velocities = (config.inertia * state.velocities
                  + config.cognitive * r1 * (state.pbest_positions - x)
                  + config.social * r2 * (state.gbest_position - x))
    velocities = np.clip(velocities, -vmax, vmax)
    positions, velocities = reflect(x + velocities, velocities, lo, hi)

    iteration = state.iteration + 1
    values = _evaluate(objective, positions, iteration)
    improved = values < state.pbest_values
    pbest_positions = np.where(improved[:, None], positions, state.pbest_positions)
    pbest_values = np.where(improved, values, state.pbest_values)

    gbest_position, gbest_value = state.gbest_position, state.gbest_value
    best = int(np.argmin(pbest_values))
    if pbest_values[best] < gbest_value:
        gbest_position, gbest_value = pbest_positions[best].copy(), float(pbest_values[best])

    return SwarmState(positions=positions, velocities=velocities,
                      pbest_positions=pbest_positions, pbest_values=pbest_values,
                      gbest_position=gbest_position, gbest_value=gbest_value,
                      iteration=iteration, rng=rng)


def _run_swarm(objective: Objective, config: PsoConfig, restart: int,
               diagnostics: PsoDiagnostics) -> SwarmState:
    seed = (config.seed + restart) % (MAX_SEED + 1)
    state = init_swarm(objective, config, seed)
    diagnostics.evaluations += config.swarm_size
    diagnostics.history.append((restart, 0, state.gbest_value))

    stall_iters, stall_improvement = config.stall_tolerance
    reference, stalled = state.gbest_value, 0
    while state.iteration < config.max_iters:
        state = step(state, objective, config)
        diagnostics.evaluations += config.swarm_size
        diagnostics.history.append((restart, state.iteration, state.gbest_value))

        if reference - state.gbest_value > stall_improvement * abs(reference):
            reference, stalled = state.gbest_value, 0
        else:
            stalled += 1
            if stalled >= stall_iters:
                break

    logger.debug('PSO restart %d: value %.6g after %d iterations', restart, state.gbest_value,
                 state.iteration)
    return state


def pso_minimize(objective: Objective, config: PsoConfig) -> PsoResult:
    """Minimize the objective over the configured box with restarts+1 independent swarms and
    return the best (position, value) across restarts. Ties go to the earliest restart."""
    diagnostics = PsoDiagnostics()
    best_state: Optional[SwarmState] = None
    for restart in range(config.restarts + 1):
        state = _run_swarm(objective, config, restart, diagnostics)
        diagnostics.restart_values.append(state.gbest_value)
        diagnostics.iterations.append(state.iteration)
        if best_state is None or state.gbest_value < best_state.gbest_value:
            best_state = state
            diagnostics.best_restart = restart

    return PsoResult(position=best_state.gbest_position.copy(), value=best_state.gbest_value,
                     diagnostics=diagnostics)


def write_convergence_csv(diagnostics: PsoDiagnostics, path: str):
    """Write the convergence stream (restart, iteration, global_best_value) as CSV."""
    with open(path, 'w', newline='', encoding='utf-8') as file:
        writer = csv.writer(file)
        writer.writerow(['restart', 'iteration', 'global_best_value'])
        for restart, iteration, value in diagnostics.history:
            writer.writerow([restart, iteration, repr(float(value))])


def sphere(position: Sequence[float]) -> float:
    """The sphere function sum(v^2), global minimum 0 at the origin. Used for calibration."""
    v = np.asarray(position, dtype=float)
    return float(np.dot(v, v))
