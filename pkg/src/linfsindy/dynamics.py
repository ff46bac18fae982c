"""
Module providing the benchmark ODE systems, a fixed-step classical Runge-Kutta integrator that
generates ground-truth trajectories and the additive Gaussian measurement noise channel.

Noise is drawn from numpy's PCG64 bit generator through Generator.standard_normal (ziggurat
transform). This choice is fixed package wide since table reproduction depends on it.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field
import enum
import logging
import math
from typing import Callable, Optional, Sequence, Tuple
from typing_extensions import Self

# third-party modules
import numpy as np

# linfsindy modules
from .misc_utils import as_float_matrix, as_float_vector, is_all_finite

logger = logging.getLogger(__name__)

# constants
LORENZ_PARAMETERS = (10.0, 28.0, 8.0 / 3.0)  # sigma, rho, beta
CHEN_PARAMETERS = (35.0, 3.0, 28.0)  # a, b, c
MAX_SEED = 2 ** 64 - 1
SPACING_RTOL = 1e-12

RhsFunction = Callable[[np.ndarray], np.ndarray]


###############################################################################
# Types
#

class DynamicsError(Exception):
    """An error occurred while defining, integrating or perturbing a dynamical system."""


class SystemSpecError(DynamicsError, ValueError):
    """The system specification or the arguments of an integration request are invalid."""


class DivergenceError(DynamicsError):
    """The integrated state became non-finite or left the permitted bound. The step index of the
    first offending sample and the samples integrated before it are attached."""

    def __init__(self, step: int, partial: np.ndarray):
        super().__init__(f'Integration diverged at step {step}')
        self.step = step
        self.partial = partial


class SystemKind(enum.Enum):
    """Enum to indicate the flavour of a dynamical system."""
    LORENZ = 'Lorenz'
    CHEN = 'Chen'
    CUSTOM = 'Custom'


@dataclass(frozen=True)
class SystemSpec:
    """Data class describing an autonomous ODE system dx/dt = rhs(x) of the given dimension."""
    kind: SystemKind
    dimension: int
    parameters: Tuple[float, ...]
    rhs: RhsFunction = field(compare=False)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not isinstance(self.kind, SystemKind):
            raise SystemSpecError(f'kind "{self.kind}" is not a SystemKind')
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise SystemSpecError(f'dimension must be a positive integer, got {self.dimension}')
        if not callable(self.rhs):
            raise SystemSpecError('rhs must be callable')
        if self.kind in (SystemKind.LORENZ, SystemKind.CHEN):
            if len(self.parameters) != 3:
                raise SystemSpecError(f'{self.kind.value} requires exactly 3 parameters, '
                                      f'got {len(self.parameters)}')
            if self.dimension != 3:
                raise SystemSpecError(f'{self.kind.value} is a 3-dimensional system')

    @property
    def name(self) -> str:
        """Get the human readable name of the system."""
        return self.kind.value

    def derivative(self, state: np.ndarray) -> np.ndarray:
        """Evaluate the right-hand side at a single state and check the output shape."""
        result = np.asarray(self.rhs(np.asarray(state, dtype=float)), dtype=float).reshape(-1)
        if result.shape != (self.dimension,):
            raise SystemSpecError(f'rhs returned shape {result.shape}, expecting '
                                  f'({self.dimension},)')
        return result

    def evaluate(self, values: np.ndarray) -> np.ndarray:
        """Evaluate the right-hand side at every row of an n x d matrix of states."""
        states = as_float_matrix(values, 'values', SystemSpecError)
        if states.shape[1] != self.dimension:
            raise SystemSpecError(f'states have {states.shape[1]} columns, expecting '
                                  f'{self.dimension}')
        return np.array([self.derivative(row) for row in states]).reshape(states.shape)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled multivariate time series (states or derivatives) with its time step."""
    times: np.ndarray
    values: np.ndarray
    dt: float

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        times = as_float_vector(self.times, 'times', DynamicsError)
        values = as_float_matrix(self.values, 'values', DynamicsError)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

        if not self.dt > 0:
            raise DynamicsError(f'dt must be positive, got {self.dt}')
        if values.shape[0] != times.shape[0]:
            raise DynamicsError(f'values has {values.shape[0]} rows while there are '
                                f'{times.shape[0]} time stamps')
        expected = times[0] + np.arange(times.shape[0]) * self.dt if times.size else times
        if not np.allclose(times, expected, rtol=SPACING_RTOL, atol=SPACING_RTOL * self.dt):
            raise DynamicsError(f'time stamps are not uniformly spaced with dt={self.dt}')

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def dimension(self) -> int:
        """Get the number of state dimensions (columns)."""
        return self.values.shape[1]

    def with_values(self, values: np.ndarray) -> Self:
        """Create a copy sharing the time axis but with other values of equal shape."""
        values = as_float_matrix(values, 'values', DynamicsError)
        if values.shape != self.values.shape:
            raise DynamicsError(f'shape {values.shape} differs from {self.values.shape}')
        return Trajectory(times=self.times.copy(), values=values, dt=self.dt)

    def slice(self, first: int, last: int) -> Self:
        """Get the contiguous sub-trajectory of the samples first..last (both inclusive)."""
        if not 0 <= first <= last < len(self):
            raise DynamicsError(f'slice ({first}, {last}) is out of range for {len(self)} samples')
        return Trajectory(times=self.times[first:last + 1].copy(),
                          values=self.values[first:last + 1].copy(), dt=self.dt)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive zero-mean Gaussian noise with standard deviation sigma, drawn from a seeded
    generator. A sigma of zero turns the noise channel into the identity map."""
    sigma: float = field(default=0.0)
    seed: int = field(default=0)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise DynamicsError(f'sigma must be a nonnegative real, got {self.sigma}')
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed <= MAX_SEED:
            raise DynamicsError(f'seed must be a 64-bit unsigned integer, got {self.seed}')

    def draw(self, shape: Tuple[int, ...]) -> np.ndarray:
        """Draw a block of noise of the specified shape."""
        if self.sigma == 0:
            return np.zeros(shape)
        rng = np.random.Generator(np.random.PCG64(int(self.seed)))
        return self.sigma * rng.standard_normal(shape)


###############################################################################
# System definitions
#

def lorenz_rhs(state: Sequence[float], params: Sequence[float] = LORENZ_PARAMETERS) -> np.ndarray:
    """Lorenz right-hand side (sigma(y-x), x(rho-z)-y, xy-beta z). Works on a single state or,
    row-wise, on an n x 3 matrix of states."""
    sigma, rho, beta = params
    s = np.asarray(state, dtype=float)
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    return np.stack([sigma * (y - x), x * (rho - z) - y, x * y - beta * z], axis=-1)


def chen_rhs(state: Sequence[float], params: Sequence[float] = CHEN_PARAMETERS) -> np.ndarray:
    """Chen right-hand side (a(y-x), (c-a)x + cy - xz, xy - bz)."""
    a, b, c = params
    s = np.asarray(state, dtype=float)
    x, y, z = s[..., 0], s[..., 1], s[..., 2]
    return np.stack([a * (y - x), (c - a) * x + c * y - x * z, x * y - b * z], axis=-1)


def lorenz_system(params: Sequence[float] = LORENZ_PARAMETERS) -> SystemSpec:
    """Create the Lorenz system specification (default sigma=10, rho=28, beta=8/3)."""
    params = tuple(float(p) for p in params)
    return SystemSpec(kind=SystemKind.LORENZ, dimension=3, parameters=params,
                      rhs=lambda state: lorenz_rhs(state, params))


def chen_system(params: Sequence[float] = CHEN_PARAMETERS) -> SystemSpec:
    """Create the Chen system specification (default a=35, b=3, c=28)."""
    params = tuple(float(p) for p in params)
    return SystemSpec(kind=SystemKind.CHEN, dimension=3, parameters=params,
                      rhs=lambda state: chen_rhs(state, params))


def custom_system(rhs: RhsFunction, dimension: int,
                  parameters: Sequence[float] = ()) -> SystemSpec:
    """Create a system specification around a user provided right-hand side."""
    return SystemSpec(kind=SystemKind.CUSTOM, dimension=dimension,
                      parameters=tuple(parameters), rhs=rhs)


def create_system(kind: SystemKind, parameters: Optional[Sequence[float]] = None) -> SystemSpec:
    """Create one of the named benchmark systems, with its default parameters unless specified."""
    if kind is SystemKind.LORENZ:
        return lorenz_system(LORENZ_PARAMETERS if parameters is None else parameters)
    if kind is SystemKind.CHEN:
        return chen_system(CHEN_PARAMETERS if parameters is None else parameters)
    raise SystemSpecError(f'Can not create a "{kind}" system without a right-hand side')


###############################################################################
# Module functions
#

def sample_count(dt: float, t_end: float) -> int:
    """Get the number of samples floor(t_end/dt)+1 on the grid 0, dt, 2dt, ... A relative slack
    absorbs representation error such as 50/0.01 landing just below 5000."""
    return int(math.floor(t_end / dt + 1e-9)) + 1


def rk4_step(rhs: RhsFunction, state: np.ndarray, h: float) -> np.ndarray:
    """Perform a single classical 4th-order Runge-Kutta step of size h."""
    k1 = rhs(state)
    k2 = rhs(state + 0.5 * h * k1)
    k3 = rhs(state + 0.5 * h * k2)
    k4 = rhs(state + h * k3)
    return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(system: SystemSpec, x0: Sequence[float], dt: float, t_end: float,
              substeps: int = 1, bound: float = math.inf) -> Trajectory:
    """Integrate the system from x0 with classical RK4 and return the samples at
    t = 0, dt, 2dt, ..., floor(t_end/dt)*dt. Each sampling interval is covered by `substeps`
    equal RK4 steps. A DivergenceError is raised as soon as a sample is non-finite or any of
    its components exceeds the bound in magnitude."""
    state = as_float_vector(x0, 'x0', SystemSpecError)
    if state.shape[0] != system.dimension:
        raise SystemSpecError(f'x0 has length {state.shape[0]}, expecting {system.dimension}')
    if not dt > 0:
        raise SystemSpecError(f'dt must be positive, got {dt}')
    if not t_end >= dt:
        raise SystemSpecError(f't_end ({t_end}) must be at least dt ({dt})')
    if not isinstance(substeps, int) or substeps < 1:
        raise SystemSpecError(f'substeps must be a positive integer, got {substeps}')

    n = sample_count(dt, t_end)
    h = dt / substeps
    values = np.empty((n, system.dimension))
    values[0] = state
    for i in range(1, n):
        for _ in range(substeps):
            state = rk4_step(system.derivative, state, h)
        if not is_all_finite(state) or np.max(np.abs(state)) > bound:
            logger.debug('%s integration diverged at step %d', system.name, i)
            raise DivergenceError(i, values[:i].copy())
        values[i] = state

    return Trajectory(times=np.arange(n) * dt, values=values, dt=dt)


def add_state_noise(traj: Trajectory, noise: NoiseSpec) -> Trajectory:
    """Perturb every entry of the trajectory values with an independent N(0, sigma^2) draw from
    the seeded generator. Times and dt are left untouched."""
    if noise.sigma == 0:
        return traj.with_values(traj.values.copy())
    return traj.with_values(traj.values + noise.draw(traj.values.shape))
