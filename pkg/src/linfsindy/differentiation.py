"""
Module providing the derivative estimate of sampled trajectories by three routes: a directly
measured derivative with additive noise, the central difference and local least-squares
polynomial interpolation (Savitzky-Golay). Endpoints without a full stencil are dropped rather
than filled with one-sided schemes, the valid_range bookkeeping tells the consumers which rows
of the source trajectory remain.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass
from typing import Tuple
from typing_extensions import Self

# third-party modules
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import savgol_coeffs

# linfsindy modules
from .dynamics import NoiseSpec, SystemSpec, Trajectory
from .misc_utils import as_float_matrix, as_float_vector

# constants
DEFAULT_WINDOW = 7
DEFAULT_DEGREE = 3


###############################################################################
# Types
#

class DifferentiationError(Exception):
    """An error occurred while estimating derivatives."""


class InsufficientDataError(DifferentiationError):
    """There are not enough samples (or no overlapping samples) for the requested operation."""


class DifferentiationConfigError(DifferentiationError, ValueError):
    """The differentiation parameters (window, degree) are invalid."""


@dataclass(frozen=True, eq=False)
class DerivativeSeries:
    """Estimated derivatives of a trajectory. The rows correspond with the source trajectory
    samples valid_range[0] up to and including valid_range[1]."""
    times: np.ndarray
    values: np.ndarray
    valid_range: Tuple[int, int]

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        times = as_float_vector(self.times, 'times', DifferentiationError)
        values = as_float_matrix(self.values, 'values', DifferentiationError)
        object.__setattr__(self, 'times', times)
        object.__setattr__(self, 'values', values)

        first, last = self.valid_range
        if first < 0 or last < first:
            raise DifferentiationError(f'invalid valid_range {self.valid_range}')
        if not len(times) == values.shape[0] == last - first + 1:
            raise DifferentiationError(f'{len(times)} time stamps and {values.shape[0]} rows do '
                                       f'not match valid_range {self.valid_range}')

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def dimension(self) -> int:
        """Get the number of state dimensions (columns)."""
        return self.values.shape[1]

    def restrict(self, first: int, last: int) -> Self:
        """Get the rows of the source samples first..last (inclusive), which must lie within
        the valid range."""
        own_first, own_last = self.valid_range
        if not own_first <= first <= last <= own_last:
            raise InsufficientDataError(f'range ({first}, {last}) is not within '
                                        f'{self.valid_range}')
        lo, hi = first - own_first, last - own_first + 1
        return DerivativeSeries(times=self.times[lo:hi].copy(), values=self.values[lo:hi].copy(),
                                valid_range=(first, last))


@dataclass(frozen=True, eq=False)
class ApproxErrorStats:
    """Per-dimension statistics of the derivative approximation error e = estimate - truth."""
    max_abs: np.ndarray
    mean: np.ndarray
    std: np.ndarray


###############################################################################
# Module functions
#

def align_rows(traj: Trajectory, series: DerivativeSeries) -> Trajectory:
    """Trim the trajectory to the rows covered by the valid range of the derivative series so
    that states and derivatives line up row by row."""
    first, last = series.valid_range
    if last >= len(traj):
        raise InsufficientDataError(f'valid_range {series.valid_range} exceeds the '
                                    f'{len(traj)} trajectory samples')
    return traj.slice(first, last)


def true_derivative(system: SystemSpec, traj: Trajectory) -> DerivativeSeries:
    """Evaluate the exact right-hand side at every sample of the trajectory."""
    return DerivativeSeries(times=traj.times.copy(), values=system.evaluate(traj.values),
                            valid_range=(0, len(traj) - 1))


def measured_derivative(system: SystemSpec, traj: Trajectory,
                        noise: NoiseSpec) -> DerivativeSeries:
    """Emulate a directly measured derivative: the true right-hand side at every sample plus
    independent N(0, sigma^2) measurement noise per entry."""
    exact = system.evaluate(traj.values)
    values = exact + noise.draw(exact.shape) if noise.sigma > 0 else exact
    return DerivativeSeries(times=traj.times.copy(), values=values,
                            valid_range=(0, len(traj) - 1))


def central_difference(traj: Trajectory) -> DerivativeSeries:
    """Second order central difference (x[i+1] - x[i-1]) / (2 dt) at the interior samples."""
    n = len(traj)
    if n < 3:
        raise InsufficientDataError(f'central difference requires at least 3 samples, got {n}')

    values = (traj.values[2:] - traj.values[:-2]) / (2.0 * traj.dt)
    return DerivativeSeries(times=traj.times[1:-1].copy(), values=values, valid_range=(1, n - 2))


def polynomial_derivative(traj: Trajectory, window: int = DEFAULT_WINDOW,
                          degree: int = DEFAULT_DEGREE) -> DerivativeSeries:
    """Fit a least-squares polynomial of the given degree to each centered window of samples
    (per dimension) and evaluate its analytic derivative at the window center."""
    n = len(traj)
    if not isinstance(window, int) or window < 1 or window % 2 == 0:
        raise DifferentiationConfigError(f'window must be a positive odd integer, got {window}')
    if not isinstance(degree, int) or degree < 1:
        raise DifferentiationConfigError(f'degree must be a positive integer, got {degree}')
    if degree >= window:
        raise DifferentiationConfigError(f'degree ({degree}) must be smaller than the window '
                                         f'({window})')
    if window > n:
        raise DifferentiationConfigError(f'window ({window}) exceeds the {n} available samples')

    # weights such that np.dot(weights, samples) gives the derivative at the window center
    weights = savgol_coeffs(window, degree, deriv=1, delta=traj.dt, use='dot')
    windows = sliding_window_view(traj.values, window, axis=0)  # (n - window + 1, d, window)
    values = windows @ weights

    half = (window - 1) // 2
    return DerivativeSeries(times=traj.times[half:n - half].copy(), values=values,
                            valid_range=(half, n - 1 - half))


def error_stats(est: DerivativeSeries, truth: DerivativeSeries) -> ApproxErrorStats:
    """Componentwise statistics of e = est - truth over the intersection of both valid ranges."""
    if est.dimension != truth.dimension:
        raise DifferentiationError(f'dimension mismatch: {est.dimension} versus '
                                   f'{truth.dimension}')
    first = max(est.valid_range[0], truth.valid_range[0])
    last = min(est.valid_range[1], truth.valid_range[1])
    if first > last:
        raise InsufficientDataError(f'valid ranges {est.valid_range} and {truth.valid_range} '
                                    'do not overlap')

    err = est.restrict(first, last).values - truth.restrict(first, last).values
    return ApproxErrorStats(max_abs=np.max(np.abs(err), axis=0), mean=np.mean(err, axis=0),
                            std=np.std(err, axis=0))
