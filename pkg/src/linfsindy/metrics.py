"""
Module providing the reconstruction of trajectories from identified models and the
reconstruction error indicators RMSE and STD per sub-system (state dimension).

The error signal is e = truth - recon. RMSE is sqrt(mean(e^2)) and STD is the population
standard deviation of e about its mean, so that rmse^2 = mean(e)^2 + std^2.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

# third-party modules
import numpy as np
import orjson

# linfsindy modules
from .dictionary import DictionarySpec
from .dynamics import DivergenceError, Trajectory, custom_system, integrate
from .misc_utils import assert_t, assert_t_optional
from .sparse_regression import IdentifiedModel, SparseCoefficients

logger = logging.getLogger(__name__)

# constants
SATURATION = 1e6
STD_SLACK = 1e-12


###############################################################################
# Types
#

class MetricsError(Exception):
    """An error occurred while reconstructing or comparing trajectories."""


@dataclass(frozen=True)
class ResultRecord:
    """Outcome of one replicate of one scenario for one objective. A record of a failed run
    carries the error message and empty indicator tuples."""
    scenario_id: str
    replicate: int
    objective: str
    rmse: Tuple[float, ...] = field(default=())
    std: Tuple[float, ...] = field(default=())
    diverged: bool = field(default=False)
    settings: Dict[str, Any] = field(default_factory=dict, compare=False)
    seeds: Dict[str, int] = field(default_factory=dict)
    error: Optional[str] = field(default=None)
    model: Optional[IdentifiedModel] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        assert_t(self.scenario_id, str)
        assert_t_optional(self.error, str)
        object.__setattr__(self, 'rmse', tuple(float(v) for v in self.rmse))
        object.__setattr__(self, 'std', tuple(float(v) for v in self.std))
        if len(self.rmse) != len(self.std):
            raise MetricsError(f'{len(self.rmse)} rmse values versus {len(self.std)} std values')
        for rmse, std in zip(self.rmse, self.std):
            if rmse < 0 or std < 0:
                raise MetricsError('rmse and std must be nonnegative')
            if std > rmse * (1.0 + 1e-9) + STD_SLACK:
                raise MetricsError(f'std {std} exceeds rmse {rmse}')

    @property
    def failed(self) -> bool:
        """Check whether the replicate ended with an error."""
        return self.error is not None

    def to_row(self, dimension: int) -> List[str]:
        """Get the CSV cells in the order of csv_header(dimension)."""
        def cells(values: Tuple[float, ...]) -> List[str]:
            return [repr(v) for v in values] if values else [''] * dimension

        return [self.scenario_id, str(self.replicate), self.objective, *cells(self.rmse),
                *cells(self.std), str(self.diverged).lower(),
                str(self.seeds.get('noise_seed', '')), str(self.seeds.get('solver_seed', '')),
                self.error or '',
                orjson.dumps(self.settings, option=orjson.OPT_SORT_KEYS).decode()]


@dataclass(frozen=True)
class AggregateResult:
    """Mean indicators over the successful replicates of one scenario and objective."""
    scenario_id: str
    objective: str
    rmse: Tuple[float, ...]
    std: Tuple[float, ...]
    replicates: int
    diverged_count: int
    error_count: int


###############################################################################
# Module functions
#

def csv_header(dimension: int) -> List[str]:
    """Get the stable ResultRecord CSV column order."""
    return ['scenario_id', 'replicate', 'objective',
            *[f'rmse_{k + 1}' for k in range(dimension)],
            *[f'std_{k + 1}' for k in range(dimension)],
            'diverged', 'noise_seed', 'solver_seed', 'error', 'settings']


def _xi_matrix(coeffs: Sequence[SparseCoefficients], dict_spec: DictionarySpec) -> np.ndarray:
    if len(coeffs) != dict_spec.dimension:
        raise MetricsError(f'{len(coeffs)} coefficient vectors for a {dict_spec.dimension}-'
                           'dimensional dictionary')
    for item in coeffs:
        if item.xi.shape[0] != dict_spec.size:
            raise MetricsError(f'coefficient vector of length {item.xi.shape[0]} does not match '
                               f'the {dict_spec.size} dictionary terms')
    return np.column_stack([item.xi for item in coeffs])


def model_rhs(coeffs: Sequence[SparseCoefficients], dict_spec: DictionarySpec):
    """Create the right-hand side x -> Xi^T theta(x) of the identified model. theta(x) is
    formed by the same multiplication chain as the dictionary matrix."""
    xi = _xi_matrix(coeffs, dict_spec)

    def rhs(state: np.ndarray) -> np.ndarray:
        return dict_spec.evaluate_row(state) @ xi

    return rhs


def reconstruct(coeffs: Sequence[SparseCoefficients], dict_spec: DictionarySpec,
                x0: Sequence[float], dt: float, t_end: float, substeps: int = 1,
                bound: float = math.inf) -> Trajectory:
    """Integrate the identified model dx/dt = Theta(x) xi with the package RK4 integrator.
    A DivergenceError propagates when the model blows up."""
    system = custom_system(model_rhs(coeffs, dict_spec), dict_spec.dimension)
    return integrate(system, x0, dt, t_end, substeps=substeps, bound=bound)


def reconstruct_model(model: IdentifiedModel, x0: Sequence[float], dt: float,
                      t_end: float) -> Trajectory:
    """Convenience wrapper of reconstruct() for an IdentifiedModel."""
    return reconstruct(model.coefficients, model.dictionary, x0, dt, t_end)


def saturated_reconstruct(coeffs: Sequence[SparseCoefficients], dict_spec: DictionarySpec,
                          x0: Sequence[float], dt: float, t_end: float,
                          substeps: int = 1) -> Tuple[Trajectory, bool]:
    """Reconstruct and keep the sweep total when the model diverges: the samples after the
    divergence are held at +/-SATURATION (the sign of the last finite sample) and everything is
    clipped to that range. Returns the trajectory and the diverged flag."""
    try:
        return reconstruct(coeffs, dict_spec, x0, dt, t_end, substeps, SATURATION), False
    except DivergenceError as exc:
        logger.warning('reconstruction diverged at step %d, saturating at %g', exc.step,
                       SATURATION)
        n = int(math.floor(t_end / dt + 1e-9)) + 1
        values = np.empty((n, dict_spec.dimension))
        values[:exc.step] = exc.partial
        last = exc.partial[-1]
        values[exc.step:] = np.where(last < 0, -SATURATION, SATURATION)
        values = np.clip(np.nan_to_num(values, nan=SATURATION), -SATURATION, SATURATION)
        return Trajectory(times=np.arange(n) * dt, values=values, dt=dt), True


def error_signal(truth: Trajectory, recon: Trajectory) -> np.ndarray:
    """Get the error signal truth - recon over the common prefix of both trajectories."""
    if not math.isclose(truth.dt, recon.dt, rel_tol=1e-12):
        raise MetricsError(f'trajectories differ in dt: {truth.dt} versus {recon.dt}')
    if truth.dimension != recon.dimension:
        raise MetricsError(f'trajectories differ in dimension: {truth.dimension} versus '
                           f'{recon.dimension}')
    n = min(len(truth), len(recon))
    if n == 0:
        raise MetricsError('trajectories have no samples in common')
    if len(truth) != len(recon):
        logger.warning('comparing %d samples, truncated from %d and %d', n, len(truth),
                       len(recon))
    return truth.values[:n] - recon.values[:n]


def rmse_per_dim(truth: Trajectory, recon: Trajectory) -> np.ndarray:
    """Root mean square of the error signal, per dimension."""
    err = error_signal(truth, recon)
    return np.sqrt(np.mean(err * err, axis=0))


def std_per_dim(truth: Trajectory, recon: Trajectory) -> np.ndarray:
    """Population standard deviation of the error signal about its mean, per dimension."""
    return np.std(error_signal(truth, recon), axis=0)


def mean_over_replicates(records: Iterable[ResultRecord]) -> List[AggregateResult]:
    """Average the indicators per (scenario, objective) over the replicates that succeeded.
    The aggregates follow the order of first appearance; when all replicates failed the
    indicators are NaN."""
    groups: Dict[Tuple[str, str], List[ResultRecord]] = {}
    for record in records:
        groups.setdefault((record.scenario_id, record.objective), []).append(record)

    result = []
    for (scenario_id, objective), members in groups.items():
        succeeded = [r for r in members if not r.failed]
        if succeeded:
            rmse = tuple(float(v) for v in np.mean([r.rmse for r in succeeded], axis=0))
            std = tuple(float(v) for v in np.mean([r.std for r in succeeded], axis=0))
        else:
            rmse = std = (math.nan,)
        result.append(AggregateResult(scenario_id=scenario_id, objective=objective, rmse=rmse,
                                      std=std, replicates=len(members),
                                      diverged_count=sum(r.diverged for r in members),
                                      error_count=len(members) - len(succeeded)))
    return result
