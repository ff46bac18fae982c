"""
Package providing the declarative experiment runner. A ScenarioConfig describes the full
pipeline of one identification experiment:

    integrate -> state noise -> derivative source -> dictionary -> trim to the valid range
    -> sparse solve per sub-system -> reconstruct -> metrics

run_scenario() produces one ResultRecord per replicate. Replicate r uses noise_seed + r and
solver_seed + r, so reruns are bitwise identical. Errors of the numerical modules are caught
per replicate and stored in the record; a sweep always yields a record per cell.

run_table() instantiates one of the predefined grids, runs both objectives per cell and
returns a TableResult for emit_table(). Cells run in parallel when LINFSINDY_THREADS > 1; the
outcome does not depend on the thread count.
"""

# Copyright (c) 2024 The linfsindy developers
# This is free software, released under the MIT License. Refer to linfsindy/LICENSE.


# system modules
from concurrent.futures import ThreadPoolExecutor
import logging
import os
from typing import List, Optional, Tuple

# third-party modules
import numpy as np

# linfsindy modules
from ..dictionary import DictionaryError, build_dictionary
from ..differentiation import DerivativeSeries, DifferentiationError, align_rows, \
    central_difference, measured_derivative, polynomial_derivative
from ..dynamics import MAX_SEED, DynamicsError, NoiseSpec, SystemSpec, Trajectory, \
    add_state_noise, integrate
from ..metrics import MetricsError, ResultRecord, rmse_per_dim, saturated_reconstruct, \
    std_per_dim
from ..misc_utils import plural
from ..pso import PsoConfig, PsoError
from ..sparse_regression import IdentifiedModel, ObjectiveKind, RegressionError, \
    SparseCoefficients, linf_lambda_sweep, linf_sparse_solve, stlsq

# own modules
from .config import ScenarioConfig, pso_to_dict
from .tables import TableResult, table_cells
from .types import ConfigError, DerivativeKind, HarnessError, TableId

logger = logging.getLogger(__name__)

# constants
THREADS_VARIABLE = 'LINFSINDY_THREADS'
MEASUREMENT_SEED_OFFSET = 2 ** 32

PIPELINE_ERRORS = (DynamicsError, DifferentiationError, DictionaryError, RegressionError,
                   PsoError, MetricsError, HarnessError, np.linalg.LinAlgError)


def worker_count() -> int:
    """Get the number of worker threads from the LINFSINDY_THREADS environment variable."""
    value = os.environ.get(THREADS_VARIABLE, '1')
    try:
        count = int(value)
    except ValueError as exc:
        raise ConfigError(f'{THREADS_VARIABLE}: "{value}" is not an integer') from exc
    if count < 1:
        raise ConfigError(f'{THREADS_VARIABLE}: expecting a positive integer, got {count}')
    return count


def derive_targets(config: ScenarioConfig, system: SystemSpec, truth: Trajectory,
                   replicate: int) -> Tuple[Trajectory, DerivativeSeries]:
    """Produce the observed states and the derivative series of a replicate. Measured
    derivatives are taken along the noise-free trajectory with their own noise stream."""
    noise_seed = (config.noise_seed + replicate) % (MAX_SEED + 1)
    observed = add_state_noise(truth, NoiseSpec(config.state_noise_sigma, noise_seed))

    source = config.derivative_source
    if source.kind is DerivativeKind.MEASURED_NOISY:
        seed = (noise_seed + MEASUREMENT_SEED_OFFSET) % (MAX_SEED + 1)
        series = measured_derivative(system, truth, NoiseSpec(source.sigma, seed))
    elif source.kind is DerivativeKind.CENTRAL_DIFFERENCE:
        series = central_difference(observed)
    else:
        series = polynomial_derivative(observed, source.window, source.degree)
    return observed, series


def identify_model(config: ScenarioConfig, states: Trajectory, series: DerivativeSeries,
                   solver_seed: int) -> IdentifiedModel:
    """Build the dictionary of the observed states and solve one sparse regression per
    sub-system with the configured objective. The L-infinity objective sweeps the lambda
    fractions unless lambda is fixed."""
    dictionary = build_dictionary(states.values, config.dictionary_degree)
    objective = config.objective
    coefficients: List[SparseCoefficients] = []
    for k in range(series.dimension):
        y = series.values[:, k]
        if objective.kind is ObjectiveKind.L2:
            coefficients.append(stlsq(dictionary.matrix, y, threshold=objective.threshold,
                                      max_iters=objective.max_iters,
                                      lam=objective.lam or 0.0))
            continue
        pso: PsoConfig = objective.pso.with_seed((solver_seed + k) % (MAX_SEED + 1))
        if objective.lam is None:
            coefficients.append(linf_lambda_sweep(dictionary.matrix, y,
                                                  fractions=objective.lam_fractions,
                                                  pso_config=pso, encoding=objective.encoding,
                                                  normalize_columns=objective.normalize_columns))
        else:
            coefficients.append(linf_sparse_solve(dictionary.matrix, y, lam=objective.lam,
                                                  pso_config=pso, encoding=objective.encoding,
                                                  normalize_columns=objective.normalize_columns))
    return IdentifiedModel(coefficients=coefficients, dictionary=dictionary.spec)


def _settings(config: ScenarioConfig) -> dict:
    source = config.derivative_source
    objective = config.objective
    settings = {'system': config.system.kind.value, 'dt': config.dt, 't_end': config.t_end,
                'recon_t_end': config.reconstruction_t_end, 'substeps': config.substeps,
                'derivative': source.kind.value, 'derivative_sigma': source.sigma,
                'derivative_window': source.window, 'derivative_degree': source.degree,
                'state_noise_sigma': config.state_noise_sigma,
                'dictionary_degree': config.dictionary_degree, 'lam': objective.lam}
    if objective.kind is ObjectiveKind.L2:
        settings.update({'threshold': objective.threshold, 'max_iters': objective.max_iters})
    else:
        pso = pso_to_dict(objective.pso)
        del pso['seed']
        settings.update({'lam_fractions': list(objective.lam_fractions),
                         'encoding': objective.encoding.value,
                         'normalize_columns': objective.normalize_columns, 'pso': pso})
    return settings


def _model_settings(settings: dict, model: IdentifiedModel) -> dict:
    """Extend the scenario settings by the lambda and swarm seed of every sub-system."""
    result = dict(settings, lam_used=[c.lam for c in model.coefficients])
    if model.objective_kind is ObjectiveKind.LINF:
        result['lam_fraction_used'] = [c.diagnostics.get('lambda_fraction')
                                       for c in model.coefficients]
        result['pso_seeds'] = [c.diagnostics['seed'] for c in model.coefficients]
    return result


def run_scenario(config: ScenarioConfig) -> List[ResultRecord]:
    """Run all replicates of the scenario and reply one record per replicate."""
    objective = config.objective.kind.value
    settings = _settings(config)

    def failed(replicate: int, seeds: dict, exc: Exception) -> ResultRecord:
        logger.warning('%s (%s) replicate %d failed: %s', config.scenario_id, objective,
                       replicate, exc)
        return ResultRecord(scenario_id=config.scenario_id, replicate=replicate,
                            objective=objective, settings=settings, seeds=seeds,
                            error=f'{type(exc).__name__}: {exc}')

    def seeds_of(replicate: int) -> dict:
        return {'noise_seed': (config.noise_seed + replicate) % (MAX_SEED + 1),
                'solver_seed': (config.solver_seed + replicate) % (MAX_SEED + 1)}

    try:
        system = config.system.create()
        truth_ident = integrate(system, config.ident_x0, config.dt, config.t_end,
                                config.substeps)
        truth_recon = integrate(system, config.recon_x0, config.dt, config.reconstruction_t_end,
                                config.substeps)
    except PIPELINE_ERRORS as exc:
        return [failed(r, seeds_of(r), exc) for r in range(config.replicates)]

    records = []
    for replicate in range(config.replicates):
        seeds = seeds_of(replicate)
        try:
            observed, series = derive_targets(config, system, truth_ident, replicate)
            states = align_rows(observed, series)
            model = identify_model(config, states, series, seeds['solver_seed'])
            recon, diverged = saturated_reconstruct(model.coefficients, model.dictionary,
                                                    config.recon_x0, config.dt,
                                                    config.reconstruction_t_end,
                                                    config.substeps)
            records.append(ResultRecord(
                scenario_id=config.scenario_id, replicate=replicate, objective=objective,
                rmse=tuple(rmse_per_dim(truth_recon, recon)),
                std=tuple(std_per_dim(truth_recon, recon)), diverged=diverged,
                settings=_model_settings(settings, model), seeds=seeds, model=model))
        except PIPELINE_ERRORS as exc:
            records.append(failed(replicate, seeds, exc))

    logger.info('%s (%s): %d replicates done', config.scenario_id, objective, len(records))
    return records


def run_scenarios(configs: List[ScenarioConfig],
                  workers: Optional[int] = None) -> List[ResultRecord]:
    """Run the scenarios, in parallel when more than one worker is configured, and reply the
    records in the order of the scenarios."""
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(configs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(run_scenario, configs))
    else:
        batches = [run_scenario(config) for config in configs]
    return [record for batch in batches for record in batch]


def run_table(table_id: TableId, replicates: int = 1, seed: int = 0,
              workers: Optional[int] = None, t_end: Optional[float] = None,
              recon_t_end: Optional[float] = None,
              pso: Optional[PsoConfig] = None) -> TableResult:
    """Run every cell of the predefined grid for both objectives."""
    cells = table_cells(table_id, replicates=replicates, seed=seed, t_end=t_end,
                        recon_t_end=recon_t_end, pso=pso)
    logger.info('table %d: %d %s, %d %s', table_id.value, len(cells), plural('cell', cells),
                replicates, plural('replicate', range(replicates)))
    records = run_scenarios([scenario for cell in cells for scenario in cell.scenarios], workers)
    return TableResult(table_id=table_id, cells=cells, records=records)
