"""
Module providing the declarative scenario configuration of the harness and its JSON form.

A configuration file holds either a single scenario object or {"scenarios": [...]}. Keys that
are absent take the defaults of the data classes below, so a minimal file only states what
differs. Writing uses sorted keys and a 2-space indent; reading and re-writing is idempotent.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple
from typing_extensions import Self

# third-party modules
import orjson

# linfsindy modules
from ..differentiation import DEFAULT_DEGREE, DEFAULT_WINDOW
from ..dynamics import MAX_SEED, SystemKind, SystemSpec, create_system
from ..pso import PsoConfig, PsoError
from ..serialization import ConfigReader, dumps_json
from ..sparse_regression import DEFAULT_LAMBDA_FRACTIONS, DEFAULT_STLSQ_ITERS, \
    DEFAULT_THRESHOLD, ObjectiveKind, SearchEncoding

# own modules
from .types import ConfigError, DerivativeKind

# constants
IDENT_X0 = (-8.0, 8.0, 27.0)
RECON_X0 = (1.0, 1.0, 1.0)
DEFAULT_DT = 0.01
DEFAULT_T_END = 50.0

# lighter than the PsoConfig defaults: table sweeps solve thousands of problems
HARNESS_PSO = PsoConfig(swarm_size=30, max_iters=300, restarts=1, stall_tolerance=(50, 1e-9))


###############################################################################
# Types
#

@dataclass(frozen=True)
class SystemConfig:
    """Selector of a named benchmark system with optional parameter override."""
    kind: SystemKind = field(default=SystemKind.LORENZ)
    parameters: Optional[Tuple[float, ...]] = field(default=None)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if self.kind not in (SystemKind.LORENZ, SystemKind.CHEN):
            raise ConfigError(f'system kind "{self.kind}" can not be configured')
        if self.parameters is not None:
            object.__setattr__(self, 'parameters', tuple(float(p) for p in self.parameters))
            if len(self.parameters) != 3:
                raise ConfigError(f'{self.kind.value} requires 3 parameters')

    def create(self) -> SystemSpec:
        """Create the system specification."""
        return create_system(self.kind, self.parameters)


@dataclass(frozen=True)
class DerivativeSource:
    """Where the regression targets come from: measured derivatives with noise sigma, the
    central difference or polynomial interpolation (window, degree) of the observed states."""
    kind: DerivativeKind = field(default=DerivativeKind.MEASURED_NOISY)
    sigma: float = field(default=0.0)
    window: int = field(default=DEFAULT_WINDOW)
    degree: int = field(default=DEFAULT_DEGREE)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        if not isinstance(self.kind, DerivativeKind):
            raise ConfigError(f'derivative source kind "{self.kind}" is invalid')
        if not self.sigma >= 0:
            raise ConfigError(f'derivative noise sigma must be nonnegative, got {self.sigma}')


@dataclass(frozen=True)
class ObjectiveConfig:
    """The sparse regression objective and the settings of its solver. An L-infinity objective
    without a fixed lam sweeps lam_fractions of ||y||_inf."""
    kind: ObjectiveKind = field(default=ObjectiveKind.L2)
    threshold: float = field(default=DEFAULT_THRESHOLD)
    max_iters: int = field(default=DEFAULT_STLSQ_ITERS)
    lam: Optional[float] = field(default=None)
    lam_fractions: Tuple[float, ...] = field(default=DEFAULT_LAMBDA_FRACTIONS)
    encoding: SearchEncoding = field(default=SearchEncoding.COEFFICIENTS)
    normalize_columns: bool = field(default=False)
    pso: PsoConfig = field(default=HARNESS_PSO)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        object.__setattr__(self, 'lam_fractions', tuple(float(f) for f in self.lam_fractions))
        if not isinstance(self.kind, ObjectiveKind):
            raise ConfigError(f'objective kind "{self.kind}" is invalid')
        if not isinstance(self.encoding, SearchEncoding):
            raise ConfigError(f'search encoding "{self.encoding}" is invalid')
        if not self.threshold > 0:
            raise ConfigError(f'threshold must be positive, got {self.threshold}')
        if self.lam is not None and self.lam < 0:
            raise ConfigError(f'lambda must be nonnegative, got {self.lam}')
        if not self.lam_fractions:
            raise ConfigError('lam_fractions can not be empty')
        if not all(f >= 0 for f in self.lam_fractions):
            raise ConfigError(f'lam_fractions must be nonnegative, got '
                              f'{list(self.lam_fractions)}')


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete, declarative description of one identification experiment."""
    scenario_id: str = field(default='scenario')
    system: SystemConfig = field(default_factory=SystemConfig)
    ident_x0: Tuple[float, ...] = field(default=IDENT_X0)
    recon_x0: Tuple[float, ...] = field(default=RECON_X0)
    dt: float = field(default=DEFAULT_DT)
    t_end: float = field(default=DEFAULT_T_END)
    recon_t_end: Optional[float] = field(default=None)
    substeps: int = field(default=1)
    derivative_source: DerivativeSource = field(default_factory=DerivativeSource)
    state_noise_sigma: float = field(default=0.0)
    objective: ObjectiveConfig = field(default_factory=ObjectiveConfig)
    dictionary_degree: int = field(default=2)
    noise_seed: int = field(default=0)
    solver_seed: int = field(default=0)
    replicates: int = field(default=1)

    def __post_init__(self):
        """Postcheck the constructed data class members on validity."""
        object.__setattr__(self, 'ident_x0', tuple(float(v) for v in self.ident_x0))
        object.__setattr__(self, 'recon_x0', tuple(float(v) for v in self.recon_x0))
        if not self.scenario_id:
            raise ConfigError('scenario_id can not be empty')
        if len(self.ident_x0) != 3 or len(self.recon_x0) != 3:
            raise ConfigError(f'{self.scenario_id}: initial states must have 3 components')
        if not self.dt > 0:
            raise ConfigError(f'{self.scenario_id}: dt must be positive, got {self.dt}')
        if not self.t_end >= self.dt:
            raise ConfigError(f'{self.scenario_id}: t_end ({self.t_end}) must be at least dt')
        if self.recon_t_end is not None and not self.recon_t_end >= self.dt:
            raise ConfigError(f'{self.scenario_id}: recon_t_end ({self.recon_t_end}) must be '
                              'at least dt')
        if not isinstance(self.substeps, int) or self.substeps < 1:
            raise ConfigError(f'{self.scenario_id}: substeps must be a positive integer')
        if not self.state_noise_sigma >= 0:
            raise ConfigError(f'{self.scenario_id}: state_noise_sigma must be nonnegative')
        if not isinstance(self.dictionary_degree, int) or self.dictionary_degree < 1:
            raise ConfigError(f'{self.scenario_id}: dictionary_degree must be a positive '
                              'integer')
        for name, seed in (('noise_seed', self.noise_seed), ('solver_seed', self.solver_seed)):
            if not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
                raise ConfigError(f'{self.scenario_id}: {name} must be a 64-bit unsigned '
                                  f'integer, got {seed}')
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError(f'{self.scenario_id}: replicates must be a positive integer')

    @property
    def reconstruction_t_end(self) -> float:
        """Get the reconstruction horizon, which defaults to the identification horizon."""
        return self.t_end if self.recon_t_end is None else self.recon_t_end

    def with_objective(self, objective: ObjectiveConfig) -> Self:
        """Create a copy of this scenario with another objective."""
        return replace(self, objective=objective)


###############################################################################
# JSON conversion
#

    """Convert the swarm settings into a JSON friendly dictionary."""
def pso_to_dict(pso: PsoConfig) -> dict:
    return {'swarm_size': pso.swarm_size, 'max_iters': pso.max_iters, 'inertia': pso.inertia,
            'cognitive': pso.cognitive, 'social': pso.social,
            'velocity_clamp': pso.velocity_clamp, 'restarts': pso.restarts, 'seed': pso.seed,
            'stall_tolerance': list(pso.stall_tolerance)}


def _pso_from_dict(element: dict, ctx: str) -> PsoConfig:
    elt = ConfigReader(element, ctx, ConfigError)
    stall = elt.get_list_value('stall_tolerance') if elt.has('stall_tolerance') else \
        list(HARNESS_PSO.stall_tolerance)
    if len(stall) != 2:
        raise ConfigError(f'{ctx}: stall_tolerance must hold [iterations, improvement]')
    try:
        return PsoConfig(swarm_size=elt.get_int_value('swarm_size', HARNESS_PSO.swarm_size),
                         max_iters=elt.get_int_value('max_iters', HARNESS_PSO.max_iters),
                         inertia=elt.get_float_value('inertia', HARNESS_PSO.inertia),
                         cognitive=elt.get_float_value('cognitive', HARNESS_PSO.cognitive),
                         social=elt.get_float_value('social', HARNESS_PSO.social),
                         velocity_clamp=elt.get_float_value('velocity_clamp',
                                                            HARNESS_PSO.velocity_clamp),
                         restarts=elt.get_int_value('restarts', HARNESS_PSO.restarts),
                         seed=elt.get_int_value('seed', HARNESS_PSO.seed),
                         stall_tolerance=(stall[0], float(stall[1])))
    except PsoError as exc:
        raise ConfigError(f'{ctx}: {exc}') from exc


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Convert the scenario configuration into a JSON friendly dictionary."""
    source = config.derivative_source
    objective = config.objective
    return {
        'scenario_id': config.scenario_id,
        'system': {'kind': config.system.kind.value,
                   'parameters': None if config.system.parameters is None
                   else list(config.system.parameters)},
        'ident_x0': list(config.ident_x0),
        'recon_x0': list(config.recon_x0),
        'dt': config.dt,
        't_end': config.t_end,
        'recon_t_end': config.recon_t_end,
        'substeps': config.substeps,
        'derivative_source': {'kind': source.kind.value, 'sigma': source.sigma,
                              'window': source.window, 'degree': source.degree},
        'state_noise_sigma': config.state_noise_sigma,
        'objective': {'kind': objective.kind.value, 'threshold': objective.threshold,
                      'max_iters': objective.max_iters, 'lam': objective.lam,
                      'lam_fractions': list(objective.lam_fractions),
                      'encoding': objective.encoding.value,
                      'normalize_columns': objective.normalize_columns,
                      'pso': pso_to_dict(objective.pso)},
        'dictionary_degree': config.dictionary_degree,
        'noise_seed': config.noise_seed,
        'solver_seed': config.solver_seed,
        'replicates': config.replicates}


def _enum_value(enum_type, value: str, ctx: str):
    try:
        return enum_type(value)
    except ValueError as exc:
        raise ConfigError(f'{ctx}: "{value}" is not one of '
                          f'{[item.value for item in enum_type]}') from exc


def scenario_from_dict(element: dict) -> ScenarioConfig:
    """Parse a scenario configuration; absent keys take their defaults."""
    elt = ConfigReader(element, 'scenario_from_dict', ConfigError)
    defaults = ScenarioConfig()

    system = SystemConfig()
    if elt.has('system'):
        sys_elt = ConfigReader(elt.get_dict_value('system'), 'scenario_from_dict.system',
                               ConfigError)
        system = SystemConfig(kind=_enum_value(SystemKind, sys_elt.get_str_value('kind'),
                                               'system.kind'),
                              parameters=sys_elt.get_float_list('parameters')
                              if sys_elt.has('parameters') else None)

    source = DerivativeSource()
    if elt.has('derivative_source'):
        src = ConfigReader(elt.get_dict_value('derivative_source'),
                           'scenario_from_dict.derivative_source', ConfigError)
        source = DerivativeSource(kind=_enum_value(DerivativeKind, src.get_str_value('kind'),
                                                   'derivative_source.kind'),
                                  sigma=src.get_float_value('sigma', 0.0),
                                  window=src.get_int_value('window', DEFAULT_WINDOW),
                                  degree=src.get_int_value('degree', DEFAULT_DEGREE))

    objective = ObjectiveConfig()
    if elt.has('objective'):
        obj = ConfigReader(elt.get_dict_value('objective'), 'scenario_from_dict.objective',
                           ConfigError)
        objective = ObjectiveConfig(
            kind=_enum_value(ObjectiveKind, obj.get_str_value('kind'), 'objective.kind'),
            threshold=obj.get_float_value('threshold', DEFAULT_THRESHOLD),
            max_iters=obj.get_int_value('max_iters', DEFAULT_STLSQ_ITERS),
            lam=obj.tryget_float_value('lam'),
            lam_fractions=tuple(obj.get_float_list('lam_fractions'))
            if obj.has('lam_fractions') else DEFAULT_LAMBDA_FRACTIONS,
            encoding=_enum_value(SearchEncoding, obj.get_str_value('encoding'),
                                 'objective.encoding')
            if obj.has('encoding') else SearchEncoding.COEFFICIENTS,
            normalize_columns=obj.get_bool_value('normalize_columns', False),
            pso=_pso_from_dict(obj.get_dict_value('pso'), 'scenario_from_dict.objective.pso')
            if obj.has('pso') else HARNESS_PSO)

    return ScenarioConfig(
        scenario_id=elt.get_str_value('scenario_id') if elt.has('scenario_id')
        else defaults.scenario_id,
        system=system,
        ident_x0=tuple(elt.get_float_list('ident_x0')) if elt.has('ident_x0') else IDENT_X0,
        recon_x0=tuple(elt.get_float_list('recon_x0')) if elt.has('recon_x0') else RECON_X0,
        dt=elt.get_float_value('dt', DEFAULT_DT),
        t_end=elt.get_float_value('t_end', DEFAULT_T_END),
        recon_t_end=elt.tryget_float_value('recon_t_end'),
        substeps=elt.get_int_value('substeps', 1),
        derivative_source=source,
        state_noise_sigma=elt.get_float_value('state_noise_sigma', 0.0),
        objective=objective,
        dictionary_degree=elt.get_int_value('dictionary_degree', 2),
        noise_seed=elt.get_int_value('noise_seed', 0),
        solver_seed=elt.get_int_value('solver_seed', 0),
        replicates=elt.get_int_value('replicates', 1))


def dumps_scenarios(configs: List[ScenarioConfig]) -> bytes:
    """Serialize scenarios as a configuration file contents."""
    return dumps_json({'scenarios': [scenario_to_dict(c) for c in configs]})


def loads_scenarios(content: bytes, origin: str = '<memory>') -> List[ScenarioConfig]:
    """Parse configuration file contents holding one scenario or a list of scenarios."""
    try:
        element = orjson.loads(content)
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f'{origin}: invalid JSON ({exc})') from exc

    if isinstance(element, dict) and 'scenarios' in element:
        elements = ConfigReader(element, origin, ConfigError).get_list_value('scenarios')
    else:
        elements = [element]
    if not elements:
        raise ConfigError(f'{origin}: no scenarios configured')
    return [scenario_from_dict(item) for item in elements]


def read_scenarios(path: str) -> List[ScenarioConfig]:
    """Read the scenarios of a JSON configuration file."""
    try:
        with open(path, 'rb') as file:
            return loads_scenarios(file.read(), path)
    except OSError as exc:
        raise ConfigError(f'{path}: {exc}') from exc


def write_scenarios(configs: List[ScenarioConfig], path: str):
    """Write scenarios to a JSON configuration file."""
    try:
        with open(path, 'wb') as file:
            file.write(dumps_scenarios(configs))
    except OSError as exc:
        raise ConfigError(f'{path}: {exc}') from exc
