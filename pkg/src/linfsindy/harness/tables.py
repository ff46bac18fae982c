"""
Module providing the predefined experiment grids:
 - T1: Lorenz, measured derivatives with noise sigma in {0, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1}
   at dt=0.01;
 - T2: Lorenz, central difference with dt in {0.001, 0.0025, 0.005, 0.0075, 0.01, 0.02};
 - T3: Lorenz, central difference versus polynomial interpolation at dt=0.01;
 - T4/T5: Lorenz/Chen with state measurement noise, central difference,
   dt in {0.005, 0.01, 0.02} x nu in {0.01, 0.03, 0.05}.
Every cell is run for both objectives on identical data. The seeds of a cell derive from the
table seed and the cell coordinates only, so results do not depend on the execution order.

Copyright (c) 2024 The linfsindy developers
This is free software, released under the MIT License. Refer to linfsindy/LICENSE.
"""

# system modules
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

# third-party modules
import numpy as np

# linfsindy modules
from ..dynamics import SystemKind
from ..metrics import ResultRecord
from ..pso import PsoConfig
from ..sparse_regression import ObjectiveKind

# own modules
from .config import DerivativeSource, HARNESS_PSO, ObjectiveConfig, ScenarioConfig, SystemConfig
from .types import DerivativeKind, HarnessError, TableId

# constants
T1_SIGMAS = (0.0, 0.001, 0.005, 0.01, 0.05, 0.1, 0.5, 1.0)
T2_DTS = (0.001, 0.0025, 0.005, 0.0075, 0.01, 0.02)
T3_TECHNIQUES = (DerivativeKind.CENTRAL_DIFFERENCE, DerivativeKind.POLYNOMIAL_INTERP)
STATE_NOISE_DTS = (0.005, 0.01, 0.02)
STATE_NOISE_SIGMAS = (0.01, 0.03, 0.05)
OBJECTIVES = (ObjectiveKind.L2, ObjectiveKind.LINF)

CAPTIONS = {
    TableId.T1: 'Lorenz: reconstruction results for different derivative noise levels sigma',
    TableId.T2: 'Lorenz: reconstruction results for different dt (central difference)',
    TableId.T3: 'Lorenz: reconstruction results for different derivative approximations',
    TableId.T4: 'Lorenz: reconstruction results with state measurement noise nu '
                '(central difference)',
    TableId.T5: 'Chen: reconstruction results with state measurement noise nu '
                '(central difference)',
}


@dataclass(frozen=True)
class TableCell:
    """One row of a result table: its label, the swept coordinates and the scenario (per
    objective) to run."""
    table_id: TableId
    index: int
    label: str
    coordinates: Dict[str, float] = field(compare=False)
    scenarios: Tuple[ScenarioConfig, ...]

    @property
    def scenario_id(self) -> str:
        """Get the scenario id shared by the objectives of this cell."""
        return self.scenarios[0].scenario_id


def cell_seeds(table_id: TableId, index: int, seed: int) -> Tuple[int, int]:
    """Derive the (noise_seed, solver_seed) pair of a grid cell from the table seed and the
    cell coordinates."""
    state = np.random.SeedSequence(entropy=seed, spawn_key=(table_id.value, index))
    noise_seed, solver_seed = state.generate_state(2)
    return int(noise_seed), int(solver_seed)


def _coordinates(table_id: TableId) -> List[Tuple[str, Dict[str, float], dict]]:
    """Get (label, coordinates, scenario overrides) per row of the table."""
    rows = []
    if table_id is TableId.T1:
        for sigma in T1_SIGMAS:
            source = DerivativeSource(kind=DerivativeKind.MEASURED_NOISY, sigma=sigma)
            rows.append((f'sigma={sigma:g}', {'sigma': sigma}, {'derivative_source': source}))
    elif table_id is TableId.T2:
        for dt in T2_DTS:
            source = DerivativeSource(kind=DerivativeKind.CENTRAL_DIFFERENCE)
            rows.append((f'dt={dt:g}', {'dt': dt}, {'dt': dt, 'derivative_source': source}))
    elif table_id is TableId.T3:
        for technique in T3_TECHNIQUES:
            rows.append((technique.value, {}, {'derivative_source': DerivativeSource(technique)}))
    elif table_id in (TableId.T4, TableId.T5):
        system = SystemConfig(SystemKind.LORENZ if table_id is TableId.T4 else SystemKind.CHEN)
        source = DerivativeSource(kind=DerivativeKind.CENTRAL_DIFFERENCE)
        for dt in STATE_NOISE_DTS:
            for nu in STATE_NOISE_SIGMAS:
                rows.append((f'dt={dt:g}, nu={nu:g}', {'dt': dt, 'nu': nu},
                             {'system': system, 'dt': dt, 'state_noise_sigma': nu,
                              'derivative_source': source}))
    else:
        raise HarnessError(f'unknown table "{table_id}"')
    return rows


def table_cells(table_id: TableId, replicates: int = 1, seed: int = 0,
                t_end: Optional[float] = None, recon_t_end: Optional[float] = None,
                pso: Optional[PsoConfig] = None) -> List[TableCell]:
    """Instantiate the grid of the table. The horizons and the swarm settings may be overridden
    for shorter runs."""
    base = ScenarioConfig(replicates=replicates, recon_t_end=recon_t_end)
    if t_end is not None:
        base = replace(base, t_end=t_end)

    cells = []
    for index, (label, coordinates, overrides) in enumerate(_coordinates(table_id)):
        noise_seed, solver_seed = cell_seeds(table_id, index, seed)
        scenario = replace(base, scenario_id=f'T{table_id.value}:{label}', noise_seed=noise_seed,
                           solver_seed=solver_seed, **overrides)
        scenarios = tuple(scenario.with_objective(ObjectiveConfig(kind=kind,
                                                                  pso=pso or HARNESS_PSO))
                          for kind in OBJECTIVES)
        cells.append(TableCell(table_id=table_id, index=index, label=label,
                               coordinates=coordinates, scenarios=scenarios))
    return cells


@dataclass(frozen=True)
class TableResult:
    """The records of all replicates of all cells of a table run, in grid order."""
    table_id: TableId
    cells: List[TableCell]
    records: List[ResultRecord]

    @property
    def caption(self) -> str:
        """Get the table caption."""
        return CAPTIONS[self.table_id]

    def records_of(self, cell: TableCell) -> List[ResultRecord]:
        """Get the records that belong to the cell."""
        return [r for r in self.records if r.scenario_id == cell.scenario_id]
