from .analysis import (
    ConvergenceRow,
    ConvergenceTable,
    ExactSolution,
    GronwallReport,
    InvariantReport,
    OracleReference,
    StepBounds,
    TheoryConstants,
)
from .equation import EquationFamily, EquationSpec
from .grid import Grid, as_state, make_grid
from .solver import Guard, SolverConfig, SolverMethod, StepDiagnostics, StepFailure, TimeSeries

__all__ = [
    'ConvergenceRow', 'ConvergenceTable', 'ExactSolution', 'GronwallReport', 'InvariantReport',
    'OracleReference', 'StepBounds', 'TheoryConstants', 'EquationFamily', 'EquationSpec',
    'Grid', 'as_state', 'make_grid', 'Guard', 'SolverConfig', 'SolverMethod',
    'StepDiagnostics', 'StepFailure', 'TimeSeries',
]
