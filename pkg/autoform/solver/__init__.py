"""Lowering of formulations into LP/MILP models and the solve step."""

from .model import Column, ComputationalModel, Row, lower
from .lp_format import lp_name, to_lp
from .simplex import LPResult, LPStatus, solve_lp
from .branch_bound import branch_and_bound
from .solve import ScipyBackend, SolveResult, SolveStatus, SolverConfig, solve, solver_indicator

__all__ = [
    "Column",
    "ComputationalModel",
    "Row",
    "lower",
    "lp_name",
    "to_lp",
    "LPResult",
    "LPStatus",
    "solve_lp",
    "branch_and_bound",
    "ScipyBackend",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "solve",
    "solver_indicator",
]
