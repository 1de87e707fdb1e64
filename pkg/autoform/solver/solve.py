"""
Solve step: computational model in, SolveResult out.

The built-in backend (simplex + branch-and-bound) is the default. A SciPy
HiGHS adapter can be selected in the solver config and reports results with
the same semantics.
"""

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from autoform.errors import SchemaError
from autoform.model.formulation import Sense
from autoform.solver.branch_bound import INTEGRALITY_TOL, branch_and_bound
from autoform.solver.model import ComputationalModel
from autoform.solver.simplex import LPStatus

logger = logging.getLogger("autoform.solver")

ROW_TOL = 1e-6
BACKENDS = ("builtin", "scipy")


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"
    ERROR = "Error"


@dataclass
class SolverConfig:
    backend: str = "builtin"
    max_iterations: int = 50000
    max_nodes: int = 10000

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise SchemaError(f"solver backend must be one of {BACKENDS}, got {self.backend!r}", "$.solver.backend")

    def to_dict(self) -> Dict[str, Any]:
        return {"backend": self.backend, "max_iterations": self.max_iterations, "max_nodes": self.max_nodes}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverConfig":
        return cls(**{k: v for k, v in (data or {}).items() if k in ("backend", "max_iterations", "max_nodes")})


@dataclass
class SolveResult:
    status: SolveStatus
    objective_value: Optional[float] = None
    assignment: Optional[Dict[str, float]] = None
    solve_time: float = 0.0
    detail: str = ""

    def to_dict(self, include_time: bool = True) -> Dict[str, Any]:
        data = {
            "status": self.status.value,
            "objective_value": self.objective_value,
            "assignment": self.assignment,
            "detail": self.detail,
        }
        if include_time:
            data["solve_time"] = self.solve_time
        return data


def solver_indicator(result: SolveResult) -> int:
    """1 when the model solved to optimality, else 0 (limits included)."""
    return 1 if result.status is SolveStatus.OPTIMAL else 0


def _arrays(model: ComputationalModel):
    n = len(model.columns)
    c = np.array(model.objective, dtype=float)
    if model.sense is Sense.MAX:
        c = -c
    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    for row in model.rows:
        dense = np.zeros(n)
        for j, coef in row.terms:
            dense[j] = coef
        if row.op == "==":
            eq_rows.append(dense)
            eq_rhs.append(row.rhs)
        elif row.op == "<=":
            ub_rows.append(dense)
            ub_rhs.append(row.rhs)
        else:
            ub_rows.append(-dense)
            ub_rhs.append(-row.rhs)
    lb = np.array([-np.inf if col.lower is None else col.lower for col in model.columns], dtype=float)
    ub = np.array([np.inf if col.upper is None else col.upper for col in model.columns], dtype=float)
    mask = np.array([col.is_integral for col in model.columns], dtype=bool)
    A_ub = np.array(ub_rows).reshape(-1, n)
    A_eq = np.array(eq_rows).reshape(-1, n)
    return c, A_ub, np.array(ub_rhs), A_eq, np.array(eq_rhs), lb, ub, mask


_LP_TO_SOLVE = {
    LPStatus.OPTIMAL: SolveStatus.OPTIMAL,
    LPStatus.INFEASIBLE: SolveStatus.INFEASIBLE,
    LPStatus.UNBOUNDED: SolveStatus.UNBOUNDED,
    LPStatus.ITERATION_LIMIT: SolveStatus.ITERATION_LIMIT,
    LPStatus.NUMERICAL: SolveStatus.ERROR,
}


def _solve_builtin(model: ComputationalModel, config: SolverConfig) -> Tuple[SolveStatus, Optional[np.ndarray], str]:
    c, A_ub, b_ub, A_eq, b_eq, lb, ub, mask = _arrays(model)
    result = branch_and_bound(
        c, A_ub, b_ub, A_eq, b_eq, lb, ub, mask,
        max_nodes=config.max_nodes,
        max_iterations=config.max_iterations,
    )
    return _LP_TO_SOLVE[result.status], result.x, result.detail


class ScipyBackend:
    """Adapter over ``scipy.optimize.milp`` (HiGHS)."""

    _STATUS = {
        0: SolveStatus.OPTIMAL,
        1: SolveStatus.ITERATION_LIMIT,
        2: SolveStatus.INFEASIBLE,
        3: SolveStatus.UNBOUNDED,
    }

    def __init__(self, config: SolverConfig):
        self.config = config
        self.logger = logging.getLogger("autoform.solver.scipy")

    def solve(self, model: ComputationalModel) -> Tuple[SolveStatus, Optional[np.ndarray], str]:
        try:
            from scipy.optimize import Bounds, LinearConstraint, milp
        except ImportError:
            return SolveStatus.ERROR, None, "scipy is not installed (pip install autoform[scipy])"

        c, A_ub, b_ub, A_eq, b_eq, lb, ub, mask = _arrays(model)
        constraints = []
        if A_ub.shape[0]:
            constraints.append(LinearConstraint(A_ub, -np.inf, b_ub))
        if A_eq.shape[0]:
            constraints.append(LinearConstraint(A_eq, b_eq, b_eq))
        res = milp(
            c,
            constraints=constraints,
            integrality=mask.astype(int),
            bounds=Bounds(lb, ub),
            options={"node_limit": self.config.max_nodes},
        )
        status = self._STATUS.get(res.status, SolveStatus.ERROR)
        self.logger.debug(f"HiGHS status {res.status}: {res.message}")
        return status, (np.asarray(res.x) if res.x is not None else None), str(res.message)


def _check_assignment(model: ComputationalModel, values: np.ndarray) -> Optional[str]:
    for i, row in enumerate(model.rows):
        activity = model.row_activity(row, values)
        tol = ROW_TOL * max(1.0, abs(row.rhs))
        if row.op == "<=" and activity > row.rhs + tol:
            return f"row {i} ({row.entry}) violated by {activity - row.rhs:.3g}"
        if row.op == ">=" and activity < row.rhs - tol:
            return f"row {i} ({row.entry}) violated by {row.rhs - activity:.3g}"
        if row.op == "==" and abs(activity - row.rhs) > tol:
            return f"row {i} ({row.entry}) violated by {abs(activity - row.rhs):.3g}"
    for j, col in enumerate(model.columns):
        if col.is_integral and abs(values[j] - round(values[j])) > INTEGRALITY_TOL:
            return f"column {col.name} is not integral"
    return None


def _constant_model(model: ComputationalModel) -> Tuple[SolveStatus, Optional[np.ndarray], str]:
    """Models without columns are feasible iff every constant row holds."""
    values = np.zeros(0)
    if _check_assignment(model, values) is not None:
        return SolveStatus.INFEASIBLE, None, ""
    return SolveStatus.OPTIMAL, values, ""


def solve(model: ComputationalModel, config: Optional[SolverConfig] = None) -> SolveResult:
    """
    Solve a computational model.

    Args:
        model: Lowered model
        config: Backend selection and iteration/node limits

    Returns:
        SolveResult; an Optimal result always carries an assignment that
        satisfies every row within 1e-6
    """
    config = config or SolverConfig()
    started = time.perf_counter()
    try:
        if not model.columns:
            status, x, detail = _constant_model(model)
        elif config.backend == "scipy":
            status, x, detail = ScipyBackend(config).solve(model)
        else:
            status, x, detail = _solve_builtin(model, config)
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as e:
        logger.error(f"Solver breakdown: {e}")
        status, x, detail = SolveStatus.ERROR, None, str(e)
    elapsed = time.perf_counter() - started

    if status is not SolveStatus.OPTIMAL:
        return SolveResult(status, solve_time=elapsed, detail=detail)
    if x is None:
        return SolveResult(SolveStatus.ERROR, solve_time=elapsed, detail="optimal status without a point")

    values = np.array([
        float(round(v)) if col.is_integral else float(v)
        for v, col in zip(x, model.columns)
    ])
    violation = _check_assignment(model, values)
    if violation is not None:
        logger.warning(f"Discarding optimal point: {violation}")
        return SolveResult(SolveStatus.ERROR, solve_time=elapsed, detail=violation)

    objective = float(sum(c * v for c, v in zip(model.objective, values))) + model.objective_constant
    if not math.isfinite(objective):
        return SolveResult(SolveStatus.ERROR, solve_time=elapsed, detail="non-finite objective")
    assignment = {col.name: float(v) + 0.0 for col, v in zip(model.columns, values)}
    return SolveResult(SolveStatus.OPTIMAL, objective + 0.0, assignment, elapsed, detail)
