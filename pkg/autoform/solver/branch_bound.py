"""Best-first branch-and-bound over the simplex relaxation."""

import heapq
import itertools
import logging
import math

import numpy as np

from autoform.solver.simplex import LPResult, LPStatus, solve_lp

logger = logging.getLogger("autoform.solver.branch_bound")

INTEGRALITY_TOL = 1e-6
PRUNE_TOL = 1e-9


def _most_fractional(x: np.ndarray, integer_mask: np.ndarray) -> int:
    """Column with the largest distance to an integer; lowest index wins ties. -1 if integral."""
    distance = np.where(integer_mask, np.abs(x - np.round(x)), -1.0)
    j = int(np.argmax(distance))
    return j if distance[j] > INTEGRALITY_TOL else -1


def branch_and_bound(
    c,
    A_ub,
    b_ub,
    A_eq,
    b_eq,
    lb,
    ub,
    integer_mask,
    max_nodes: int = 10000,
    max_iterations: int = 50000,
) -> LPResult:
    """
    Minimize with integrality on the masked columns.

    Nodes are explored in order of their relaxation bound. The root
    relaxation decides Unbounded and Infeasible outright.

    Returns:
        LPResult; ITERATION_LIMIT when the node budget runs out
    """
    integer_mask = np.asarray(integer_mask, dtype=bool)
    lb = np.asarray(lb, dtype=float).copy()
    ub = np.asarray(ub, dtype=float).copy()
    # integer columns can tighten fractional bounds right away
    lb[integer_mask] = np.ceil(lb[integer_mask] - INTEGRALITY_TOL)
    ub[integer_mask] = np.floor(ub[integer_mask] + INTEGRALITY_TOL)

    def relax(node_lb, node_ub) -> LPResult:
        return solve_lp(c, A_ub, b_ub, A_eq, b_eq, node_lb, node_ub, max_iterations)

    root = relax(lb, ub)
    if root.status is not LPStatus.OPTIMAL or not integer_mask.any():
        return root

    counter = itertools.count()
    heap = [(root.objective, next(counter), lb, ub, root.x)]
    incumbent = None
    best = math.inf
    explored = 0
    iterations = root.iterations

    while heap:
        bound, _, node_lb, node_ub, x = heapq.heappop(heap)
        if bound >= best - PRUNE_TOL:
            continue
        explored += 1
        if explored > max_nodes:
            logger.warning(f"Node limit {max_nodes} reached")
            return LPResult(LPStatus.ITERATION_LIMIT, iterations=iterations, detail="node limit")

        j = _most_fractional(x, integer_mask)
        if j < 0:
            incumbent = np.where(integer_mask, np.round(x), x)
            best = bound
            continue

        down_ub = node_ub.copy()
        down_ub[j] = math.floor(x[j])
        up_lb = node_lb.copy()
        up_lb[j] = math.ceil(x[j])
        for child_lb, child_ub in ((node_lb, down_ub), (up_lb, node_ub)):
            if child_lb[j] > child_ub[j]:
                continue
            child = relax(child_lb, child_ub)
            iterations += child.iterations
            if child.status is LPStatus.OPTIMAL:
                if child.objective < best - PRUNE_TOL:
                    heapq.heappush(heap, (child.objective, next(counter), child_lb, child_ub, child.x))
            elif child.status in (LPStatus.ITERATION_LIMIT, LPStatus.NUMERICAL):
                return child

    if incumbent is None:
        return LPResult(LPStatus.INFEASIBLE, iterations=iterations)
    logger.debug(f"Branch-and-bound explored {explored} nodes")
    c = np.asarray(c, dtype=float)
    return LPResult(LPStatus.OPTIMAL, x=incumbent, objective=float(c @ incumbent), iterations=iterations)
