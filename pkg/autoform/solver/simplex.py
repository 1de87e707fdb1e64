"""
Dense two-phase primal simplex.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x == b_eq,  lb <= x <= ub``.
Bounds are handled by substitution into non-negative variables: a finite
lower bound shifts the column, a column with only an upper bound is
reflected, a free column is split, and a finite upper bound becomes an
explicit row. Entering columns follow Dantzig's rule until the objective
stalls, then Bland's rule.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

logger = logging.getLogger("autoform.solver.simplex")

OPTIMALITY_TOL = 1e-8
PIVOT_TOL = 1e-9
FEASIBILITY_TOL = 1e-7
BLAND_AFTER = 1000


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL = "numerical"


@dataclass
class LPResult:
    status: LPStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    iterations: int = 0
    detail: str = ""


def _as_matrix(A, n: int) -> np.ndarray:
    if A is None:
        return np.zeros((0, n))
    return np.asarray(A, dtype=float).reshape(-1, n)


def _as_vector(b) -> np.ndarray:
    if b is None:
        return np.zeros(0)
    return np.asarray(b, dtype=float).reshape(-1)


def _substitution(lb: np.ndarray, ub: np.ndarray) -> Tuple[np.ndarray, np.ndarray, List[Tuple[int, float]]]:
    """Return (offset, M, upper rows) with x = offset + M y and y >= 0."""
    n = len(lb)
    offset = np.zeros(n)
    entries: List[List[Tuple[int, float]]] = []
    upper_rows: List[Tuple[int, float]] = []
    k = 0
    for j in range(n):
        lo, hi = lb[j], ub[j]
        if np.isfinite(lo):
            offset[j] = lo
            entries.append([(k, 1.0)])
            if np.isfinite(hi):
                upper_rows.append((k, hi - lo))
            k += 1
        elif np.isfinite(hi):
            offset[j] = hi
            entries.append([(k, -1.0)])
            k += 1
        else:
            entries.append([(k, 1.0), (k + 1, -1.0)])
            k += 2
    M = np.zeros((n, k))
    for j, cols in enumerate(entries):
        for col, sign in cols:
            M[j, col] = sign
    return offset, M, upper_rows


def _pivot(T: np.ndarray, row: int, col: int):
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    rhs = T[:-1, -1]
    rhs[np.abs(rhs) < 1e-12] = 0.0


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray, budget: int):
        self.T = T
        self.basis = basis
        self.budget = budget
        self.iterations = 0

    def iterate(self, eligible: np.ndarray) -> str:
        T, basis = self.T, self.basis
        bland = False
        best = T[-1, -1]
        stalled = 0
        while True:
            if self.iterations >= self.budget:
                return "limit"
            reduced = T[-1, :-1]
            candidates = np.where(eligible & (reduced < -OPTIMALITY_TOL))[0]
            if candidates.size == 0:
                return "optimal"
            col = candidates[0] if bland else candidates[np.argmin(reduced[candidates])]
            column = T[:-1, col]
            rows = np.where(column > PIVOT_TOL)[0]
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / column[rows]
            least = ratios.min()
            ties = rows[ratios <= least + 1e-12 * max(1.0, abs(least))]
            row = ties[np.argmin(basis[ties])] if bland else ties[0]
            _pivot(T, row, col)
            basis[row] = col
            self.iterations += 1
            if not np.all(np.isfinite(T)):
                return "numerical"
            if T[-1, -1] > best + 1e-12:
                best = T[-1, -1]
                stalled = 0
            else:
                stalled += 1
                if stalled >= BLAND_AFTER and not bland:
                    logger.debug(f"Objective stalled for {stalled} pivots, switching to Bland's rule")
                    bland = True


def solve_lp(
    c,
    A_ub=None,
    b_ub=None,
    A_eq=None,
    b_eq=None,
    lb=None,
    ub=None,
    max_iterations: int = 50000,
) -> LPResult:
    """
    Minimize a linear objective over a polyhedron.

    Args:
        c: Objective coefficients (length n)
        A_ub, b_ub: Rows of ``A_ub x <= b_ub``
        A_eq, b_eq: Rows of ``A_eq x == b_eq``
        lb, ub: Column bounds; ``-inf``/``inf`` for none (default 0 and inf)
        max_iterations: Pivot budget shared by both phases

    Returns:
        LPResult with status, primal point and objective value
    """
    c = np.asarray(c, dtype=float).reshape(-1)
    n = len(c)
    A_ub, b_ub = _as_matrix(A_ub, n), _as_vector(b_ub)
    A_eq, b_eq = _as_matrix(A_eq, n), _as_vector(b_eq)
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)

    if np.any(lb > ub + FEASIBILITY_TOL):
        return LPResult(LPStatus.INFEASIBLE, detail="empty column bounds")

    offset, M, upper_rows = _substitution(lb, ub)
    k = M.shape[1]
    c_std = M.T @ c
    rows_ub = [A_ub @ M]
    rhs_ub = [b_ub - A_ub @ offset]
    if upper_rows:
        bound_rows = np.zeros((len(upper_rows), k))
        for i, (col, _) in enumerate(upper_rows):
            bound_rows[i, col] = 1.0
        rows_ub.append(bound_rows)
        rhs_ub.append(np.array([cap for _, cap in upper_rows]))
    G = np.vstack(rows_ub) if rows_ub else np.zeros((0, k))
    h = np.concatenate(rhs_ub) if rhs_ub else np.zeros(0)
    E = A_eq @ M
    e = b_eq - A_eq @ offset

    m_ub, m_eq = G.shape[0], E.shape[0]
    m = m_ub + m_eq
    needs_artificial = [h[i] < 0 for i in range(m_ub)] + [True] * m_eq
    n_art = sum(needs_artificial)
    art_start = k + m_ub
    width = art_start + n_art

    T = np.zeros((m + 1, width + 1))
    basis = np.zeros(m, dtype=int)
    a = art_start
    for i in range(m):
        if i < m_ub:
            sign = -1.0 if h[i] < 0 else 1.0
            T[i, :k] = sign * G[i]
            T[i, k + i] = sign
            T[i, -1] = sign * h[i]
        else:
            row = E[i - m_ub]
            sign = -1.0 if e[i - m_ub] < 0 else 1.0
            T[i, :k] = sign * row
            T[i, -1] = sign * e[i - m_ub]
        if needs_artificial[i]:
            T[i, a] = 1.0
            basis[i] = a
            a += 1
        else:
            basis[i] = k + i

    tableau = _Tableau(T, basis, max_iterations)

    # phase 1: minimize the sum of artificials
    if n_art:
        T[-1, art_start:width] = 1.0
        for i in range(m):
            if basis[i] >= art_start:
                T[-1] -= T[i]
        outcome = tableau.iterate(np.ones(width, dtype=bool))
        if outcome == "limit":
            return LPResult(LPStatus.ITERATION_LIMIT, iterations=tableau.iterations)
        if outcome != "optimal":
            return LPResult(LPStatus.NUMERICAL, iterations=tableau.iterations, detail=f"phase 1 {outcome}")
        scale = max(1.0, float(np.max(np.abs(T[:-1, -1]), initial=0.0)))
        if -T[-1, -1] > FEASIBILITY_TOL * scale:
            return LPResult(LPStatus.INFEASIBLE, iterations=tableau.iterations)

        redundant = []
        for i in range(m):
            if basis[i] < art_start:
                continue
            candidates = np.where(np.abs(T[i, :art_start]) > PIVOT_TOL)[0]
            if candidates.size == 0:
                redundant.append(i)
                continue
            _pivot(T, i, candidates[0])
            basis[i] = candidates[0]
        keep = [i for i in range(m) if i not in redundant] + [m]
        T = T[keep][:, list(range(art_start)) + [width]]
        basis = basis[[i for i in range(m) if i not in redundant]]
        tableau.T, tableau.basis = T, basis

    # phase 2
    cost = np.concatenate([c_std, np.zeros(m_ub)])
    T[-1, :-1] = cost - cost[basis] @ T[:-1, :-1]
    T[-1, -1] = -(cost[basis] @ T[:-1, -1])
    outcome = tableau.iterate(np.ones(art_start, dtype=bool))
    if outcome == "limit":
        return LPResult(LPStatus.ITERATION_LIMIT, iterations=tableau.iterations)
    if outcome == "unbounded":
        return LPResult(LPStatus.UNBOUNDED, iterations=tableau.iterations)
    if outcome != "optimal":
        return LPResult(LPStatus.NUMERICAL, iterations=tableau.iterations, detail="phase 2 breakdown")

    y = np.zeros(art_start)
    y[tableau.basis] = tableau.T[:-1, -1]
    x = offset + M @ y[:k]
    return LPResult(LPStatus.OPTIMAL, x=x, objective=float(c @ x), iterations=tableau.iterations)
