"""Tests for lowering formulations and the solve step."""

import itertools

import numpy as np
import pytest

from autoform.errors import LoweringError, NonLinearError, SchemaError
from autoform.model import Formulation
from autoform.solver import SolveStatus, SolverConfig, lower, lp_name, solve, solve_lp, solver_indicator, to_lp
from autoform.solver.simplex import LPStatus

KNAPSACK = {
    "parameters": {"n": 4, "value": [10, 13, 7, 8], "weight": [5, 6, 3, 4], "capacity": 10},
    "decision_variables": {
        "x": {"description": "item packed", "type": "GRB.BINARY", "iteration_space": "[i for i in range(n)]"},
    },
    "objective": {"max": "sum(value[i] * x[i] for i in range(n))"},
    "equality_constraints": {"null": None},
    "inequality_constraints": {"capacity": "sum(weight[i] * x[i] for i in range(n)) <= capacity"},
}

TRANSPORT = {
    "parameters": {"supply": [20, 30], "demand": [25, 25], "cost": [[4, 6], [5, 3]]},
    "decision_variables": {
        "ship": {"type": "GRB.CONTINUOUS", "iteration_space": "[(i, j) for i in range(2) for j in range(2)]"},
    },
    "objective": {"min": "sum(cost[i, j] * ship[i, j] for i in range(2) for j in range(2))"},
    "equality_constraints": {
        "supply": "sum(ship[i, j] for j in range(2)) == supply[i] for i in range(2)",
        "demand": "sum(ship[i, j] for i in range(2)) == demand[j] for j in range(2)",
    },
    "inequality_constraints": {"null": None},
}


def _lp(objective, inequalities, equalities=None, kind="GRB.CONTINUOUS"):
    return Formulation.from_dict({
        "parameters": {},
        "decision_variables": {"x": {"type": kind}, "y": {"type": kind}},
        "objective": objective,
        "equality_constraints": equalities or {"null": None},
        "inequality_constraints": inequalities,
    })


def test_lower_knapsack():
    """Columns follow declaration order and rows keep their entry name."""
    print("\n🧪 Testing lowering...")

    model = lower(Formulation.from_dict(KNAPSACK))
    assert [c.name for c in model.columns] == ["x[0]", "x[1]", "x[2]", "x[3]"], "Column order mismatch"
    assert model.objective == (10.0, 13.0, 7.0, 8.0), "Objective coefficients mismatch"
    assert len(model.rows) == 1, "Knapsack should lower to one row"
    row = model.rows[0]
    assert row.op == "<=" and row.rhs == 10.0, "Capacity row mismatch"
    assert row.entry == "capacity", "Row should remember its constraint entry"
    assert model.has_integers, "Binary columns are integral"

    print("✅ Lowering: PASSED")


def test_solve_knapsack():
    print("\n🧪 Testing branch-and-bound...")

    result = solve(lower(Formulation.from_dict(KNAPSACK)))
    assert result.status is SolveStatus.OPTIMAL, f"Expected Optimal, got {result.status}"
    assert result.objective_value == pytest.approx(21.0), f"Expected 21, got {result.objective_value}"
    assert result.assignment == {"x[0]": 0.0, "x[1]": 1.0, "x[2]": 0.0, "x[3]": 1.0}, "Unexpected item choice"
    assert solver_indicator(result) == 1, "Optimal solve should score 1"

    print("✅ Branch-and-bound: PASSED")


def test_solve_small_lp():
    f = _lp({"max": "3 * x + 2 * y"}, {"a": "x + y <= 4", "b": "x + 3 * y <= 6"})
    result = solve(lower(f))
    assert result.status is SolveStatus.OPTIMAL, "LP should solve"
    assert result.objective_value == pytest.approx(12.0), f"Expected 12, got {result.objective_value}"
    assert result.assignment["x"] == pytest.approx(4.0), "x should sit at its bound"


def test_redundant_equalities():
    """A balanced transport problem carries one redundant equality row."""
    print("\n🧪 Testing redundant equality rows...")

    model = lower(Formulation.from_dict(TRANSPORT))
    assert len(model.rows) == 4, "Each quantified equality grounds to two rows"
    result = solve(model)
    assert result.status is SolveStatus.OPTIMAL, f"Expected Optimal, got {result.status}"
    assert result.objective_value == pytest.approx(180.0), f"Expected 180, got {result.objective_value}"

    print("✅ Redundant equality rows: PASSED")


def test_infeasible_and_unbounded():
    infeasible = solve(lower(_lp({"min": "x + y"}, {"low": "x >= 5", "high": "x <= 3"})))
    assert infeasible.status is SolveStatus.INFEASIBLE, f"Expected Infeasible, got {infeasible.status}"
    assert infeasible.objective_value is None, "Infeasible results carry no objective"
    assert solver_indicator(infeasible) == 0, "Infeasible solve should score 0"

    unbounded = solve(lower(_lp({"max": "x + y"}, {"floor": "x >= 1"})))
    assert unbounded.status is SolveStatus.UNBOUNDED, f"Expected Unbounded, got {unbounded.status}"


def test_integer_rounding_of_relaxation():
    """Integer columns never report a fractional relaxation optimum."""
    f = _lp({"max": "x + y"}, {"a": "2 * x + 2 * y <= 7"}, kind="GRB.INTEGER")
    result = solve(lower(f))
    assert result.status is SolveStatus.OPTIMAL, "MILP should solve"
    assert result.objective_value == pytest.approx(3.0), f"Expected 3, got {result.objective_value}"
    assert all(float(v).is_integer() for v in result.assignment.values()), "Assignment should be integral"


def test_iteration_limit_scores_zero():
    f = _lp({"max": "x + y"}, {"a": "2 * x + 2 * y <= 7", "b": "x - y <= 0.5"}, kind="GRB.INTEGER")
    result = solve(lower(f), SolverConfig(max_nodes=1))
    if result.status is SolveStatus.ITERATION_LIMIT:
        assert solver_indicator(result) == 0, "Limits count as failures"
    else:
        assert result.status is SolveStatus.OPTIMAL, f"Unexpected status {result.status}"


def test_lowering_error_names_entry():
    """The failing constraint entry is named and the cause is kept."""
    f = _lp({"max": "x + y"}, {"fine": "x <= 3", "bad": "x * y <= 3"})
    with pytest.raises(LoweringError) as info:
        lower(f)
    assert info.value.entry == "bad", f"Expected entry 'bad', got {info.value.entry}"
    assert isinstance(info.value.cause, NonLinearError), "Cause should be the linearization error"

    wrong_relation = _lp({"max": "x"}, {"eq": "x + y == 3"})
    with pytest.raises(LoweringError) as info:
        lower(wrong_relation)
    assert isinstance(info.value.cause, SchemaError), "Equality in the inequality set is a schema error"


def test_lower_rejects_partial_formulation():
    with pytest.raises(LoweringError):
        lower(Formulation.from_dict(KNAPSACK).truncated(2))


def test_lp_export():
    print("\n🧪 Testing LP export...")

    text = to_lp(lower(Formulation.from_dict(KNAPSACK)), "knapsack")
    assert text.startswith("\\ Problem: knapsack\nMaximize\n"), "Header mismatch"
    assert " obj: 10 x(0) + 13 x(1) + 7 x(2) + 8 x(3)" in text, "Objective line mismatch"
    assert " capacity: 5 x(0) + 6 x(1) + 3 x(2) + 4 x(3) <= 10" in text, "Constraint line mismatch"
    assert "Binary\n x(0)\n" in text, "Binary section missing"
    assert text.endswith("End\n"), "LP file should end with End"

    print("✅ LP export: PASSED")


def test_lp_names():
    assert lp_name("ship[0,1]") == "ship(0.1)", "Indexed names should use parentheses"
    assert lp_name("2nd") == "_2nd", "Names may not start with a digit"


def test_solve_lp_directly():
    result = solve_lp([-1.0, -1.0], A_ub=[[1.0, 2.0], [3.0, 1.0]], b_ub=[4.0, 6.0], lb=[0.0, 0.0])
    assert result.status is LPStatus.OPTIMAL, "Simplex should find the vertex"
    assert result.objective == pytest.approx(-2.8), f"Expected -2.8, got {result.objective}"


def test_scipy_backend_agrees():
    pytest.importorskip("scipy")
    result = solve(lower(Formulation.from_dict(KNAPSACK)), SolverConfig(backend="scipy"))
    assert result.status is SolveStatus.OPTIMAL, "HiGHS should solve the knapsack"
    assert result.objective_value == pytest.approx(21.0), "Backends should agree"


def test_unknown_backend_rejected():
    with pytest.raises(SchemaError):
        SolverConfig(backend="gurobi")


def _vertex_optimum(c, A, b, upper):
    """Minimum of c.x over {A x <= b, 0 <= x <= upper} by enumerating basic solutions."""
    n = len(c)
    rows = [(np.array(a, dtype=float), float(r)) for a, r in zip(A, b)]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        rows += [(e, upper), (-e, 0.0)]
    G = np.array([r[0] for r in rows])
    h = np.array([r[1] for r in rows])
    best = None
    for active in itertools.combinations(range(len(rows)), n):
        M = G[list(active)]
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, h[list(active)])
        if np.all(G @ x <= h + 1e-9):
            value = float(np.dot(c, x))
            best = value if best is None else min(best, value)
    return best


def test_random_lps_match_vertex_enumeration():
    print("\n🧪 Testing simplex against vertex enumeration...")

    rng = np.random.default_rng(11)
    for case in range(20):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        c = rng.integers(-5, 6, size=n).astype(float)
        A = rng.integers(-3, 6, size=(m, n)).astype(float)
        b = rng.integers(1, 21, size=m).astype(float)
        result = solve_lp(c, A_ub=A, b_ub=b, lb=np.zeros(n), ub=np.full(n, 10.0))
        expected = _vertex_optimum(c, A, b, 10.0)
        assert result.status is LPStatus.OPTIMAL, f"Case {case}: expected Optimal, got {result.status}"
        assert abs(result.objective - expected) <= 1e-6 * max(1.0, abs(expected)), \
            f"Case {case}: simplex {result.objective} vs vertices {expected}"

    print("✅ Simplex against vertex enumeration: PASSED")


def test_random_milps_match_lattice_search():
    """Integer programs lowered from formulations agree with exhaustive search of the box."""
    print("\n🧪 Testing branch-and-bound against lattice search...")

    rng = np.random.default_rng(5)
    axis = np.arange(11.0)
    lattice = np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T
    for case in range(20):
        m = int(rng.integers(1, 3))
        c = rng.integers(-5, 6, size=3)
        A = rng.integers(-3, 6, size=(m, 3))
        b = rng.integers(1, 31, size=m)
        formulation = Formulation.from_dict({
            "parameters": {"n": 3, "m": m, "c": c.tolist(), "A": A.tolist(), "b": b.tolist()},
            "decision_variables": {
                "x": {"type": "GRB.INTEGER", "iteration_space": "[i for i in range(n)]", "upper_bound": 10},
            },
            "objective": {"min": "sum(c[i] * x[i] for i in range(n))"},
            "equality_constraints": {"null": None},
            "inequality_constraints": {"rows": "sum(A[r, i] * x[i] for i in range(n)) <= b[r] for r in range(m)"},
        })
        result = solve(lower(formulation))
        feasible = np.all(lattice @ A.T <= b, axis=1)
        expected = float(np.min(lattice[feasible] @ c))
        assert result.status is SolveStatus.OPTIMAL, f"Case {case}: expected Optimal, got {result.status}"
        assert result.objective_value == pytest.approx(expected, abs=1e-6), \
            f"Case {case}: branch-and-bound {result.objective_value} vs lattice {expected}"

    print("✅ Branch-and-bound against lattice search: PASSED")


def test_power_control_instance():
    """Minimum total power meeting a signal-to-interference target on every link."""
    cross = [[0.0, 0.1, 0.2], [0.1, 0.0, 0.1], [0.2, 0.1, 0.0]]
    gamma, noise = 2.0, 0.1
    formulation = Formulation.from_dict({
        "parameters": {"n": 3, "gain": [1.0, 1.0, 1.0], "cross": cross, "gamma": gamma, "noise": noise},
        "decision_variables": {
            "p": {"description": "transmit power", "type": "GRB.CONTINUOUS", "iteration_space": "[i for i in range(n)]"},
        },
        "objective": {"min": "sum(p[i] for i in range(n))"},
        "equality_constraints": {"null": None},
        "inequality_constraints": {
            "sinr": "gain[i] * p[i] - gamma * sum(cross[i, j] * p[j] for j in range(n)) >= gamma * noise for i in range(n)",
        },
    })
    result = solve(lower(formulation))
    assert result.status is SolveStatus.OPTIMAL, f"Expected Optimal, got {result.status}"
    tight = np.linalg.solve(np.eye(3) - gamma * np.array(cross), np.full(3, gamma * noise))
    assert result.objective_value == pytest.approx(float(tight.sum()), rel=1e-6), "Every link should be tight"
