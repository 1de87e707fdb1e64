"""Tests for trivial-equivalence checks and candidate pruning."""

import dataclasses
import random

import numpy as np
import pytest

from autoform.equiv import (
    CanonicalSystem,
    Domain,
    EquivVerdict,
    Verdict,
    check_objective_equivalence,
    check_system_equivalence,
    combine_verdicts,
    prune_candidates,
    systems_differ_on,
)
from autoform.errors import DomainMismatch
from autoform.expr import LinearForm, VariableTable, ground, parse_expression, relation_to_linear, to_linear
from autoform.model import Formulation, ObjectiveSpec, Sense
from autoform.model.formulation import ConstraintKind, ConstraintSet, ParameterTable, variables_from_dict

PARAMS = ParameterTable.from_dict({"n": 2, "cap": 4, "w": [2, 3]})


def _table(kind="GRB.CONTINUOUS", upper=None):
    decls = {
        "x": {"type": kind, "iteration_space": None, "upper_bound": upper},
        "y": {"type": kind, "iteration_space": None, "upper_bound": upper},
        "z": {"type": kind, "iteration_space": "for i in range(n)", "upper_bound": upper},
    }
    return VariableTable.from_declarations(variables_from_dict(decls), PARAMS)


def _form(text, table):
    return to_linear(parse_expression(text), PARAMS, table)


def _system(texts, table):
    forms = []
    for text in texts:
        for grounded in ground(parse_expression(text), PARAMS):
            forms.append(relation_to_linear(grounded, PARAMS, table))
    return CanonicalSystem.from_relations(forms)


def test_objective_reordering_is_equivalent():
    """Reordered and parameter-substituted objectives are the same affine form."""
    print("\n🧪 Testing objective equivalence...")

    table = _table()
    domain = Domain.from_table(table)
    verdict = check_objective_equivalence(
        _form("2 * x + 3 * y", table), _form("y * 3 + x * w[0]", table), domain
    )
    assert verdict.verdict is Verdict.EQUIVALENT, f"Expected Equivalent, got {verdict}"

    print("✅ Objective equivalence: PASSED")


def test_objective_difference_has_witness():
    table = _table()
    domain = Domain.from_table(table)
    f1, f2 = _form("2 * x + 3 * y", table), _form("2 * x + 4 * y", table)
    verdict = check_objective_equivalence(f1, f2, domain)
    assert verdict.verdict is Verdict.DISTINCT, "Different coefficients should be Distinct"
    assert f1.value_at(verdict.witness) != f2.value_at(verdict.witness), "Witness should separate the objectives"
    assert domain.contains(verdict.witness), "Witness should respect the bounds"


def test_scaled_inequalities_are_equivalent():
    """Positive scaling and side swaps canonicalize to the same system."""
    table = _table()
    domain = Domain.from_table(table)
    s1 = _system(["x + y <= cap", "z[i] >= 1 for i in range(n)"], table)
    s2 = _system(["1 <= z[i] for i in range(n)", "2 * x + 2 * y <= 8"], table)
    verdict = check_system_equivalence(s1, s2, "inequality", domain)
    assert verdict.verdict is Verdict.EQUIVALENT, f"Expected Equivalent, got {verdict}"


def test_scaled_equalities_are_equivalent():
    """Equalities match under any nonzero scaling, including negative."""
    table = _table()
    domain = Domain.from_table(table)
    s1 = _system(["x - y == 1"], table)
    s2 = _system(["-3 * x + 3 * y == -3"], table)
    assert check_system_equivalence(s1, s2, "equality", domain).is_equivalent, "Negated scaling should match"


def test_redundant_row_is_equivalent():
    """A row implied by the others does not change the feasible set."""
    table = _table()
    domain = Domain.from_table(table)
    s1 = _system(["x <= 4", "x <= 5"], table)
    s2 = _system(["x <= 4"], table)
    assert check_system_equivalence(s1, s2, "inequality", domain).is_equivalent, "Redundant row should not matter"


def test_different_systems_have_separating_witness():
    print("\n🧪 Testing distinct systems...")

    table = _table()
    domain = Domain.from_table(table)
    s1 = _system(["x + y <= 4"], table)
    s2 = _system(["x + y <= 5"], table)
    verdict = check_system_equivalence(s1, s2, "inequality", domain)
    assert verdict.verdict is Verdict.DISTINCT, f"Expected Distinct, got {verdict}"
    assert systems_differ_on([verdict.witness], s1, s2), "Witness should satisfy exactly one system"

    print("✅ Distinct systems: PASSED")


def test_integer_relaxation_gap_is_unknown():
    """A gap that holds no lattice point is never reported as Equivalent or Distinct."""
    table = _table("GRB.INTEGER", upper=10)
    domain = Domain.from_table(table)
    s1 = _system(["x <= 4.5"], table)
    s2 = _system(["x <= 4"], table)
    verdict = check_system_equivalence(s1, s2, "inequality", domain)
    assert verdict.verdict is Verdict.UNKNOWN, f"Expected Unknown, got {verdict}"


def test_domain_mismatch():
    table = _table()
    domain = Domain.box(["x"])
    with pytest.raises(DomainMismatch):
        check_system_equivalence(_system(["x + y <= 1"], table), _system(["x <= 1"], table), "inequality", domain)


def _objective_candidate(base, expression):
    return dataclasses.replace(base, objective=ObjectiveSpec(Sense.MAX, expression), depth=2)


def test_prune_keeps_first_of_each_class():
    """Equivalent candidates collapse onto the earliest-generated member."""
    print("\n🧪 Testing pruning...")

    base = Formulation(
        parameters=PARAMS,
        variables=variables_from_dict({"x": {"type": "GRB.CONTINUOUS"}, "y": {"type": "GRB.CONTINUOUS"}}),
        depth=1,
    )
    candidates = [
        _objective_candidate(base, "2 * x + 3 * y"),
        _objective_candidate(base, "x + y"),
        _objective_candidate(base, "3 * y + w[0] * x"),
        _objective_candidate(base, "x * y"),
    ]
    result = prune_candidates(candidates, 2)
    assert result.retained == [0, 1, 3], f"Unexpected representatives {result.retained}"
    assert result.labels == [0, 1, 0, 3], f"Unexpected class labels {result.labels}"
    assert result.quarantined == [3], "Nonlinear candidate should be quarantined"
    assert result.retained_fraction == pytest.approx(0.75), "Retained fraction mismatch"

    print("✅ Pruning: PASSED")


def test_prune_inequality_sets_ignores_names_and_order():
    base = Formulation(
        parameters=PARAMS,
        variables=variables_from_dict({"x": {"type": "GRB.CONTINUOUS"}, "y": {"type": "GRB.CONTINUOUS"}}),
        objective=ObjectiveSpec(Sense.MAX, "x + y"),
        equalities=ConstraintSet.of(ConstraintKind.EQUALITY, {None: None}),
        depth=3,
    )

    def with_ineq(mapping):
        return dataclasses.replace(base, inequalities=ConstraintSet.of(ConstraintKind.INEQUALITY, mapping), depth=4)

    candidates = [
        with_ineq({"a": "x <= cap", "b": "y <= 2"}),
        with_ineq({"second": "2 * y <= 4", "first": "cap >= x"}),
        with_ineq({"a": "x <= cap"}),
    ]
    result = prune_candidates(candidates, 4)
    assert result.retained == [0, 2], f"Unexpected representatives {result.retained}"


def test_prune_rejects_stage_one():
    with pytest.raises(ValueError):
        prune_candidates([], 1)


def test_pruning_retains_one_member_per_class():
    """Ten objective samples from three classes keep three representatives."""
    base = Formulation(
        parameters=PARAMS,
        variables=variables_from_dict({"x": {"type": "GRB.CONTINUOUS"}, "y": {"type": "GRB.CONTINUOUS"}}),
        depth=1,
    )
    texts = [
        "x + y", "2 * x + 3 * y", "y + x", "x - y", "3 * y + w[0] * x",
        "1 * x + y", "-y + x", "w[0] * x + w[1] * y", "(x + y)", "x - 2 * y + y",
    ]
    candidates = [_objective_candidate(base, t) for t in texts]
    result = prune_candidates(candidates, 2)
    assert result.retained == [0, 1, 3], f"Unexpected representatives {result.retained}"
    assert 0.2 <= result.retained_fraction <= 0.4, f"Retained fraction {result.retained_fraction} out of range"

    table = _table()
    domain = Domain.from_table(table)
    forms = [_form(texts[i], table) for i in result.retained]
    for i in range(len(forms)):
        for j in range(i + 1, len(forms)):
            verdict = check_objective_equivalence(forms[i], forms[j], domain)
            assert verdict.verdict is Verdict.DISTINCT, f"Representatives {i} and {j} should be Distinct"


NAMES = ("x", "y", "z")
_FLIP = {"<=": ">=", ">=": "<=", "==": "=="}


def _random_rows(rng):
    rows = []
    for _ in range(rng.randint(1, 3)):
        coefs = [0, 0, 0]
        while not any(coefs):
            coefs = [rng.randint(-3, 3) for _ in NAMES]
        rows.append(([float(c) for c in coefs], float(rng.randint(-6, 6)), rng.choice(["<=", "<=", ">=", "=="])))
    return rows


def _scaled(rows, rng):
    out = []
    for coefs, rhs, op in rows:
        factor = rng.choice([0.5, 2.0, 4.0, -0.5, -2.0])
        out.append(([c * factor for c in coefs], rhs * factor, _FLIP[op] if factor < 0 else op))
    return out


def _with_redundant_row(rows, rng):
    upper = [(c, b) if op == "<=" else ([-v for v in c], -b) for c, b, op in rows if op != "=="]
    if len(upper) < 2:
        return rows + [rng.choice(rows)]
    (c1, b1), (c2, b2) = rng.sample(upper, 2)
    return rows + [([u + v for u, v in zip(c1, c2)], b1 + b2, "<=")]


def _perturbed(rows, rng):
    out = list(rows)
    i = rng.randrange(len(out))
    coefs, rhs, op = out[i]
    out[i] = (coefs, rhs + 1.0, op)
    return out


def _canonical(rows):
    forms = []
    for coefs, rhs, op in rows:
        forms.append((LinearForm({n: c for n, c in zip(NAMES, coefs) if c}, -rhs), op))
    return CanonicalSystem.from_relations(forms)


def _grid_membership(rows, points):
    inside = np.ones(len(points), dtype=bool)
    for coefs, rhs, op in rows:
        slack = points @ np.array(coefs) - rhs
        if op == "<=":
            inside &= slack <= 1e-9
        elif op == ">=":
            inside &= slack >= -1e-9
        else:
            inside &= np.abs(slack) <= 1e-9
    return inside


def test_verdicts_agree_with_grid_enumeration():
    """
    Random systems over three bounded variables against brute-force grid
    membership. Equivalent verdicts must agree on every grid point and
    Distinct verdicts must carry a separating point of the box.
    """
    print("\n🧪 Testing equivalence against grid enumeration...")

    rng = random.Random(7)
    axis = np.arange(-5.0, 5.0 + 1e-9, 0.25)
    points = np.array(np.meshgrid(axis, axis, axis, indexing="ij")).reshape(3, -1).T
    domain = Domain.box(NAMES, -5.0, 5.0)
    decided = {Verdict.EQUIVALENT: 0, Verdict.DISTINCT: 0}

    for case in range(200):
        base = _random_rows(rng)
        kind = case % 4
        if kind == 0:
            other = _scaled(base, rng)
        elif kind == 1:
            other = _scaled(base, rng)
            rng.shuffle(other)
        elif kind == 2:
            other = _with_redundant_row(base, rng)
        else:
            other = _perturbed(base, rng)

        s1, s2 = _canonical(base), _canonical(other)
        verdict = check_system_equivalence(s1, s2, "inequality", domain)
        assert verdict.verdict is not Verdict.UNKNOWN, f"Case {case}: continuous systems should be decided"
        decided[verdict.verdict] += 1
        if kind != 3:
            assert verdict.is_equivalent, f"Case {case}: rewritten system should be Equivalent, got {verdict}"
        if verdict.is_equivalent:
            same = np.array_equal(_grid_membership(base, points), _grid_membership(other, points))
            assert same, f"Case {case}: Equivalent systems disagree on the grid"
        else:
            assert domain.contains(verdict.witness), f"Case {case}: witness outside the box"
            assert systems_differ_on([verdict.witness], s1, s2), f"Case {case}: witness does not separate"

    assert decided[Verdict.DISTINCT] > 0, "Perturbed systems should produce Distinct verdicts"

    print("✅ Equivalence against grid enumeration: PASSED")


def test_canonicalization_is_idempotent():
    rng = random.Random(13)
    for case in range(200):
        rows = _random_rows(rng)
        if case % 2:
            rows = _scaled(rows, rng)
        system = _canonical(rows)
        again = CanonicalSystem.from_canonical(system.relations)
        assert again == system, f"Case {case}: re-canonicalizing changed {system.to_list()} into {again.to_list()}"


def _rewrite(rows, rng):
    kind = rng.randrange(4)
    if kind == 0:
        return _scaled(rows, rng)
    if kind == 1:
        out = _scaled(rows, rng)
        rng.shuffle(out)
        return out
    if kind == 2:
        return _with_redundant_row(rows, rng)
    return _perturbed(rows, rng)


def test_verdicts_are_symmetric_and_transitive():
    rng = random.Random(17)
    domain = Domain.box(NAMES, -5.0, 5.0)

    def verdict(a, b):
        return check_system_equivalence(_canonical(a), _canonical(b), "inequality", domain).verdict

    for case in range(150):
        a = _random_rows(rng)
        b = _rewrite(a, rng)
        c = _rewrite(b, rng)
        ab, bc, ac = verdict(a, b), verdict(b, c), verdict(a, c)
        assert ab is verdict(b, a), f"Case {case}: verdict should not depend on argument order"
        assert ac is verdict(c, a), f"Case {case}: verdict should not depend on argument order"
        if ab is Verdict.EQUIVALENT and bc is Verdict.EQUIVALENT:
            assert ac is Verdict.EQUIVALENT, f"Case {case}: equivalence should be transitive"
        if ab is Verdict.EQUIVALENT and bc is Verdict.DISTINCT:
            assert ac is Verdict.DISTINCT, f"Case {case}: a system equivalent to b stays distinct from c"


def test_combined_verdict_is_the_weakest():
    same = EquivVerdict.equivalent("identical")
    unsure = EquivVerdict.unknown("fractional witness")
    first = EquivVerdict.distinct({"x": 1.0}, "first")
    second = EquivVerdict.distinct({"x": 2.0}, "second")
    assert combine_verdicts([same, same]) is same, "All equivalent stays equivalent"
    assert combine_verdicts([same, unsure, same]) is unsure, "Unknown outranks equivalent"
    assert combine_verdicts([unsure, first, second]) is first, "First distinct component supplies the witness"
    assert combine_verdicts([]).is_equivalent, "Nothing to compare is equivalent"
