"""Tests for the formulation schema, validation and problem records."""

import json
import random

import pytest

from autoform.errors import SchemaError
from autoform.harness import load_dataset
from autoform.model import (
    ConstraintKind,
    Formulation,
    ProblemDescription,
    ProblemType,
    Sense,
    VarKind,
    deserialize,
    serialize,
    validate,
)

KNAPSACK = {
    "parameters": {
        "num_items": {"value": 3, "comment": "number of items"},
        "weight": {"value": [4, 3, 2], "comment": "item weights"},
        "value": [5, 4, 3],
        "capacity": 6,
    },
    "decision_variables": {
        "x": {"description": "item packed", "type": "GRB.BINARY", "iteration_space": "[i for i in range(num_items)]"},
    },
    "objective": {"max": "sum(value[i] * x[i] for i in range(num_items))"},
    "equality_constraints": {"null": None},
    "inequality_constraints": {"capacity": "sum(weight[i] * x[i] for i in range(num_items)) <= capacity"},
}


def test_from_dict_reads_every_component():
    """A complete formulation exposes its parsed components."""
    print("\n🧪 Testing formulation schema...")

    f = Formulation.from_dict(KNAPSACK)
    assert f.is_complete, "Formulation without a depth marker should be complete"
    assert f.parameters.get("num_items").comment == "number of items", "Comment should be kept"
    assert f.parameters.get("value").value == (5.0, 4.0, 3.0), "Bare list parameter should normalize to a tuple"
    assert f.variables[0].var_kind is VarKind.BINARY, "GRB.BINARY alias should parse"
    assert f.objective.sense is Sense.MAX, "Objective sense mismatch"
    assert f.equalities.is_empty, "{null: null} should mean no equality constraints"
    assert f.inequalities.kind is ConstraintKind.INEQUALITY, "Inequality set kind mismatch"

    print("✅ Formulation schema: PASSED")


def test_serialization_is_stable():
    """serialize(deserialize(x)) reproduces the same canonical bytes."""
    first = serialize(Formulation.from_dict(KNAPSACK))
    second = serialize(deserialize(first))
    assert first == second, "Serialization should be a fixed point"
    assert set(json.loads(first)) == {
        "parameters", "decision_variables", "objective", "equality_constraints", "inequality_constraints"
    }, "Complete formulations serialize the five keys"


def test_partial_formulation_carries_depth():
    partial = Formulation.from_dict(KNAPSACK).truncated(2)
    data = partial.to_dict()
    assert data["depth"] == 2, "Partial formulations record their depth"
    assert "equality_constraints" not in data, "Components beyond the depth are omitted"
    assert deserialize(json.dumps(data)).objective == partial.objective, "Partial formulation should deserialize"


@pytest.mark.parametrize("mutate, path", [
    (lambda d: d.pop("objective"), "$.objective"),
    (lambda d: d.update(objective={"min": "x[0]", "max": "x[1]"}), "$.objective"),
    (lambda d: d.update(objective={"maximize": "x[0]"}), "$.objective"),
    (lambda d: d["decision_variables"]["x"].update(type="GRB.SEMICONT"), "$.decision_variables.x.type"),
    (lambda d: d["parameters"].update(weight="heavy"), "$.parameters.weight"),
])
def test_schema_errors_carry_json_path(mutate, path):
    data = json.loads(json.dumps(KNAPSACK))
    mutate(data)
    with pytest.raises(SchemaError) as info:
        Formulation.from_dict(data)
    assert info.value.path == path, f"Expected path {path}, got {info.value.path}"


def test_deserialize_rejects_invalid_json():
    with pytest.raises(SchemaError):
        deserialize(b"{not json")


def test_validate_accepts_well_formed_formulation():
    assert validate(Formulation.from_dict(KNAPSACK)) == [], "Knapsack formulation should be valid"


def test_validate_reports_structural_violations():
    """Violations are returned as data, sorted and deduplicated."""
    print("\n🧪 Testing validation...")

    data = json.loads(json.dumps(KNAPSACK))
    data["decision_variables"]["capacity"] = {"type": "GRB.CONTINUOUS", "lower_bound": 5, "upper_bound": 1}
    data["objective"] = {"max": "sum(value[i] * y[i] for i in range(num_items))"}
    data["inequality_constraints"] = {"capacity": "sum(weight[i] * x[i] for i in range(num_items)) == capacity"}
    violations = validate(Formulation.from_dict(data))
    rules = {(v.component, v.entry, v.rule) for v in violations}

    assert ("decision_variables", "capacity", "name shadows a parameter") in rules, "Shadowing not reported"
    assert ("decision_variables", "capacity", "lower bound exceeds upper bound") in rules, "Bad bounds not reported"
    assert ("objective", "max", "unresolved identifier y") in rules, "Unresolved objective name not reported"
    assert ("inequalities", "capacity", "relation must be <= or >=") in rules, "Wrong relation not reported"
    keys = [(v.component, v.entry or "", v.rule) for v in violations]
    assert keys == sorted(keys), "Violations should be sorted"

    print("✅ Validation: PASSED")


def test_validate_flags_comprehension_variables_as_bound():
    """Names bound by a for-clause are not unresolved identifiers."""
    data = json.loads(json.dumps(KNAPSACK))
    data["inequality_constraints"] = {"each": "x[i] <= 1 for i in range(num_items)"}
    assert validate(Formulation.from_dict(data)) == [], "Comprehension index should be in scope"


def _random_formulation(rng):
    """A random complete formulation in dict form, declaration order randomized."""
    parameters = {"n": rng.randint(1, 4), "cap": rng.choice([6, 2.5, 100]), "cost": [rng.randint(1, 9) for _ in range(4)]}
    if rng.random() < 0.5:
        parameters["note"] = {"value": rng.randint(0, 3), "comment": "spare constant"}
    variables = {
        "x": {"type": rng.choice(["GRB.CONTINUOUS", "GRB.INTEGER", "GRB.BINARY"]), "iteration_space": "for i in range(n)"},
        "y": {"type": rng.choice(["GRB.CONTINUOUS", "GRB.INTEGER"]), "iteration_space": None, "upper_bound": rng.choice([None, 8])},
    }
    if rng.random() < 0.5:
        variables["z"] = {"description": "slack", "type": "GRB.CONTINUOUS", "iteration_space": "[i for i in range(n)]"}
    objective = {rng.choice(["min", "max"]): rng.choice(["sum(cost[i] * x[i] for i in range(n)) + y", "2 * y - x[0]", "y"])}
    equalities = rng.choice([{"null": None}, {"balance": "x[0] == y"}])
    inequalities = {f"c{k}": rng.choice(["y <= cap", "x[i] <= 1 for i in range(n)", "x[0] + y >= 1"]) for k in range(rng.randint(1, 3))}
    return {
        "parameters": _shuffled(parameters, rng),
        "decision_variables": _shuffled(variables, rng),
        "objective": objective,
        "equality_constraints": equalities,
        "inequality_constraints": _shuffled(inequalities, rng),
    }


def _shuffled(mapping, rng):
    items = list(mapping.items())
    rng.shuffle(items)
    return dict(items)


def test_deserialize_inverts_serialize_on_random_formulations():
    rng = random.Random(23)
    for case in range(100):
        f = Formulation.from_dict(_random_formulation(rng))
        raw = serialize(f)
        assert deserialize(raw) == f, f"Case {case}: deserialize(serialize(f)) differs from f"
        assert serialize(deserialize(raw)) == raw, f"Case {case}: bytes changed on the second pass"


def test_validate_ignores_declaration_order():
    """Validation reports the same violations however the entries are ordered."""
    rng = random.Random(29)
    data = json.loads(json.dumps(KNAPSACK))
    data["parameters"]["n"] = 2
    data["parameters"]["dup"] = [1, 1]
    data["decision_variables"]["capacity"] = {"type": "GRB.CONTINUOUS", "lower_bound": 5, "upper_bound": 1}
    data["decision_variables"]["bad"] = {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(missing)"}
    data["decision_variables"]["loose"] = {"type": "GRB.CONTINUOUS", "iteration_space": "for i in dup"}
    data["decision_variables"]["twice"] = {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n) for j in range(n)"}
    data["objective"] = {"max": "sum(value[i] * y[i] for i in range(num_items))"}
    data["inequality_constraints"] = {
        "capacity": "sum(weight[i] * x[i] for i in range(num_items)) == capacity",
        "typo": "x[0] <= cpacity",
        "fine": "x[1] <= 1",
    }
    expected = validate(Formulation.from_dict(data))
    assert len(expected) >= 5, f"Expected several violations, got {expected}"
    assert any(v.entry == "loose" and "does not ground" in v.rule for v in expected), \
        "A grounding failure should name its own variable"

    for _ in range(20):
        shuffled = dict(data)
        for key in ("parameters", "decision_variables", "inequality_constraints"):
            shuffled[key] = _shuffled(data[key], rng)
        assert validate(Formulation.from_dict(shuffled)) == expected, "Violations should not depend on entry order"


def test_problem_description_labels():
    problem = ProblemDescription.from_dict(
        {"id": "p1", "description": "Pack a bag.", "ground_truth_objective": 7, "difficulty": "easy", "type": "IP"}
    )
    assert problem.ground_truth_objective == 7.0, "Ground truth should be a float"
    assert problem.problem_type is ProblemType.IP, "Type label mismatch"
    with pytest.raises(SchemaError):
        ProblemDescription.from_dict({"id": "p2", "description": "   "})
    with pytest.raises(SchemaError):
        ProblemDescription.from_dict({"id": "p3", "description": "x", "ground_truth_objective": "ten"})


def test_dataset_errors_report_line(tmp_path):
    path = tmp_path / "problems.jsonl"
    path.write_text(
        '{"id": "a", "description": "first", "ground_truth_objective": 1}\n'
        "\n"
        '{"id": "b", "description": "second", "ground_truth_objective": null}\n'
        '{"id": "a", "description": "duplicate"}\n',
        encoding="utf-8",
    )
    with pytest.raises(SchemaError) as info:
        load_dataset(path)
    assert info.value.line == 4, "Duplicate id should be reported on its line"


def test_packaged_micro_benchmark_loads():
    problems = load_dataset("data/benchmarks/micro.jsonl")
    assert len(problems) == 10, "Micro benchmark should hold 10 problems"
    assert all(p.ground_truth_objective is not None for p in problems), "Every micro problem has a ground truth"
