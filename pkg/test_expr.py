"""Tests for the expression dialect: parsing, grounding, linearization, evaluation."""

import random

import pytest

from autoform.errors import GroundError, NonLinearError, ParseError
from autoform.expr import (
    Add,
    Comprehension,
    Div,
    Ident,
    Index,
    Mul,
    NameIterable,
    Neg,
    Number,
    Paren,
    QuantifiedRelation,
    RangeIterable,
    Relation,
    Sub,
    Sum,
    VariableTable,
    evaluate,
    ground,
    holds,
    parse_comprehensions,
    parse_expression,
    relation_to_linear,
    to_linear,
    unparse,
)
from autoform.model.formulation import ParameterTable, variables_from_dict


def _setup(params, variables):
    table = ParameterTable.from_dict(params)
    return table, VariableTable.from_declarations(variables_from_dict(variables), table)


def test_operator_precedence():
    """Multiplication binds tighter than addition and unparse round-trips the text."""
    print("\n🧪 Testing operator precedence...")

    node = parse_expression("a + b * c")
    assert isinstance(node, Add), "Top node should be an addition"
    assert node.left == Ident("a"), "Left operand should be a"
    assert isinstance(node.right, Mul), "Right operand should be the product"
    assert unparse(node) == "a + b * c", "Unparse should reproduce the text"

    print("✅ Operator precedence: PASSED")


def test_quantified_relation():
    """Trailing for-clauses produce a QuantifiedRelation."""
    print("\n🧪 Testing quantified relations...")

    node = parse_expression("x[i] <= cap[i] for i in range(n)")
    assert isinstance(node, QuantifiedRelation), "Trailing comprehension should quantify the relation"
    assert node.relation.op == "<=", "Relation operator mismatch"
    assert len(node.comps) == 1 and node.comps[0].var == "i", "Comprehension variable mismatch"

    plain = parse_expression("x + y == 4")
    assert isinstance(plain, Relation), "Relation without clauses should be a plain Relation"

    print("✅ Quantified relations: PASSED")


@pytest.mark.parametrize("text", ["x +* y", "x ** 2", "__import__('os')", "x < 3", ""])
def test_rejects_text_outside_grammar(text):
    """Anything outside the grammar is a ParseError and is never executed."""
    with pytest.raises(ParseError) as info:
        parse_expression(text)
    assert info.value.offset >= 0, "ParseError should carry a byte offset"


def test_iteration_space_list_comprehension_form():
    """Iteration spaces accept the bracketed list-comprehension phrasing."""
    comps = parse_comprehensions("[(i, j) for i in range(m) for j in range(n)]")
    assert [c.var for c in comps] == ["i", "j"], "Both for-clauses should be kept"


def test_ground_unrolls_comprehension():
    """A quantified relation grounds to one relation per binding."""
    print("\n🧪 Testing grounding...")

    params, _ = _setup({"n": 3, "cap": [1, 2, 3]}, {"x": {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n)"}})
    relations = ground(parse_expression("x[i] <= cap[i] for i in range(n)"), params)
    assert len(relations) == 3, "Expected one ground relation per index"

    point = {"x[0]": 1.0, "x[1]": 2.5, "x[2]": 3.0}
    flags = [holds(r, point, params) for r in relations]
    assert flags == [True, False, True], "Only the middle relation should be violated"

    print("✅ Grounding: PASSED")


def test_ground_rejects_unknown_iterable():
    params = ParameterTable.from_dict({"n": 2})
    with pytest.raises(GroundError):
        ground(parse_expression("x[i] >= 0 for i in missing"), params)


def test_ground_empty_range():
    """A range of zero length grounds to no relations."""
    params = ParameterTable.from_dict({"n": 0})
    assert ground(parse_expression("x[i] >= 0 for i in range(n)"), params) == [], "Empty range should ground to nothing"


def test_linear_coefficients():
    """Parameter substitution yields exact coefficients."""
    print("\n🧪 Testing linearization...")

    params, table = _setup(
        {"n": 3, "c": [1, 2, 3]},
        {
            "x": {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n)"},
            "y": {"type": "GRB.INTEGER", "iteration_space": None},
        },
    )
    form = to_linear(parse_expression("sum(c[i] * x[i] for i in range(n)) + 2 * y - y / 4 - 5"), params, table)
    assert form.coefficient("x[0]") == 1.0, "x[0] coefficient mismatch"
    assert form.coefficient("x[2]") == 3.0, "x[2] coefficient mismatch"
    assert form.coefficient("y") == pytest.approx(1.75), "y coefficient mismatch"
    assert form.constant == -5.0, "Constant term mismatch"

    print("✅ Linearization: PASSED")


def test_two_dimensional_parameters():
    params, table = _setup(
        {"cost": [[4, 6], [5, 3]]},
        {"ship": {"type": "GRB.CONTINUOUS", "iteration_space": "[(i, j) for i in range(2) for j in range(2)]"}},
    )
    form = to_linear(parse_expression("sum(cost[i, j] * ship[i, j] for i in range(2) for j in range(2))"), params, table)
    assert form.coefficients == {"ship[0,0]": 4.0, "ship[0,1]": 6.0, "ship[1,0]": 5.0, "ship[1,1]": 3.0}, \
        "Row-major coefficients mismatch"


def test_linear_agrees_with_evaluation():
    """to_linear and evaluate agree at a point for affine expressions."""
    params, table = _setup(
        {"n": 2, "w": [3, 0.5]},
        {"x": {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n)"}},
    )
    node = parse_expression("(sum(w[i] * x[i] for i in range(n)) - 4) / 2 + -x[1]")
    point = {"x[0]": 1.5, "x[1]": -2.0}
    assert to_linear(node, params, table).value_at(point) == pytest.approx(evaluate(node, point, params)), \
        "Linear form and numeric evaluation disagree"


def test_nonlinear_products_rejected():
    params, table = _setup({}, {"x": {"type": "GRB.CONTINUOUS"}, "y": {"type": "GRB.CONTINUOUS"}})
    with pytest.raises(NonLinearError):
        to_linear(parse_expression("x * y"), params, table)
    with pytest.raises(NonLinearError):
        to_linear(parse_expression("3 / x"), params, table)


def test_unresolved_names_and_indices():
    params, table = _setup({"n": 3}, {"x": {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n)"}})
    with pytest.raises(GroundError):
        to_linear(parse_expression("x[5]"), params, table)
    with pytest.raises(GroundError):
        to_linear(parse_expression("z + 1"), params, table)
    with pytest.raises(GroundError):
        to_linear(parse_expression("x + 1"), params, table)


def test_relation_to_linear_moves_terms_left():
    params, table = _setup({"cap": 10}, {"x": {"type": "GRB.CONTINUOUS"}, "y": {"type": "GRB.CONTINUOUS"}})
    form, op = relation_to_linear(parse_expression("2 * x + 3 >= y + cap"), params, table)
    assert op == ">=", "Operator should be preserved"
    assert form.coefficients == {"x": 2.0, "y": -1.0}, "Terms should read lhs - rhs"
    assert form.constant == -7.0, "Constant should be 3 - cap"


IDENTIFIERS = ("x", "y", "cap", "w_1", "Demand")
COMP_VARS = ("i", "j", "k")


def _gen_number(rng):
    return Number(rng.choice([0.0, 1.0, 2.5, 10.0, 0.125, 1e-05, 3e+20]))


def _gen_iterable(rng, depth):
    if rng.random() < 0.3:
        return NameIterable(rng.choice(IDENTIFIERS))
    stop = _gen_expr(rng, depth - 1)
    return RangeIterable(stop, _gen_expr(rng, depth - 1) if rng.random() < 0.5 else None)


def _gen_comps(rng, depth):
    return tuple(Comprehension(rng.choice(COMP_VARS), _gen_iterable(rng, depth)) for _ in range(rng.randint(1, 2)))


def _gen_factor(rng, depth):
    choice = rng.randrange(6) if depth > 0 else rng.randrange(2)
    if choice == 0:
        return _gen_number(rng)
    if choice == 1:
        return Ident(rng.choice(IDENTIFIERS + COMP_VARS))
    if choice == 2:
        return Index(rng.choice(IDENTIFIERS), tuple(_gen_expr(rng, depth - 1) for _ in range(rng.randint(1, 2))))
    if choice == 3:
        return Paren(_gen_expr(rng, depth - 1))
    if choice == 4:
        return Neg(_gen_factor(rng, depth - 1))
    return Sum(_gen_expr(rng, depth - 1), _gen_comps(rng, depth - 1))


def _gen_term(rng, depth):
    node = _gen_factor(rng, depth)
    for _ in range(rng.randint(0, 2)):
        node = rng.choice([Mul, Div])(node, _gen_factor(rng, depth))
    return node


def _gen_expr(rng, depth):
    """Random tree shaped like the grammar: left-associative chains, parentheses explicit."""
    node = _gen_term(rng, depth)
    for _ in range(rng.randint(0, 2)):
        node = rng.choice([Add, Sub])(node, _gen_term(rng, depth))
    return node


def _gen_relation(rng, depth):
    rel = Relation(_gen_expr(rng, depth), rng.choice(["==", "<=", ">="]), _gen_expr(rng, depth))
    if rng.random() < 0.4:
        return QuantifiedRelation(rel, _gen_comps(rng, depth))
    return rel


def test_parse_unparse_round_trip_on_generated_trees():
    """Every generated tree survives unparse then parse unchanged."""
    print("\n🧪 Testing generated round trips...")

    rng = random.Random(20240)
    for _ in range(300):
        node = _gen_expr(rng, 3) if rng.random() < 0.5 else _gen_relation(rng, 3)
        text = unparse(node)
        assert parse_expression(text) == node, f"Round trip changed {text!r}"

    print("✅ Generated round trips: PASSED")


FUZZ_TOKENS = (
    "x", "y[", "]", "(", ")", ",", "+", "-", "*", "/", "==", "<=", ">=", "=", "<",
    "sum(", "for", "in", "range(", "3", "2.5", "1e3", ".5", "@", "**", "import", "'a'", " ",
)


def test_fuzzed_text_parses_or_raises_parse_error():
    """Random token soup either parses or raises ParseError, never anything else."""
    rng = random.Random(7)
    parsed = 0
    for _ in range(500):
        text = " ".join(rng.choice(FUZZ_TOKENS) for _ in range(rng.randint(1, 8)))
        try:
            node = parse_expression(text)
        except ParseError as e:
            assert e.offset >= 0, f"Offset should be non-negative for {text!r}"
            continue
        parsed += 1
        assert parse_expression(unparse(node)) == node, f"Accepted text should round-trip: {text!r}"
    assert parsed > 0, "Some token sequences should be valid expressions"


AFFINE_PARAMS = {"n": 3, "k": 4, "w": [2, -1.5, 0.25]}
AFFINE_VARIABLES = {
    "x": {"type": "GRB.CONTINUOUS", "iteration_space": "for i in range(n)"},
    "y": {"type": "GRB.CONTINUOUS", "iteration_space": None},
}


def _gen_constant(rng):
    return rng.choice([Number(float(rng.randint(1, 9))), Number(0.5), Ident("k"), Index("w", (Number(float(rng.randrange(3))),))])


def _gen_affine(rng, depth):
    if depth == 0:
        leaf = rng.randrange(3)
        if leaf == 0:
            return _gen_constant(rng)
        if leaf == 1:
            return Ident("y")
        return Index("x", (Number(float(rng.randrange(3))),))
    choice = rng.randrange(7)
    if choice == 0:
        return Add(_gen_affine(rng, depth - 1), _gen_affine(rng, depth - 1))
    if choice == 1:
        return Sub(_gen_affine(rng, depth - 1), _gen_affine(rng, depth - 1))
    if choice == 2:
        return Neg(_gen_affine(rng, depth - 1))
    if choice == 3:
        inner = _gen_affine(rng, depth - 1)
        return Mul(_gen_constant(rng), inner) if rng.random() < 0.5 else Mul(inner, _gen_constant(rng))
    if choice == 4:
        return Div(_gen_affine(rng, depth - 1), _gen_constant(rng))
    if choice == 5:
        return Paren(_gen_affine(rng, depth - 1))
    body = Mul(Index("w", (Ident("i"),)), Index("x", (Ident("i"),)))
    return Sum(body, (Comprehension("i", RangeIterable(Ident("n"))),))


def test_linear_agrees_with_evaluation_on_random_affine_expressions():
    params, table = _setup(AFFINE_PARAMS, AFFINE_VARIABLES)
    instances = [name for info in table for name in info.instances()]
    rng = random.Random(11)
    for _ in range(200):
        node = _gen_affine(rng, rng.randint(1, 4))
        form = to_linear(node, params, table)
        for _ in range(3):
            point = {name: rng.uniform(-10.0, 10.0) for name in instances}
            assert form.value_at(point) == pytest.approx(evaluate(node, point, params), rel=1e-9, abs=1e-9), \
                f"Linear form and evaluation disagree on {unparse(node)}"
