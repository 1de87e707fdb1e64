"""
Affine forms over grounded decision-variable instances.

``to_linear`` extracts exact coefficients with parameter substitution and
``evaluate`` computes the same expression numerically; for affine input the
two agree.
"""

import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Mapping, Tuple, Union

from autoform.errors import EvalError, GroundError, NonLinearError
from autoform.expr.ast import (
    BinaryOp,
    Div,
    Expr,
    Ident,
    Index,
    Mul,
    Neg,
    Number,
    Paren,
    Relation,
    Sum,
    unparse,
)
from autoform.expr.ground import GroundRelation, Env, index_tuple, iterate_comprehensions
from autoform.expr.variables import VariableTable, instance_name

if TYPE_CHECKING:
    from autoform.model.formulation import ParameterTable

logger = logging.getLogger("autoform.expr.linear")

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class LinearForm:
    """sum(coefficients[v] * v) + constant"""
    coefficients: Mapping[str, float] = field(default_factory=dict)
    constant: float = 0.0

    @classmethod
    def of_constant(cls, value: float) -> "LinearForm":
        return cls({}, float(value))

    @classmethod
    def of_variable(cls, name: str, coefficient: float = 1.0) -> "LinearForm":
        return cls({name: float(coefficient)}, 0.0)

    @property
    def is_constant(self) -> bool:
        return not self.coefficients

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.coefficients)

    def normalized(self) -> "LinearForm":
        """Drop coefficients below the merge tolerance."""
        kept = {k: v for k, v in self.coefficients.items() if abs(v) >= ZERO_TOL}
        return LinearForm(kept, self.constant)

    def scale(self, factor: float) -> "LinearForm":
        return LinearForm({k: v * factor for k, v in self.coefficients.items()}, self.constant * factor).normalized()

    def __add__(self, other: "LinearForm") -> "LinearForm":
        merged: Dict[str, float] = dict(self.coefficients)
        for name, coef in other.coefficients.items():
            merged[name] = merged.get(name, 0.0) + coef
        return LinearForm(merged, self.constant + other.constant).normalized()

    def __neg__(self) -> "LinearForm":
        return self.scale(-1.0)

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def coefficient(self, name: str) -> float:
        return self.coefficients.get(name, 0.0)

    def value_at(self, assignment: Mapping[str, float]) -> float:
        try:
            return sum(c * assignment[v] for v, c in self.coefficients.items()) + self.constant
        except KeyError as e:
            raise EvalError(f"missing binding for {e.args[0]}") from e


class _Linearizer:
    """Recursive coefficient extraction with an index environment."""

    def __init__(self, params: "ParameterTable", variables: VariableTable):
        self.params = params
        self.variables = variables

    def visit(self, node: Expr, env: Env) -> LinearForm:
        if isinstance(node, Number):
            return LinearForm.of_constant(node.value)
        if isinstance(node, Ident):
            return self._ident(node, env)
        if isinstance(node, Index):
            return self._index(node, env)
        if isinstance(node, Neg):
            return -self.visit(node.operand, env)
        if isinstance(node, Paren):
            return self.visit(node.inner, env)
        if isinstance(node, Sum):
            total = LinearForm()
            for inner in iterate_comprehensions(node.comps, self.params, env):
                total = total + self.visit(node.body, inner)
            return total
        if isinstance(node, Mul):
            left, right = self.visit(node.left, env), self.visit(node.right, env)
            if left.is_constant:
                return right.scale(left.constant)
            if right.is_constant:
                return left.scale(right.constant)
            raise NonLinearError("product of decision variables", unparse(node))
        if isinstance(node, Div):
            numerator, denominator = self.visit(node.left, env), self.visit(node.right, env)
            if not denominator.is_constant:
                raise NonLinearError("decision variable in denominator", unparse(node))
            if denominator.constant == 0:
                raise EvalError(f"division by zero in {unparse(node)}")
            return numerator.scale(1.0 / denominator.constant)
        if isinstance(node, BinaryOp):
            left, right = self.visit(node.left, env), self.visit(node.right, env)
            return left + right if node.symbol == "+" else left - right
        raise NonLinearError("unsupported construct", unparse(node))

    def _ident(self, node: Ident, env: Env) -> LinearForm:
        if node.name in env:
            return LinearForm.of_constant(env[node.name])
        param = self.params.get(node.name)
        if param is not None:
            return LinearForm.of_constant(param.scalar())
        info = self.variables.get(node.name)
        if info is not None:
            if info.indexed:
                raise GroundError(f"indexed variable {node.name} used without index")
            return LinearForm.of_variable(node.name)
        raise GroundError(f"unresolved identifier {node.name}")

    def _index(self, node: Index, env: Env) -> LinearForm:
        idx = index_tuple(node, self.params, env)
        param = self.params.get(node.name)
        if param is not None:
            return LinearForm.of_constant(param.lookup(idx))
        info = self.variables.get(node.name)
        if info is None:
            raise GroundError(f"unresolved identifier {node.name}")
        if idx not in info.index_set:
            raise GroundError(f"index {list(idx)} outside the iteration space of {node.name}")
        return LinearForm.of_variable(instance_name(node.name, idx))


def to_linear(e: Expr, params: "ParameterTable", variables: VariableTable) -> LinearForm:
    """
    Extract the affine form of an expression.

    Args:
        e: Arithmetic expression (grounded, or with resolvable Sum ranges)
        params: Parameter table substituted for parameter names
        variables: Declared decision variables and their index sets

    Returns:
        LinearForm keyed by variable instance name

    Raises:
        NonLinearError: Variable products, variables in denominators
        GroundError: Unresolved names or out-of-range indices
    """
    return _Linearizer(params, variables).visit(e, {})


def relation_to_linear(
    rel: Union[Relation, GroundRelation],
    params: "ParameterTable",
    variables: VariableTable,
) -> Tuple[LinearForm, str]:
    """Return ``(lhs - rhs, op)`` so the relation reads ``form op 0``."""
    linearizer = _Linearizer(params, variables)
    return linearizer.visit(rel.lhs, {}) - linearizer.visit(rel.rhs, {}), rel.op


class _Evaluator:
    def __init__(self, params: "ParameterTable", assignment: Mapping[str, float]):
        self.params = params
        self.assignment = assignment

    def visit(self, node: Expr, env: Env) -> float:
        if isinstance(node, Number):
            return node.value
        if isinstance(node, Ident):
            if node.name in env:
                return env[node.name]
            param = self.params.get(node.name)
            if param is not None:
                return param.scalar()
            return self._binding(node.name)
        if isinstance(node, Index):
            idx = index_tuple(node, self.params, env)
            param = self.params.get(node.name)
            if param is not None:
                return param.lookup(idx)
            return self._binding(instance_name(node.name, idx))
        if isinstance(node, Neg):
            return -self.visit(node.operand, env)
        if isinstance(node, Paren):
            return self.visit(node.inner, env)
        if isinstance(node, Sum):
            return sum(self.visit(node.body, inner) for inner in iterate_comprehensions(node.comps, self.params, env))
        if isinstance(node, BinaryOp):
            left, right = self.visit(node.left, env), self.visit(node.right, env)
            if node.symbol == "+":
                return left + right
            if node.symbol == "-":
                return left - right
            if node.symbol == "*":
                return left * right
            if right == 0:
                raise EvalError(f"division by zero in {unparse(node)}")
            return left / right
        raise EvalError(f"cannot evaluate {node!r}")

    def _binding(self, name: str) -> float:
        if name not in self.assignment:
            raise EvalError(f"missing binding for {name}")
        return float(self.assignment[name])


def evaluate(e: Expr, assignment: Mapping[str, float], params: "ParameterTable") -> float:
    """
    Evaluate an expression at a point.

    Raises:
        EvalError: Missing binding or division by zero
    """
    return _Evaluator(params, assignment).visit(e, {})


def holds(rel: GroundRelation, assignment: Mapping[str, float], params: "ParameterTable", tol: float = 1e-9) -> bool:
    """Whether a ground relation is satisfied at a point."""
    gap = evaluate(rel.lhs, assignment, params) - evaluate(rel.rhs, assignment, params)
    if rel.op == "==":
        return abs(gap) <= tol
    if rel.op == "<=":
        return gap <= tol
    return gap >= -tol
