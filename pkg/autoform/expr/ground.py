"""Comprehension unrolling: quantified relations become lists of ground relations."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterator, List, Mapping, Tuple, Union

from autoform.errors import GroundError
from autoform.expr.ast import (
    Add,
    BinaryOp,
    Comprehension,
    Expr,
    Ident,
    Index,
    NameIterable,
    Neg,
    Number,
    Paren,
    QuantifiedRelation,
    RangeIterable,
    Relation,
    Sum,
    unparse,
)

if TYPE_CHECKING:
    from autoform.model.formulation import ParameterTable

Env = Mapping[str, float]

INTEGRALITY_TOL = 1e-9


@dataclass(frozen=True)
class GroundRelation:
    """A comprehension-free relation whose indices are integer literals."""
    lhs: Expr
    op: str
    rhs: Expr

    @property
    def text(self) -> str:
        return f"{unparse(self.lhs)} {self.op} {unparse(self.rhs)}"


def as_index(value: float, what: str) -> int:
    """Coerce a numeric value to an integer index or raise GroundError."""
    rounded = round(value)
    if abs(value - rounded) > INTEGRALITY_TOL:
        raise GroundError(f"{what} must be an integer, got {value}")
    return int(rounded)


def constant_value(node: Expr, params: "ParameterTable", env: Env) -> float:
    """Evaluate a variable-free expression (indices, range bounds)."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Ident):
        if node.name in env:
            return env[node.name]
        param = params.get(node.name)
        if param is None:
            raise GroundError(f"unresolved identifier {node.name} in index expression")
        return param.scalar()
    if isinstance(node, Index):
        param = params.get(node.name)
        if param is None:
            raise GroundError(f"unresolved parameter {node.name} in index expression")
        return param.lookup(index_tuple(node, params, env))
    if isinstance(node, Neg):
        return -constant_value(node.operand, params, env)
    if isinstance(node, Paren):
        return constant_value(node.inner, params, env)
    if isinstance(node, BinaryOp):
        left = constant_value(node.left, params, env)
        right = constant_value(node.right, params, env)
        if node.symbol == "+":
            return left + right
        if node.symbol == "-":
            return left - right
        if node.symbol == "*":
            return left * right
        if right == 0:
            raise GroundError(f"division by zero in {unparse(node)}")
        return left / right
    if isinstance(node, Sum):
        return sum(constant_value(node.body, params, e) for e in iterate_comprehensions(node.comps, params, env))
    raise GroundError(f"unsupported index expression {unparse(node)}")


def index_tuple(node: Index, params: "ParameterTable", env: Env) -> Tuple[int, ...]:
    return tuple(as_index(constant_value(i, params, env), f"index of {node.name}") for i in node.indices)


def _iterable_values(iterable: Union[RangeIterable, NameIterable], params: "ParameterTable", env: Env) -> List[float]:
    if isinstance(iterable, NameIterable):
        param = params.get(iterable.name)
        if param is None:
            raise GroundError(f"unresolved iterable {iterable.name}")
        return list(param.iter_values())
    stop = as_index(constant_value(iterable.stop, params, env), "range bound")
    start = 0
    if iterable.start is not None:
        start = as_index(constant_value(iterable.start, params, env), "range bound")
    if start < 0 or stop < 0:
        raise GroundError(f"range bounds must be non-negative, got range({start}, {stop})")
    return [float(k) for k in range(start, stop)]


def iterate_comprehensions(
    comps: Tuple[Comprehension, ...],
    params: "ParameterTable",
    env: Env,
) -> Iterator[Dict[str, float]]:
    """Yield index bindings in cartesian, declaration (row-major) order."""
    if not comps:
        yield dict(env)
        return
    first, rest = comps[0], comps[1:]
    for value in _iterable_values(first.iterable, params, env):
        yield from iterate_comprehensions(rest, params, {**env, first.var: value})


def substitute(node: Expr, params: "ParameterTable", env: Env) -> Expr:
    """Replace bound indices by literals and unroll Sum nodes."""
    if isinstance(node, Ident):
        if node.name in env:
            return Number(env[node.name])
        return node
    if isinstance(node, Index):
        idx = index_tuple(node, params, env)
        param = params.get(node.name)
        if param is not None:
            param.lookup(idx)  # extent check
        return Index(node.name, tuple(Number(float(k)) for k in idx))
    if isinstance(node, Sum):
        terms = [substitute(node.body, params, e) for e in iterate_comprehensions(node.comps, params, env)]
        if not terms:
            return Number(0.0)
        total = terms[0]
        for term in terms[1:]:
            total = Add(total, term)
        return Paren(total)
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, params, env))
    if isinstance(node, Paren):
        return Paren(substitute(node.inner, params, env))
    if isinstance(node, BinaryOp):
        return type(node)(substitute(node.left, params, env), substitute(node.right, params, env))
    return node


def ground(rel: Union[Relation, QuantifiedRelation], params: "ParameterTable") -> List[GroundRelation]:
    """
    Unroll a (quantified) relation into ground relations.

    Args:
        rel: Parsed relation
        params: Parameter table used to resolve iterables and index extents

    Returns:
        One GroundRelation per binding, in cartesian declaration order

    Raises:
        GroundError: Unresolved iterable, non-integer bound, index out of extent
    """
    comps: Tuple[Comprehension, ...] = ()
    base = rel
    if isinstance(rel, QuantifiedRelation):
        comps, base = rel.comps, rel.relation
    if not isinstance(base, Relation):
        raise GroundError(f"not a relation: {base!r}")
    return [
        GroundRelation(substitute(base.lhs, params, env), base.op, substitute(base.rhs, params, env))
        for env in iterate_comprehensions(comps, params, {})
    ]
