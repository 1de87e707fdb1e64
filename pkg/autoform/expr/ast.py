"""
Expression tree for objective and constraint strings.

Nodes are immutable; ``unparse`` renders a tree back to text that reparses to
the same tree.
"""

from dataclasses import dataclass
from typing import ClassVar, Iterator, Optional, Tuple, Union


class Expr:
    """Base class of arithmetic nodes."""

    def children(self) -> Tuple["Expr", ...]:
        return ()


@dataclass(frozen=True)
class Number(Expr):
    value: float


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class Index(Expr):
    name: str
    indices: Tuple[Expr, ...]

    def children(self) -> Tuple[Expr, ...]:
        return self.indices


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def children(self) -> Tuple[Expr, ...]:
        return (self.operand,)


@dataclass(frozen=True)
class BinaryOp(Expr):
    left: Expr
    right: Expr
    symbol: ClassVar[str] = "?"

    def children(self) -> Tuple[Expr, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class Add(BinaryOp):
    symbol: ClassVar[str] = "+"


@dataclass(frozen=True)
class Sub(BinaryOp):
    symbol: ClassVar[str] = "-"


@dataclass(frozen=True)
class Mul(BinaryOp):
    symbol: ClassVar[str] = "*"


@dataclass(frozen=True)
class Div(BinaryOp):
    symbol: ClassVar[str] = "/"


@dataclass(frozen=True)
class RangeIterable:
    """``range(stop)`` or ``range(start, stop)``."""
    stop: Expr
    start: Optional[Expr] = None


@dataclass(frozen=True)
class NameIterable:
    """A list-valued parameter iterated by value."""
    name: str


Iterable = Union[RangeIterable, NameIterable]


@dataclass(frozen=True)
class Comprehension:
    var: str
    iterable: Iterable


@dataclass(frozen=True)
class Sum(Expr):
    body: Expr
    comps: Tuple[Comprehension, ...]

    def children(self) -> Tuple[Expr, ...]:
        return (self.body,)


@dataclass(frozen=True)
class Paren(Expr):
    inner: Expr

    def children(self) -> Tuple[Expr, ...]:
        return (self.inner,)


RELATION_OPS = ("==", "<=", ">=")


@dataclass(frozen=True)
class Relation:
    lhs: Expr
    op: str
    rhs: Expr


@dataclass(frozen=True)
class QuantifiedRelation:
    relation: Relation
    comps: Tuple[Comprehension, ...]


Node = Union[Expr, Relation, QuantifiedRelation]


def walk(node: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an arithmetic tree (comprehension bounds excluded)."""
    yield node
    for child in node.children():
        yield from walk(child)


def _number_text(value: float) -> str:
    return repr(float(value))


def _iterable_text(iterable: Iterable) -> str:
    if isinstance(iterable, NameIterable):
        return iterable.name
    if iterable.start is None:
        return f"range({unparse(iterable.stop)})"
    return f"range({unparse(iterable.start)}, {unparse(iterable.stop)})"


def comprehension_text(comps: Tuple[Comprehension, ...]) -> str:
    return " ".join(f"for {c.var} in {_iterable_text(c.iterable)}" for c in comps)


def unparse(node: Node) -> str:
    """Render a node as grammar text."""
    if isinstance(node, QuantifiedRelation):
        return f"{unparse(node.relation)} {comprehension_text(node.comps)}"
    if isinstance(node, Relation):
        return f"{unparse(node.lhs)} {node.op} {unparse(node.rhs)}"
    if isinstance(node, Number):
        return _number_text(node.value)
    if isinstance(node, Ident):
        return node.name
    if isinstance(node, Index):
        return f"{node.name}[{', '.join(unparse(i) for i in node.indices)}]"
    if isinstance(node, Neg):
        return f"-{unparse(node.operand)}"
    if isinstance(node, BinaryOp):
        return f"{unparse(node.left)} {node.symbol} {unparse(node.right)}"
    if isinstance(node, Sum):
        return f"sum({unparse(node.body)} {comprehension_text(node.comps)})"
    if isinstance(node, Paren):
        return f"({unparse(node.inner)})"
    raise TypeError(f"Not an expression node: {node!r}")
