"""
Parser for the formulation expression dialect.

The grammar is fixed and documented here; strings are never executed as host
code. Anything outside it is a ParseError, which the search layer treats as a
discarded candidate.

    expr     := term (('+'|'-') term)*
    term     := factor (('*'|'/') factor)*
    factor   := NUMBER | IDENT | IDENT '[' expr (',' expr)* ']' | '(' expr ')'
              | '-' factor | 'sum' '(' expr comp+ ')'
    comp     := 'for' IDENT 'in' iterable
    iterable := 'range' '(' expr (',' expr)? ')' | IDENT
    relation := expr ('=='|'<='|'>=') expr comp*
"""

import logging
from typing import Tuple, Union

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from autoform.errors import ParseError
from autoform.expr.ast import (
    Add,
    Comprehension,
    Div,
    Expr,
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
)

logger = logging.getLogger("autoform.expr.parser")

GRAMMAR = r"""
start: expr                       -> bare
     | expr REL_OP expr comp*     -> relation

comps: comp+

?expr: term
     | expr _PLUS term            -> add
     | expr _MINUS term           -> sub

?term: factor
     | term _STAR factor          -> mul
     | term _SLASH factor         -> div

?factor: NUMBER                                 -> number
       | IDENT                                  -> ident
       | IDENT "[" expr ("," expr)* "]"         -> index
       | "(" expr ")"                           -> paren
       | _MINUS factor                          -> neg
       | "sum" "(" expr comp+ ")"               -> sum_

comp: "for" IDENT "in" iterable

?iterable: "range" "(" expr ("," expr)? ")"     -> range_iter
         | IDENT                                -> name_iter

REL_OP: "==" | "<=" | ">="
_PLUS: "+"
_MINUS: "-"
_STAR: "*"
_SLASH: "/"
IDENT: /[A-Za-z_][A-Za-z0-9_]*/
NUMBER: /(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?/

%ignore /[ \t\r\n]+/
"""

RESERVED_WORDS = frozenset({"sum", "for", "in", "range"})


@v_args(inline=True)
class _AstBuilder(Transformer):
    """Turns the lark parse tree into autoform.expr.ast nodes."""

    def number(self, token):
        return Number(float(token))

    def ident(self, token):
        return Ident(str(token))

    def index(self, name, *indices):
        return Index(str(name), tuple(indices))

    def paren(self, inner):
        return Paren(inner)

    def neg(self, operand):
        return Neg(operand)

    def add(self, left, right):
        return Add(left, right)

    def sub(self, left, right):
        return Sub(left, right)

    def mul(self, left, right):
        return Mul(left, right)

    def div(self, left, right):
        return Div(left, right)

    def sum_(self, body, *comps):
        return Sum(body, tuple(comps))

    def comp(self, var, iterable):
        return Comprehension(str(var), iterable)

    def range_iter(self, *bounds):
        if len(bounds) == 1:
            return RangeIterable(stop=bounds[0])
        return RangeIterable(stop=bounds[1], start=bounds[0])

    def name_iter(self, token):
        return NameIterable(str(token))

    def bare(self, expr):
        return expr

    def relation(self, lhs, op, rhs, *comps):
        rel = Relation(lhs, str(op), rhs)
        if comps:
            return QuantifiedRelation(rel, tuple(comps))
        return rel

    def comps(self, *items):
        return tuple(items)


_PARSER = Lark(GRAMMAR, start=["start", "comps"], parser="lalr")
_BUILDER = _AstBuilder()


def _parse(text: str, start: str):
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedInput as e:
        pos = getattr(e, "pos_in_stream", None)
        if pos is None or pos < 0:
            pos = len(text)
        expected = getattr(e, "expected", None) or getattr(e, "allowed", None) or ()
        offset = len(text[:pos].encode("utf-8"))
        raise ParseError(f"unexpected input in {text!r}", offset, expected) from e
    try:
        return _BUILDER.transform(tree)
    except VisitError as e:
        raise ParseError(f"malformed expression {text!r}: {e.orig_exc}", 0) from e


def parse_expression(text: str) -> Union[Expr, Relation, QuantifiedRelation]:
    """
    Parse an objective or constraint string.

    Args:
        text: Expression or relation text

    Returns:
        An arithmetic node, a Relation, or a QuantifiedRelation when the
        relation carries trailing comprehension clauses

    Raises:
        ParseError: With byte offset and expected-token set
    """
    return _parse(text, "start")


def normalize_iteration_space(text: str) -> str:
    """Accept ``[x for i in ...]`` list-comprehension phrasing by keeping the clauses."""
    stripped = text.strip()
    if stripped.startswith("[") and stripped.endswith("]"):
        stripped = stripped[1:-1].strip()
    head, sep, tail = stripped.partition("for ")
    if sep and head.strip():
        logger.debug(f"Dropping comprehension head {head.strip()!r} from iteration space")
        stripped = "for " + tail
    return stripped


def parse_comprehensions(text: str) -> Tuple[Comprehension, ...]:
    """Parse an iteration space such as ``for i in range(n) for j in range(m)``."""
    return _parse(normalize_iteration_space(text), "comps")
