"""Expression dialect: grammar, grounding, linearization and evaluation."""

from .ast import (
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
    unparse,
    walk,
)
from .parser import RESERVED_WORDS, parse_comprehensions, parse_expression
from .ground import GroundRelation, ground, iterate_comprehensions
from .variables import VariableInfo, VariableTable, instance_name
from .linear import LinearForm, evaluate, holds, relation_to_linear, to_linear

__all__ = [
    "Add",
    "Comprehension",
    "Div",
    "Expr",
    "Ident",
    "Index",
    "Mul",
    "NameIterable",
    "Neg",
    "Number",
    "Paren",
    "QuantifiedRelation",
    "RangeIterable",
    "Relation",
    "Sub",
    "Sum",
    "unparse",
    "walk",
    "RESERVED_WORDS",
    "parse_comprehensions",
    "parse_expression",
    "GroundRelation",
    "ground",
    "iterate_comprehensions",
    "VariableInfo",
    "VariableTable",
    "instance_name",
    "LinearForm",
    "evaluate",
    "holds",
    "relation_to_linear",
    "to_linear",
]
