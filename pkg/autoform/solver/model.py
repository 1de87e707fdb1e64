"""
Lowering of complete formulations into standard-form computational models.

This is the deterministic parser between a symbolic formulation and the
solver: variables are instantiated over their iteration spaces, every
constraint entry is grounded and linearized, and each resulting row keeps
the name of the entry it came from.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from autoform.errors import (
    AutoformError,
    GroundError,
    LoweringError,
    NonLinearError,
    ParseError,
    SchemaError,
)
from autoform.expr import (
    QuantifiedRelation,
    Relation,
    VariableTable,
    ground,
    parse_expression,
    relation_to_linear,
    to_linear,
)
from autoform.model.formulation import ConstraintKind, Formulation, Sense, VarKind

logger = logging.getLogger("autoform.solver.lowering")

ROW_OPS = ("<=", "==", ">=")


@dataclass(frozen=True)
class Column:
    name: str
    kind: VarKind
    lower: Optional[float]
    upper: Optional[float]

    @property
    def is_integral(self) -> bool:
        return self.kind.is_integral

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "kind": self.kind.value, "lower": self.lower, "upper": self.upper}


@dataclass(frozen=True)
class Row:
    """sum(coef * column) op rhs, with sparse (column index, coefficient) terms."""
    terms: Tuple[Tuple[int, float], ...]
    op: str
    rhs: float
    entry: str

    def to_dict(self) -> Dict[str, Any]:
        return {"terms": [list(t) for t in self.terms], "op": self.op, "rhs": self.rhs, "entry": self.entry}


@dataclass(frozen=True)
class ComputationalModel:
    columns: Tuple[Column, ...]
    sense: Sense
    objective: Tuple[float, ...]
    objective_constant: float = 0.0
    rows: Tuple[Row, ...] = ()
    column_lookup: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    @property
    def provenance(self) -> Dict[int, str]:
        return {i: row.entry for i, row in enumerate(self.rows)}

    @property
    def has_integers(self) -> bool:
        return any(c.is_integral for c in self.columns)

    def column_index(self, name: str) -> int:
        return self.column_lookup[name]

    def row_activity(self, row: Row, values: List[float]) -> float:
        return sum(coef * values[j] for j, coef in row.terms)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": [c.to_dict() for c in self.columns],
            "sense": self.sense.value,
            "objective": list(self.objective),
            "objective_constant": self.objective_constant,
            "rows": [r.to_dict() for r in self.rows],
        }


def _parse_relation(text: str):
    node = parse_expression(text)
    if not isinstance(node, (Relation, QuantifiedRelation)):
        raise SchemaError(f"constraint is not a relation: {text}")
    return node


def lower(f: Formulation) -> ComputationalModel:
    """
    Ground and linearize a complete formulation.

    Args:
        f: Complete formulation

    Returns:
        ComputationalModel with columns in declaration then row-major order

    Raises:
        LoweringError: Wrapping the parse, ground, linearization or schema
            error together with the name of the offending entry
    """
    if not f.is_complete or f.objective is None:
        raise LoweringError("formulation", SchemaError("formulation is not complete"))

    try:
        table = VariableTable.from_declarations(f.variables, f.parameters)
    except (ParseError, GroundError) as e:
        raise LoweringError("decision_variables", e) from e

    columns: List[Column] = []
    for info in table:
        kind = VarKind(info.kind)
        for instance in info.instances():
            columns.append(Column(instance, kind, info.lower_bound, info.upper_bound))
    lookup = {c.name: i for i, c in enumerate(columns)}

    try:
        objective_expr = parse_expression(f.objective.expression)
        if isinstance(objective_expr, (Relation, QuantifiedRelation)):
            raise SchemaError("objective must be an expression, not a relation", "$.objective")
        objective_form = to_linear(objective_expr, f.parameters, table)
    except (ParseError, GroundError, NonLinearError, SchemaError) as e:
        raise LoweringError("objective", e) from e

    objective = [0.0] * len(columns)
    for name, coef in objective_form.coefficients.items():
        objective[lookup[name]] = coef

    rows: List[Row] = []
    for cs in (f.equalities, f.inequalities):
        if cs is None:
            continue
        for name, text in cs.items():
            try:
                relation = _parse_relation(text)
                op = relation.relation.op if isinstance(relation, QuantifiedRelation) else relation.op
                if cs.kind is ConstraintKind.EQUALITY and op != "==":
                    raise SchemaError("relation must be ==", f"$.{cs.kind.key}.{name}")
                if cs.kind is ConstraintKind.INEQUALITY and op == "==":
                    raise SchemaError("relation must be <= or >=", f"$.{cs.kind.key}.{name}")
                for grounded in ground(relation, f.parameters):
                    form, row_op = relation_to_linear(grounded, f.parameters, table)
                    terms = tuple(sorted((lookup[v], c) for v, c in form.coefficients.items()))
                    rows.append(Row(terms, row_op, -form.constant, name))
            except AutoformError as e:
                raise LoweringError(name, e) from e

    model = ComputationalModel(
        columns=tuple(columns),
        sense=f.objective.sense,
        objective=tuple(objective),
        objective_constant=objective_form.constant,
        rows=tuple(rows),
        column_lookup=lookup,
    )
    logger.debug(f"Lowered formulation: {len(columns)} columns, {len(rows)} rows")
    return model
