"""
Structural validation of (partial) formulations.

Violations are returned as data. The result is sorted so it does not depend
on the order of constraint entries.
"""

from dataclasses import dataclass
from typing import Iterable, List, Optional, Set, Tuple, Union

from autoform.errors import GroundError, ParseError
from autoform.expr.ast import (
    Comprehension,
    Expr,
    Ident,
    Index,
    NameIterable,
    QuantifiedRelation,
    RangeIterable,
    Relation,
    Sum,
)
from autoform.expr.parser import RESERVED_WORDS, parse_comprehensions, parse_expression
from autoform.expr.variables import VariableTable
from autoform.model.formulation import (
    COMPONENT_DEPTH,
    ConstraintKind,
    ConstraintSet,
    Formulation,
    is_identifier,
)

MAX_INDEX_ARITY = 2


@dataclass(frozen=True, order=True)
class Violation:
    component: str
    entry: Optional[str]
    rule: str

    def to_dict(self):
        return {"component": self.component, "entry": self.entry, "rule": self.rule}

    def __str__(self) -> str:
        where = f"{self.component}.{self.entry}" if self.entry else self.component
        return f"{where}: {self.rule}"


def _comprehension_refs(comps: Iterable[Comprehension], bound: Set[str]) -> Tuple[List[str], Set[str]]:
    refs: List[str] = []
    scope = set(bound)
    for comp in comps:
        if isinstance(comp.iterable, NameIterable):
            if comp.iterable.name not in scope:
                refs.append(comp.iterable.name)
        elif isinstance(comp.iterable, RangeIterable):
            refs.extend(free_names(comp.iterable.stop, scope))
            if comp.iterable.start is not None:
                refs.extend(free_names(comp.iterable.start, scope))
        scope.add(comp.var)
    return refs, scope


def free_names(node: Union[Expr, Relation, QuantifiedRelation], bound: Set[str] = frozenset()) -> List[str]:
    """Identifiers referenced by ``node`` that no enclosing comprehension binds."""
    if isinstance(node, QuantifiedRelation):
        refs, scope = _comprehension_refs(node.comps, set(bound))
        return refs + free_names(node.relation, scope)
    if isinstance(node, Relation):
        return free_names(node.lhs, bound) + free_names(node.rhs, bound)
    if isinstance(node, Sum):
        refs, scope = _comprehension_refs(node.comps, set(bound))
        return refs + free_names(node.body, scope)
    names: List[str] = []
    if isinstance(node, Ident) and node.name not in bound:
        names.append(node.name)
    if isinstance(node, Index) and node.name not in bound:
        names.append(node.name)
    for child in node.children():
        names.extend(free_names(child, bound))
    return names


class _Validator:
    def __init__(self, f: Formulation):
        self.f = f
        self.violations: List[Violation] = []
        self.known: Set[str] = set(f.parameters.names) | {v.name for v in f.variables}

    def flag(self, component: str, entry: Optional[str], rule: str):
        self.violations.append(Violation(component, entry, rule))

    def run(self) -> List[Violation]:
        self._check_depth()
        self._check_parameters()
        if self.f.depth >= 1:
            self._check_variables()
        if self.f.depth >= 2 and self.f.objective is not None:
            self._check_objective()
        for cs in (self.f.equalities, self.f.inequalities):
            if cs is not None:
                self._check_constraints(cs)
        return sorted(set(self.violations), key=lambda v: (v.component, v.entry or "", v.rule))

    def _check_depth(self):
        present = {
            "objective": self.f.objective is not None,
            "equality_constraints": self.f.equalities is not None,
            "inequality_constraints": self.f.inequalities is not None,
        }
        for key, is_present in present.items():
            needed = COMPONENT_DEPTH[key] <= self.f.depth
            if needed and not is_present:
                self.flag(key, None, "missing component")
            elif is_present and not needed:
                self.flag(key, None, "component present beyond depth marker")
        if self.f.depth < 1 and self.f.variables:
            self.flag("decision_variables", None, "component present beyond depth marker")

    def _check_parameters(self):
        for param in self.f.parameters:
            if not is_identifier(param.name) or param.name in RESERVED_WORDS:
                self.flag("parameters", param.name, "invalid identifier")
            arities = param.arities
            if len(arities) > 1:
                self.flag("parameters", param.name, "index arity is not homogeneous")
            elif arities and max(arities) > MAX_INDEX_ARITY:
                self.flag("parameters", param.name, f"index arity above {MAX_INDEX_ARITY} is unsupported")

    def _check_variables(self):
        seen: Set[str] = set()
        for decl in self.f.variables:
            if not is_identifier(decl.name) or decl.name in RESERVED_WORDS:
                self.flag("decision_variables", decl.name, "invalid identifier")
            if decl.name in seen:
                self.flag("decision_variables", decl.name, "duplicate variable name")
            seen.add(decl.name)
            if decl.name in self.f.parameters:
                self.flag("decision_variables", decl.name, "name shadows a parameter")
            lb, ub = decl.effective_lower_bound, decl.effective_upper_bound
            if lb is not None and ub is not None and lb > ub:
                self.flag("decision_variables", decl.name, "lower bound exceeds upper bound")
            if decl.iteration_space:
                try:
                    comps = parse_comprehensions(decl.iteration_space)
                except ParseError as e:
                    self.flag("decision_variables", decl.name, f"iteration space does not parse: {e}")
                    continue
                refs, _ = _comprehension_refs(comps, set())
                unresolved = [name for name in refs if name not in self.f.parameters]
                for name in unresolved:
                    self.flag("decision_variables", decl.name, f"unresolved identifier {name}")
                if unresolved:
                    continue
                # one declaration at a time so each failure names its own variable
                try:
                    VariableTable.from_declarations([decl], self.f.parameters)
                except (GroundError, ParseError) as e:
                    self.flag("decision_variables", decl.name, f"iteration space does not ground: {e}")

    def _resolve(self, component: str, entry: Optional[str], node) -> None:
        for name in free_names(node):
            if name not in self.known:
                self.flag(component, entry, f"unresolved identifier {name}")

    def _check_objective(self):
        objective = self.f.objective
        try:
            node = parse_expression(objective.expression)
        except ParseError as e:
            self.flag("objective", objective.sense.value, f"expression does not parse: {e}")
            return
        if isinstance(node, (Relation, QuantifiedRelation)):
            self.flag("objective", objective.sense.value, "objective must be an expression, not a relation")
            return
        self._resolve("objective", objective.sense.value, node)

    def _check_constraints(self, cs: ConstraintSet):
        component = "equalities" if cs.kind is ConstraintKind.EQUALITY else "inequalities"
        allowed = ("==",) if cs.kind is ConstraintKind.EQUALITY else ("<=", ">=")
        rule = "relation must be ==" if cs.kind is ConstraintKind.EQUALITY else "relation must be <= or >="
        for name, text in cs.entries:
            if name is None:
                self.flag(component, None, "empty sentinel mixed with constraint entries")
                continue
            if not is_identifier(name):
                self.flag(component, name, "invalid identifier")
            if text is None:
                self.flag(component, name, "missing constraint text")
                continue
            try:
                node = parse_expression(text)
            except ParseError as e:
                self.flag(component, name, f"constraint does not parse: {e}")
                continue
            relation = node.relation if isinstance(node, QuantifiedRelation) else node
            if not isinstance(relation, Relation):
                self.flag(component, name, "constraint must be a relation")
                continue
            if relation.op not in allowed:
                self.flag(component, name, rule)
            self._resolve(component, name, node)


def validate(f: Formulation) -> List[Violation]:
    """
    Check every structural invariant of a (partial) formulation.

    Args:
        f: Complete or partial formulation

    Returns:
        Sorted list of Violation records; empty when the formulation is well-formed
    """
    return _Validator(f).run()
