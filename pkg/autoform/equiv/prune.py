"""
Pruning of trivially equivalent candidates at stages 2-4.

Candidates are partial formulations sharing the same prefix. Each is
reduced to its new component (objective, equality system or inequality
system), compared pairwise, and merged under union-find when Equivalent.
Unknown verdicts never merge. The earliest-generated member of each class
is its representative.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from autoform.errors import AutoformError, SchemaError
from autoform.expr import QuantifiedRelation, Relation, VariableTable, ground, parse_expression, relation_to_linear, to_linear
from autoform.expr.linear import LinearForm
from autoform.equiv.canonical import CanonicalSystem
from autoform.equiv.checker import (
    Domain,
    EquivVerdict,
    check_objective_equivalence,
    check_system_equivalence,
)
from autoform.model.formulation import ConstraintSet, Formulation, Sense

logger = logging.getLogger("autoform.equiv.prune")


class UnionFind:
    """Disjoint sets whose root is always the smallest member."""

    def __init__(self):
        self.parent: Dict[int, int] = {}

    def find(self, x: int) -> int:
        if x not in self.parent:
            self.parent[x] = x
            return x
        if self.parent[x] != x:
            self.parent[x] = self.find(self.parent[x])
        return self.parent[x]

    def union(self, x: int, y: int):
        px, py = self.find(x), self.find(y)
        self.parent[px] = self.parent[py] = min(px, py)


ObjectiveComponent = Tuple[Sense, LinearForm]
Component = Union[ObjectiveComponent, CanonicalSystem]


def linear_objective(f: Formulation, table: VariableTable) -> ObjectiveComponent:
    node = parse_expression(f.objective.expression)
    if isinstance(node, (Relation, QuantifiedRelation)):
        raise SchemaError("objective must be an expression, not a relation", "$.objective")
    return f.objective.sense, to_linear(node, f.parameters, table)


def canonical_constraints(cs: ConstraintSet, f: Formulation, table: VariableTable) -> CanonicalSystem:
    forms = []
    for name, text in cs.items():
        node = parse_expression(text)
        if not isinstance(node, (Relation, QuantifiedRelation)):
            raise SchemaError(f"constraint {name} is not a relation")
        for grounded in ground(node, f.parameters):
            forms.append(relation_to_linear(grounded, f.parameters, table))
    return CanonicalSystem.from_relations(forms)


def component_of(f: Formulation, stage: int, table: VariableTable) -> Component:
    """The stage's component in comparable form."""
    if stage == 2:
        return linear_objective(f, table)
    if stage == 3:
        return canonical_constraints(f.equalities, f, table)
    if stage == 4:
        return canonical_constraints(f.inequalities, f, table)
    raise ValueError(f"symbolic pruning applies to stages 2-4, got {stage}")


def compare_components(a: Component, b: Component, stage: int, domain: Domain) -> EquivVerdict:
    if stage == 2:
        (sense_a, form_a), (sense_b, form_b) = a, b
        if sense_a is not sense_b:
            return EquivVerdict.distinct(None, "objective senses differ")
        return check_objective_equivalence(form_a, form_b, domain)
    return check_system_equivalence(a, b, "equality" if stage == 3 else "inequality", domain)


@dataclass
class PruneResult:
    retained: List[int]
    labels: List[int]
    quarantined: List[int] = field(default_factory=list)
    verdicts: Dict[Tuple[int, int], EquivVerdict] = field(default_factory=dict)

    @property
    def classes(self) -> Dict[int, List[int]]:
        groups: Dict[int, List[int]] = {}
        for i, label in enumerate(self.labels):
            groups.setdefault(label, []).append(i)
        return groups

    @property
    def retained_fraction(self) -> float:
        return len(self.retained) / len(self.labels) if self.labels else 0.0


def prune_candidates(candidates: Sequence[Formulation], stage: int, table: Optional[VariableTable] = None) -> PruneResult:
    """
    Collapse equivalent candidates to one representative per class.

    Args:
        candidates: Partial formulations of depth ``stage`` sharing their prefix
        stage: 2 (objective), 3 (equalities) or 4 (inequalities)
        table: Shared variable table; instantiated from the first candidate if omitted

    Returns:
        PruneResult with retained indices in generation order and a class
        label (representative index) per candidate. Candidates that fail to
        parse, ground or linearize are quarantined as singleton classes.
    """
    if stage not in (2, 3, 4):
        raise ValueError(f"symbolic pruning applies to stages 2-4, got {stage}")
    if not candidates:
        return PruneResult([], [])

    domain = None
    if table is None:
        try:
            table = VariableTable.from_declarations(candidates[0].variables, candidates[0].parameters)
        except AutoformError as e:
            logger.warning(f"Shared variable table does not instantiate ({e}); nothing is merged")
    if table is not None:
        domain = Domain.from_table(table)

    components: Dict[int, Component] = {}
    quarantined: List[int] = []
    for i, f in enumerate(candidates):
        if table is None:
            quarantined.append(i)
            continue
        try:
            components[i] = component_of(f, stage, table)
        except AutoformError as e:
            logger.info(f"Candidate {i} quarantined at stage {stage}: {e}")
            quarantined.append(i)

    uf = UnionFind()
    verdicts: Dict[Tuple[int, int], EquivVerdict] = {}
    indices = sorted(components)
    for pos, i in enumerate(indices):
        for j in indices[pos + 1:]:
            if uf.find(i) == uf.find(j):
                continue
            try:
                verdict = compare_components(components[i], components[j], stage, domain)
            except AutoformError as e:
                verdict = EquivVerdict.unknown(str(e))
            verdicts[(i, j)] = verdict
            if verdict.is_equivalent:
                uf.union(i, j)

    labels = [uf.find(i) for i in range(len(candidates))]
    retained = [i for i, label in enumerate(labels) if label == i]
    logger.debug(f"Stage {stage}: {len(candidates)} candidates -> {len(retained)} classes")
    return PruneResult(retained, labels, quarantined, verdicts)
