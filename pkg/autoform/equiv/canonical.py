"""
Canonical form of grounded linear systems.

Each relation is stored as ``sum(a_v * v) + k  op  0`` with op ``<=`` or
``==``: ``>=`` relations are negated, equalities are scaled so the leading
coefficient (by variable name) is +1 and inequalities so that it has
magnitude 1. Relations are sorted and deduplicated. A relation without
variables is either dropped (always true) or collapses the whole system to
the single infeasible relation ``1 <= 0``.
"""

from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Tuple

from autoform.expr.linear import LinearForm

COEFFICIENT_DIGITS = 9
TRUTH_TOL = 1e-9


def _tidy(value: float) -> float:
    return round(value, COEFFICIENT_DIGITS) + 0.0


@dataclass(frozen=True, order=True)
class CanonicalRelation:
    coefficients: Tuple[Tuple[str, float], ...]
    op: str
    constant: float

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.coefficients)

    def value(self, point: Mapping[str, float]) -> float:
        return sum(coef * point.get(name, 0.0) for name, coef in self.coefficients) + self.constant

    def holds(self, point: Mapping[str, float], tol: float = 1e-7) -> bool:
        v = self.value(point)
        return abs(v) <= tol if self.op == "==" else v <= tol

    def to_text(self) -> str:
        terms = " + ".join(f"{coef:g}*{name}" for name, coef in self.coefficients) or "0"
        return f"{terms} + {self.constant:g} {self.op} 0"


INFEASIBLE = CanonicalRelation((), "<=", 1.0)


def canonical_relation(form: LinearForm, op: str) -> Optional[CanonicalRelation]:
    """
    Canonicalize ``form op 0``.

    Returns:
        The canonical relation, None if it holds everywhere, or INFEASIBLE
    """
    if op == ">=":
        form, op = -form, "<="
    form = form.normalized()
    if form.is_constant:
        holds = abs(form.constant) <= TRUTH_TOL if op == "==" else form.constant <= TRUTH_TOL
        return None if holds else INFEASIBLE
    lead = form.coefficients[min(form.coefficients)]
    scale = 1.0 / lead if op == "==" else 1.0 / abs(lead)
    coefficients = tuple(sorted((name, _tidy(coef * scale)) for name, coef in form.coefficients.items()))
    coefficients = tuple((n, c) for n, c in coefficients if c != 0.0)
    return CanonicalRelation(coefficients, op, _tidy(form.constant * scale))


@dataclass(frozen=True)
class CanonicalSystem:
    relations: Tuple[CanonicalRelation, ...] = ()

    @classmethod
    def from_relations(cls, relations: Iterable[Tuple[LinearForm, str]]) -> "CanonicalSystem":
        canon = set()
        for form, op in relations:
            rel = canonical_relation(form, op)
            if rel is INFEASIBLE:
                return cls((INFEASIBLE,))
            if rel is not None:
                canon.add(rel)
        return cls(tuple(sorted(canon)))

    @classmethod
    def from_canonical(cls, relations: Iterable[CanonicalRelation]) -> "CanonicalSystem":
        """Re-canonicalize already canonical relations (idempotent)."""
        pairs = [(LinearForm(dict(r.coefficients), r.constant), r.op) for r in relations]
        return cls.from_relations(pairs)

    @property
    def is_infeasible(self) -> bool:
        return self.relations == (INFEASIBLE,)

    @property
    def variables(self) -> frozenset:
        return frozenset(name for r in self.relations for name in r.variables)

    def holds(self, point: Mapping[str, float], tol: float = 1e-7) -> bool:
        return all(r.holds(point, tol) for r in self.relations)

    def matches(self, other: "CanonicalSystem", tol: float = 1e-9) -> bool:
        """Canonical identity with absolute coefficient tolerance."""
        if len(self.relations) != len(other.relations):
            return False
        for a, b in zip(self.relations, other.relations):
            if a.op != b.op or a.variables != b.variables:
                return False
            if abs(a.constant - b.constant) > tol:
                return False
            if any(abs(x - y) > tol for (_, x), (_, y) in zip(a.coefficients, b.coefficients)):
                return False
        return True

    def to_list(self) -> List[str]:
        return [r.to_text() for r in self.relations]
