"""Trivial-equivalence detection and pruning of candidate components."""

from .canonical import INFEASIBLE, CanonicalRelation, CanonicalSystem, canonical_relation
from .checker import (
    Domain,
    EquivVerdict,
    Verdict,
    check_objective_equivalence,
    check_system_equivalence,
    combine_verdicts,
    systems_differ_on,
)
from .prune import PruneResult, UnionFind, canonical_constraints, component_of, linear_objective, prune_candidates

__all__ = [
    "INFEASIBLE",
    "CanonicalRelation",
    "CanonicalSystem",
    "canonical_relation",
    "Domain",
    "EquivVerdict",
    "Verdict",
    "check_objective_equivalence",
    "check_system_equivalence",
    "combine_verdicts",
    "systems_differ_on",
    "PruneResult",
    "UnionFind",
    "canonical_constraints",
    "component_of",
    "linear_objective",
    "prune_candidates",
]
