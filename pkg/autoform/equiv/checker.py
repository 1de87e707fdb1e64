"""
Equivalence checks for objectives and constraint systems.

Systems are compared in three tiers: canonical identity, then mutual
implication decided by linear programs over the continuous relaxation
(declared variable bounds included), then a lattice check for integer
columns when the relaxation produced a fractional witness. Anything the
tiers cannot settle is Unknown, which callers treat as distinct.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from autoform.errors import DomainMismatch
from autoform.expr.linear import LinearForm
from autoform.expr.variables import VariableTable
from autoform.equiv.canonical import CanonicalRelation, CanonicalSystem
from autoform.solver.simplex import LPStatus, solve_lp

logger = logging.getLogger("autoform.equiv")

COEFFICIENT_TOL = 1e-9
VIOLATION_TOL = 1e-7
MAX_ROUNDING_COMBINATIONS = 256


class Verdict(Enum):
    EQUIVALENT = "Equivalent"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class EquivVerdict:
    verdict: Verdict
    witness: Optional[Dict[str, float]] = None
    reason: str = ""

    @classmethod
    def equivalent(cls, reason: str = "") -> "EquivVerdict":
        return cls(Verdict.EQUIVALENT, reason=reason)

    @classmethod
    def distinct(cls, witness: Optional[Dict[str, float]], reason: str = "") -> "EquivVerdict":
        return cls(Verdict.DISTINCT, witness, reason)

    @classmethod
    def unknown(cls, reason: str) -> "EquivVerdict":
        return cls(Verdict.UNKNOWN, reason=reason)

    @property
    def is_equivalent(self) -> bool:
        return self.verdict is Verdict.EQUIVALENT

    def to_dict(self) -> Dict[str, Any]:
        return {"verdict": self.verdict.value, "witness": self.witness, "reason": self.reason}


# weakest first
_VERDICT_STRENGTH = {Verdict.DISTINCT: 0, Verdict.UNKNOWN: 1, Verdict.EQUIVALENT: 2}


def combine_verdicts(verdicts: Iterable[EquivVerdict]) -> EquivVerdict:
    """
    Overall verdict for a sequence of component verdicts.

    The weakest verdict wins; witness and reason come from the first
    component holding it. An empty sequence is Equivalent.
    """
    weakest: Optional[EquivVerdict] = None
    for verdict in verdicts:
        if weakest is None or _VERDICT_STRENGTH[verdict.verdict] < _VERDICT_STRENGTH[weakest.verdict]:
            weakest = verdict
    return weakest if weakest is not None else EquivVerdict.equivalent("no components")


@dataclass(frozen=True)
class Domain:
    """Variable instances with their bounds; the set over which equivalence is decided."""
    names: Tuple[str, ...]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    integral: Tuple[bool, ...]
    index: Dict[str, int] = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_table(cls, table: VariableTable) -> "Domain":
        names, lower, upper, integral = [], [], [], []
        for info in table:
            for instance in info.instances():
                names.append(instance)
                lower.append(-math.inf if info.lower_bound is None else info.lower_bound)
                upper.append(math.inf if info.upper_bound is None else info.upper_bound)
                integral.append(info.kind != "Continuous")
        return cls(tuple(names), tuple(lower), tuple(upper), tuple(integral), {n: i for i, n in enumerate(names)})

    @classmethod
    def box(cls, names: Sequence[str], lower: float = -math.inf, upper: float = math.inf, integral: bool = False) -> "Domain":
        names = tuple(names)
        n = len(names)
        return cls(names, (lower,) * n, (upper,) * n, (integral,) * n, {name: i for i, name in enumerate(names)})

    def require(self, names: Iterable[str]):
        missing = sorted(set(names) - set(self.names))
        if missing:
            raise DomainMismatch(f"variables outside the domain: {', '.join(missing)}")

    def base_point(self) -> Dict[str, float]:
        """The point nearest the origin inside the bounds."""
        point = {}
        for name, lo, hi, integral in zip(self.names, self.lower, self.upper, self.integral):
            value = min(max(0.0, lo), hi)
            if integral and not float(value).is_integer():
                value = math.ceil(value) if math.ceil(value) <= hi else math.floor(value)
            point[name] = float(value)
        return point

    def contains(self, point: Mapping[str, float], tol: float = 1e-9) -> bool:
        for name, lo, hi in zip(self.names, self.lower, self.upper):
            v = point.get(name, 0.0)
            if v < lo - tol or v > hi + tol:
                return False
        return True


def check_objective_equivalence(f1: LinearForm, f2: LinearForm, domain: Domain) -> EquivVerdict:
    """
    Pointwise equality of two affine objectives over the domain.

    Senses are compared by the caller. A coefficient difference on a column
    fixed by its bounds only shifts the constant.
    """
    domain.require(set(f1.coefficients) | set(f2.coefficients))
    diff = (f1 - f2).normalized()
    point = domain.base_point()
    gap = diff.value_at(point)
    if abs(gap) > COEFFICIENT_TOL:
        return EquivVerdict.distinct(point, f"objectives differ by {gap:g} at the base point")
    for name in sorted(diff.coefficients):
        coef = diff.coefficients[name]
        if abs(coef) <= COEFFICIENT_TOL:
            continue
        i = domain.index[name]
        lo, hi, value = domain.lower[i], domain.upper[i], point[name]
        if hi - lo <= COEFFICIENT_TOL:
            continue
        step = 1.0 if value + 1.0 <= hi else (-1.0 if value - 1.0 >= lo else (hi - lo) / 2.0)
        witness = dict(point)
        witness[name] = value + step if value + step <= hi else value - step
        return EquivVerdict.distinct(witness, f"coefficient of {name} differs by {coef:g}")
    return EquivVerdict.equivalent("identical affine forms")


class _ImplicationLP:
    """LPs over one system plus the domain bounds."""

    def __init__(self, system: CanonicalSystem, domain: Domain):
        self.domain = domain
        n = len(domain.names)
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for rel in system.relations:
            row, rhs = self._dense(rel)
            if rel.op == "==":
                eq_rows.append(row)
                eq_rhs.append(rhs)
            else:
                ub_rows.append(row)
                ub_rhs.append(rhs)
        self.A_ub = np.array(ub_rows).reshape(-1, n)
        self.b_ub = np.array(ub_rhs)
        self.A_eq = np.array(eq_rows).reshape(-1, n)
        self.b_eq = np.array(eq_rhs)
        self.lb = np.array(domain.lower, dtype=float)
        self.ub = np.array(domain.upper, dtype=float)

    def _dense(self, rel: CanonicalRelation) -> Tuple[np.ndarray, float]:
        row = np.zeros(len(self.domain.names))
        for name, coef in rel.coefficients:
            row[self.domain.index[name]] = coef
        return row, -rel.constant

    def maximize_violation(self, rel: CanonicalRelation, direction: float) -> Tuple[str, Optional[Dict[str, float]]]:
        """
        Maximize ``direction * value(rel)`` subject to the system.

        Returns:
            ("implied", None), ("violated", witness) or ("unknown", None)
        """
        row, _ = self._dense(rel)
        objective = -direction * row
        result = solve_lp(objective, self.A_ub, self.b_ub, self.A_eq, self.b_eq, self.lb, self.ub)
        if result.status is LPStatus.INFEASIBLE:
            return "implied", None
        if result.status is LPStatus.OPTIMAL:
            violation = -result.objective + direction * rel.constant
            if violation <= VIOLATION_TOL:
                return "implied", None
            return "violated", self._point(result.x)
        if result.status is LPStatus.UNBOUNDED:
            # any feasible point with violation >= 1 is a witness
            A_ub = np.vstack([self.A_ub, (-direction * row).reshape(1, -1)])
            b_ub = np.append(self.b_ub, direction * rel.constant - 1.0)
            capped = solve_lp(np.zeros(len(row)), A_ub, b_ub, self.A_eq, self.b_eq, self.lb, self.ub)
            if capped.status is LPStatus.OPTIMAL:
                return "violated", self._point(capped.x)
        return "unknown", None

    def _point(self, x: np.ndarray) -> Dict[str, float]:
        return {name: float(v) + 0.0 for name, v in zip(self.domain.names, x)}


def _first_violation(
    source: CanonicalSystem,
    target: CanonicalSystem,
    domain: Domain,
) -> Tuple[str, Optional[Dict[str, float]]]:
    """Look for a point of ``source`` (within the domain) that breaks ``target``."""
    lp = _ImplicationLP(source, domain)
    for rel in target.relations:
        directions = (1.0, -1.0) if rel.op == "==" else (1.0,)
        for direction in directions:
            outcome, witness = lp.maximize_violation(rel, direction)
            if outcome != "implied":
                return outcome, witness
    return "implied", None


def _separates(point: Mapping[str, float], s1: CanonicalSystem, s2: CanonicalSystem, domain: Domain) -> bool:
    return domain.contains(point) and s1.holds(point) != s2.holds(point)


def _round_witness(
    witness: Dict[str, float],
    s1: CanonicalSystem,
    s2: CanonicalSystem,
    domain: Domain,
) -> Optional[Dict[str, float]]:
    """Try floor/ceil combinations of the fractional integer coordinates."""
    fractional = [
        name for name, integral in zip(domain.names, domain.integral)
        if integral and abs(witness[name] - round(witness[name])) > 1e-6
    ]
    if not fractional:
        return witness if _separates(witness, s1, s2, domain) else None
    choices = [(math.floor(witness[n]), math.ceil(witness[n])) for n in fractional]
    for combo in itertools.islice(itertools.product(*choices), MAX_ROUNDING_COMBINATIONS):
        candidate = dict(witness)
        candidate.update({n: float(v) for n, v in zip(fractional, combo)})
        if _separates(candidate, s1, s2, domain):
            return candidate
    return None


def check_system_equivalence(
    s1: CanonicalSystem,
    s2: CanonicalSystem,
    kind: str,
    domain: Domain,
) -> EquivVerdict:
    """
    Decide whether two systems admit the same points of the domain.

    Args:
        s1, s2: Canonical systems over the domain's variables
        kind: "equality" or "inequality", used in reasons only
        domain: Declared variables with bounds and integrality

    Returns:
        EquivVerdict; Distinct carries a point satisfying exactly one system

    Raises:
        DomainMismatch: A system references a variable outside the domain
    """
    domain.require(s1.variables | s2.variables)
    if s1.matches(s2):
        return EquivVerdict.equivalent(f"canonical {kind} systems are identical")

    witness = None
    for source, target in ((s1, s2), (s2, s1)):
        outcome, witness = _first_violation(source, target, domain)
        if outcome == "unknown":
            return EquivVerdict.unknown(f"implication check for {kind} constraints did not terminate cleanly")
        if outcome == "violated":
            break
    else:
        return EquivVerdict.equivalent(f"{kind} systems imply each other")

    if any(domain.integral):
        lattice = _round_witness(witness, s1, s2, domain)
        if lattice is None:
            return EquivVerdict.unknown("relaxation witness does not round to a lattice point")
        return EquivVerdict.distinct(lattice, "separating lattice point")
    return EquivVerdict.distinct(witness, "separating point from implication LP")


def systems_differ_on(points: Iterable[Mapping[str, float]], s1: CanonicalSystem, s2: CanonicalSystem) -> List[Mapping[str, float]]:
    """Points where exactly one system holds (brute-force oracle support)."""
    return [p for p in points if s1.holds(p, 1e-9) != s2.holds(p, 1e-9)]
