"""CPLEX LP text export, for cross-checking models against external solvers."""

import re
from typing import Dict, List

from autoform.model.formulation import Sense, VarKind
from autoform.solver.model import ComputationalModel

_UNSAFE = re.compile(r"[^A-Za-z0-9_.()]")


def lp_name(name: str) -> str:
    """``x[0,1]`` becomes ``x(0.1)``; LP identifiers may not start with a digit or period."""
    safe = _UNSAFE.sub("_", name.replace("[", "(").replace("]", ")").replace(",", "."))
    if not safe or safe[0].isdigit() or safe[0] == ".":
        safe = "_" + safe
    return safe


def _number(value: float) -> str:
    return f"{value:.12g}"


def _linear(terms: List[tuple], names: List[str]) -> str:
    parts: List[str] = []
    for j, coef in terms:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        magnitude = abs(coef)
        body = names[j] if magnitude == 1 else f"{_number(magnitude)} {names[j]}"
        if not parts:
            parts.append(f"- {body}" if sign == "-" else body)
        else:
            parts.append(f"{sign} {body}")
    if not parts:
        return f"0 {names[0]}" if names else "0"
    return " ".join(parts)


def to_lp(model: ComputationalModel, name: str = "autoform") -> str:
    names = [lp_name(c.name) for c in model.columns]
    lines = [f"\\ Problem: {name}", "Maximize" if model.sense is Sense.MAX else "Minimize"]
    objective = _linear(list(enumerate(model.objective)), names)
    if model.objective_constant:
        sign = "-" if model.objective_constant < 0 else "+"
        objective += f" {sign} {_number(abs(model.objective_constant))}"
    lines.append(f" obj: {objective}")

    lines.append("Subject To")
    used: Dict[str, int] = {}
    for row in model.rows:
        base = lp_name(row.entry)
        used[base] = used.get(base, 0) + 1
        label = base if used[base] == 1 else f"{base}_{used[base]}"
        op = "=" if row.op == "==" else row.op
        lines.append(f" {label}: {_linear(list(row.terms), names)} {op} {_number(row.rhs)}")

    lines.append("Bounds")
    for col, col_name in zip(model.columns, names):
        if col.kind is VarKind.BINARY:
            continue
        if col.lower is None and col.upper is None:
            lines.append(f" {col_name} free")
        elif col.upper is None:
            lines.append(f" {col_name} >= {_number(col.lower)}")
        elif col.lower is None:
            lines.append(f" -inf <= {col_name} <= {_number(col.upper)}")
        else:
            lines.append(f" {_number(col.lower)} <= {col_name} <= {_number(col.upper)}")

    general = [n for c, n in zip(model.columns, names) if c.kind is VarKind.INTEGER]
    binary = [n for c, n in zip(model.columns, names) if c.kind is VarKind.BINARY]
    if general:
        lines.append("General")
        lines.extend(f" {n}" for n in general)
    if binary:
        lines.append("Binary")
        lines.extend(f" {n}" for n in binary)
    lines.append("End")
    return "\n".join(lines) + "\n"
