"""
Stage prompt construction.

Templates live in ``templates/*.txt`` next to this module. A rendered prompt
is the preamble (problem description plus the current formalization_dict)
followed by the phase template, with placeholders substituted and nothing
else changed.
"""

import json
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence

from autoform.model.formulation import ConstraintSet, Formulation

TEMPLATE_DIR = Path(__file__).parent / "templates"

PROBLEM_PLACEHOLDER = "###PROBLEM DESCRIPTION###"
FORMALIZATION_PLACEHOLDER = "###FORMALIZATION###"
SOLUTIONS_PLACEHOLDER = "###SOLUTIONS###"
CANDIDATE_PLACEHOLDER = "###CANDIDATE###"
VARIABLE_PLACEHOLDER = "#VARIABLE#"

INDENT = "    "


class Phase(Enum):
    PARAMETERS = "parameters"
    VARIABLES = "variables"
    OBJECTIVE = "objective"
    EQUALITIES = "equalities"
    INEQUALITIES = "inequalities"
    RANK = "rank"
    GROUP = "group"
    COMPARE = "compare"

    @property
    def is_generation(self) -> bool:
        return self in GENERATION_PHASES

    @property
    def stage(self) -> int:
        """Tree depth a candidate of this phase produces (parameters share stage 1)."""
        return STAGE_OF_PHASE.get(self, 0)

    @property
    def component_key(self) -> str:
        return COMPONENT_KEY_OF_PHASE[self]

    @classmethod
    def for_stage(cls, stage: int) -> "Phase":
        """Generation phase producing the component of depth ``stage``."""
        for phase, depth in STAGE_OF_PHASE.items():
            if depth == stage and phase is not cls.PARAMETERS:
                return phase
        raise ValueError(f"no generation phase for stage {stage}")


GENERATION_PHASES = (
    Phase.PARAMETERS,
    Phase.VARIABLES,
    Phase.OBJECTIVE,
    Phase.EQUALITIES,
    Phase.INEQUALITIES,
)

STAGE_OF_PHASE = {
    Phase.PARAMETERS: 1,
    Phase.VARIABLES: 1,
    Phase.OBJECTIVE: 2,
    Phase.EQUALITIES: 3,
    Phase.INEQUALITIES: 4,
}

COMPONENT_KEY_OF_PHASE = {
    Phase.PARAMETERS: "parameters",
    Phase.VARIABLES: "decision_variables",
    Phase.OBJECTIVE: "objective",
    Phase.EQUALITIES: "equality_constraints",
    Phase.INEQUALITIES: "inequality_constraints",
}

# depth the partial formulation must have when the phase is prompted
REQUIRED_DEPTH = {
    Phase.PARAMETERS: 0,
    Phase.VARIABLES: 0,
    Phase.OBJECTIVE: 1,
    Phase.EQUALITIES: 2,
    Phase.INEQUALITIES: 3,
}

# wording substituted for #VARIABLE# in the ranking template
RANKED_COMPONENT_NAMES = {
    Phase.VARIABLES: "decision variables",
    Phase.OBJECTIVE: "objective",
    Phase.EQUALITIES: "equality constraints",
    Phase.INEQUALITIES: "inequality constraints",
}


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    """Template text without its trailing newline."""
    return (TEMPLATE_DIR / f"{name}.txt").read_text(encoding="utf-8").rstrip("\n")


@dataclass(frozen=True)
class StagePrompt:
    phase: Phase
    rendered_text: str

    @property
    def stage(self) -> int:
        return self.phase.stage

    def __str__(self) -> str:
        return self.rendered_text


def py_literal(value: Any, level: int = 0) -> str:
    """Python-literal text with double-quoted strings and tuple keys kept as tuples."""
    if value is None or isinstance(value, bool):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, float):
        return repr(int(value)) if value.is_integer() else repr(value)
    if isinstance(value, int):
        return repr(value)
    if isinstance(value, tuple):
        inner = ", ".join(py_literal(v) for v in value)
        return f"({inner},)" if len(value) == 1 else f"({inner})"
    if isinstance(value, list):
        return "[" + ", ".join(py_literal(v, level) for v in value) + "]"
    if isinstance(value, Mapping):
        if not value:
            return "{}"
        pad = INDENT * (level + 1)
        lines = [f"{pad}{py_literal(k)}: {py_literal(v, level + 1)}," for k, v in value.items()]
        return "{\n" + "\n".join(lines) + "\n" + INDENT * level + "}"
    raise TypeError(f"cannot render {type(value).__name__} as a literal")


def _parameters_block(f: Formulation, level: int) -> str:
    if not len(f.parameters):
        return "{}"
    pad = INDENT * (level + 1)
    lines = []
    for p in f.parameters:
        if p.comment:
            lines.append(f"{pad}# {p.comment}")
        lines.append(f"{pad}{py_literal(p.name)}: {py_literal(p.to_python(), level + 1)},")
    return "{\n" + "\n".join(lines) + "\n" + INDENT * level + "}"


def _variables_python(f: Formulation) -> dict:
    out = {}
    for v in f.variables:
        body = {
            "description": v.description,
            "type": v.var_kind.gurobi_name,
            "iteration_space": v.iteration_space,
        }
        if v.lower_bound != 0.0:
            body["lower_bound"] = v.lower_bound
        if v.upper_bound is not None:
            body["upper_bound"] = v.upper_bound
        out[v.name] = body
    return out


def _constraints_python(cs: Optional[ConstraintSet]) -> dict:
    return {} if cs is None else cs.to_python()


def component_literal(f: Formulation, key: str, level: int = 0) -> str:
    """One component of ``f`` in formalization_dict notation; ``{}`` when absent."""
    if key == "parameters":
        return _parameters_block(f, level)
    if key == "decision_variables":
        return py_literal(_variables_python(f), level) if f.depth >= 1 else "{}"
    if key == "objective":
        return py_literal(f.objective.to_dict(), level) if f.objective is not None and f.depth >= 2 else "{}"
    if key == "equality_constraints":
        return py_literal(_constraints_python(f.equalities), level) if f.depth >= 3 else "{}"
    if key == "inequality_constraints":
        return py_literal(_constraints_python(f.inequalities), level) if f.depth >= 4 else "{}"
    raise KeyError(key)


def render_formalization(f: Formulation, level: int = 0) -> str:
    """The whole formalization_dict with every key present."""
    pad = INDENT * (level + 1)
    lines = [f"{pad}{py_literal(key)}: {component_literal(f, key, level + 1)}," for key in COMPONENT_KEY_OF_PHASE.values()]
    return "{\n" + "\n".join(lines) + "\n" + INDENT * level + "}"


def solution_name(i: int) -> str:
    return f"solution_{i + 1}"


def render_solutions(candidates: Sequence[Formulation], phase: Phase) -> str:
    """Candidates keyed ``solution_1..K`` showing only the component being chosen."""
    key = phase.component_key
    pad = INDENT
    lines = [
        f"{pad}{py_literal(solution_name(i))}: {component_literal(f, key, 1)},"
        for i, f in enumerate(candidates)
    ]
    return "{\n" + "\n".join(lines) + "\n}"


def _preamble(problem_text: str, partial: Formulation) -> str:
    return (
        load_template("preamble")
        .replace(PROBLEM_PLACEHOLDER, problem_text)
        .replace(FORMALIZATION_PLACEHOLDER, render_formalization(partial))
    )


def build_prompt(
    phase: Phase,
    problem_text: str,
    partial: Formulation,
    candidates: Optional[Sequence[Formulation]] = None,
    ranked_phase: Optional[Phase] = None,
    candidate: Optional[Formulation] = None,
) -> StagePrompt:
    """
    Render the prompt for one phase.

    Args:
        phase: Generation phase, or RANK / GROUP / COMPARE
        problem_text: Natural-language problem description, embedded verbatim
        partial: Current formalization (the baseline for COMPARE)
        candidates: Candidate formulations for RANK and GROUP
        ranked_phase: Component being ranked (RANK only)
        candidate: Formulation judged against ``partial`` (COMPARE only)

    Returns:
        StagePrompt

    Raises:
        ValueError: The partial depth does not match the phase, or a required argument is missing
    """
    if phase.is_generation and partial.depth != REQUIRED_DEPTH[phase]:
        raise ValueError(f"{phase.value} prompts need a depth-{REQUIRED_DEPTH[phase]} formulation, got {partial.depth}")

    body = load_template(phase.value)
    if phase is Phase.RANK:
        if not candidates or ranked_phase not in RANKED_COMPONENT_NAMES:
            raise ValueError("ranking needs candidates and a ranked component")
        body = body.replace(VARIABLE_PLACEHOLDER, RANKED_COMPONENT_NAMES[ranked_phase])
        body = body.replace(SOLUTIONS_PLACEHOLDER, render_solutions(candidates, ranked_phase))
    elif phase is Phase.GROUP:
        if not candidates:
            raise ValueError("grouping needs candidates")
        body = body.replace(SOLUTIONS_PLACEHOLDER, render_solutions(candidates, Phase.VARIABLES))
    elif phase is Phase.COMPARE:
        if candidate is None:
            raise ValueError("comparison needs a candidate formulation")
        body = body.replace(CANDIDATE_PLACEHOLDER, render_formalization(candidate))

    return StagePrompt(phase, _preamble(problem_text, partial) + "\n\n" + body)


def template_names() -> List[str]:
    return sorted(p.stem for p in TEMPLATE_DIR.glob("*.txt"))
