"""Formulation schema, problem records, validation and JSON (de)serialization."""

from .formulation import (
    COMPONENT_KEYS,
    MAX_DEPTH,
    ConstraintKind,
    ConstraintSet,
    DecisionVariableDecl,
    Formulation,
    ObjectiveSpec,
    Parameter,
    ParameterTable,
    PartialFormulation,
    Sense,
    VarKind,
    deserialize,
    serialize,
)
from .problem import Difficulty, ProblemDescription, ProblemType
from .validation import Violation, free_names, validate

__all__ = [
    "COMPONENT_KEYS",
    "MAX_DEPTH",
    "ConstraintKind",
    "ConstraintSet",
    "DecisionVariableDecl",
    "Formulation",
    "ObjectiveSpec",
    "Parameter",
    "ParameterTable",
    "PartialFormulation",
    "Sense",
    "VarKind",
    "deserialize",
    "serialize",
    "Difficulty",
    "ProblemDescription",
    "ProblemType",
    "Violation",
    "free_names",
    "validate",
]
