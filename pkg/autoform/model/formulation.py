"""
Formulation schema.

A Formulation is the four-component model of a problem: parameters with
decision variables, objective, equality constraints, inequality constraints.
The JSON form uses the five top-level keys of the generation prompts:
"parameters", "decision_variables", "objective", "equality_constraints",
"inequality_constraints". A partial formulation is the same record with a
depth marker; components deeper than the marker are absent.

All records are immutable after construction.
"""

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Mapping, Optional, Tuple, Union

from autoform.errors import GroundError, SchemaError

COMPONENT_KEYS = (
    "parameters",
    "decision_variables",
    "objective",
    "equality_constraints",
    "inequality_constraints",
)

# depth at which each component first appears
COMPONENT_DEPTH = {
    "parameters": 1,
    "decision_variables": 1,
    "objective": 2,
    "equality_constraints": 3,
    "inequality_constraints": 4,
}

MAX_DEPTH = 4

ParamValue = Union[float, Tuple[float, ...], Mapping[Tuple[int, ...], float]]

_SENTINEL_KEYS = (None, "None", "null")


def _is_real(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _parse_key(raw: Any, path: str) -> Tuple[int, ...]:
    if isinstance(raw, bool):
        raise SchemaError(f"index key must be integer, got {raw!r}", path)
    if isinstance(raw, int):
        return (raw,)
    if isinstance(raw, tuple) and raw and all(isinstance(k, int) and not isinstance(k, bool) for k in raw):
        return tuple(raw)
    if isinstance(raw, str):
        parts = [p.strip() for p in raw.strip().strip("()[]").split(",") if p.strip()]
        try:
            return tuple(int(p) for p in parts) if parts else ()
        except ValueError:
            pass
    raise SchemaError(f"index key must be an integer or tuple of integers, got {raw!r}", path)


def _flatten_nested(rows: List[Any], path: str, prefix: Tuple[int, ...] = ()) -> Dict[Tuple[int, ...], float]:
    flat: Dict[Tuple[int, ...], float] = {}
    for i, row in enumerate(rows):
        key = prefix + (i,)
        if isinstance(row, (list, tuple)):
            flat.update(_flatten_nested(list(row), f"{path}[{i}]", key))
        elif _is_real(row):
            flat[key] = float(row)
        else:
            raise SchemaError(f"parameter values must be real, got {row!r}", f"{path}[{i}]")
    return flat


def normalize_param_value(raw: Any, path: str) -> ParamValue:
    """Scalar, list of reals, or index-tuple map; nested lists become tuple-keyed maps."""
    if _is_real(raw):
        return float(raw)
    if isinstance(raw, (list, tuple)):
        items = list(raw)
        if all(_is_real(v) for v in items):
            return tuple(float(v) for v in items)
        if all(isinstance(v, (list, tuple)) for v in items):
            return _flatten_nested(items, path)
        raise SchemaError("list parameters must hold reals or equally nested lists", path)
    if isinstance(raw, dict):
        mapped: Dict[Tuple[int, ...], float] = {}
        for key, value in raw.items():
            if not _is_real(value):
                raise SchemaError(f"parameter values must be real, got {value!r}", f"{path}.{key}")
            mapped[_parse_key(key, path)] = float(value)
        return mapped
    raise SchemaError(f"unsupported parameter value {raw!r}", path)


@dataclass(frozen=True)
class Parameter:
    """One named constant with its descriptive comment."""
    name: str
    value: ParamValue
    comment: str = ""

    @property
    def kind(self) -> str:
        if isinstance(self.value, float):
            return "scalar"
        if isinstance(self.value, tuple):
            return "list"
        return "map"

    @property
    def arities(self) -> frozenset:
        if self.kind == "scalar":
            return frozenset({0})
        if self.kind == "list":
            return frozenset({1})
        return frozenset(len(k) for k in self.value)

    def scalar(self) -> float:
        if self.kind != "scalar":
            raise GroundError(f"parameter {self.name} is indexed but used as a scalar")
        return self.value

    def lookup(self, index: Tuple[int, ...]) -> float:
        if self.kind == "list" and len(index) == 1 and 0 <= index[0] < len(self.value):
            return self.value[index[0]]
        if self.kind == "map" and index in self.value:
            return self.value[index]
        raise GroundError(f"index {list(index)} outside the extent of parameter {self.name}")

    def iter_values(self) -> Iterator[float]:
        if self.kind != "list":
            raise GroundError(f"parameter {self.name} is not list-valued and cannot be iterated")
        return iter(self.value)

    def to_python(self) -> Any:
        """Value in Python-literal shape (tuple keys, integral floats as ints)."""
        def tidy(v: float):
            return int(v) if float(v).is_integer() else v
        if self.kind == "scalar":
            return tidy(self.value)
        if self.kind == "list":
            return [tidy(v) for v in self.value]
        return {(k[0] if len(k) == 1 else k): tidy(v) for k, v in self.value.items()}

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "map":
            value: Any = {",".join(str(i) for i in k): v for k, v in self.value.items()}
        elif self.kind == "list":
            value = list(self.value)
        else:
            value = self.value
        return {"value": value, "comment": self.comment}


@dataclass(frozen=True)
class ParameterTable:
    entries: Mapping[str, Parameter] = field(default_factory=dict)

    def get(self, name: str) -> Optional[Parameter]:
        return self.entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self.entries.values())

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(self.entries)

    def to_dict(self) -> Dict[str, Any]:
        return {name: p.to_dict() for name, p in self.entries.items()}

    @classmethod
    def from_dict(
        cls,
        data: Any,
        path: str = "$.parameters",
        comments: Optional[Mapping[str, str]] = None,
    ) -> "ParameterTable":
        """
        Build from the JSON entry form ``{"value": v, "comment": c}`` or from
        the bare ``name: value`` form produced by the generator.
        """
        if not isinstance(data, dict):
            raise SchemaError("parameters must be an object", path)
        comments = comments or {}
        entries: Dict[str, Parameter] = {}
        for name, raw in data.items():
            if not isinstance(name, str):
                raise SchemaError(f"parameter name must be a string, got {name!r}", path)
            entry_path = f"{path}.{name}"
            if isinstance(raw, dict) and "value" in raw:
                value = normalize_param_value(raw["value"], entry_path)
                comment = str(raw.get("comment") or "")
            else:
                value = normalize_param_value(raw, entry_path)
                comment = comments.get(name, "")
            entries[name] = Parameter(name, value, comment)
        return cls(entries)


class VarKind(Enum):
    CONTINUOUS = "Continuous"
    INTEGER = "Integer"
    BINARY = "Binary"

    @classmethod
    def parse(cls, raw: Any, path: str = "$") -> "VarKind":
        """Accepts ``GRB.INTEGER`` style aliases and plain names."""
        if isinstance(raw, VarKind):
            return raw
        text = str(raw or "continuous").strip()
        if text.upper().startswith("GRB."):
            text = text[4:]
        aliases = {
            "CONTINUOUS": cls.CONTINUOUS,
            "REAL": cls.CONTINUOUS,
            "INTEGER": cls.INTEGER,
            "INT": cls.INTEGER,
            "BINARY": cls.BINARY,
            "BOOL": cls.BINARY,
        }
        kind = aliases.get(text.upper())
        if kind is None:
            raise SchemaError(f"unknown variable type {raw!r}", path)
        return kind

    @property
    def gurobi_name(self) -> str:
        return f"GRB.{self.name}"

    @property
    def is_integral(self) -> bool:
        return self is not VarKind.CONTINUOUS


def _optional_real(raw: Any, path: str) -> Optional[float]:
    if raw is None:
        return None
    if not _is_real(raw):
        raise SchemaError(f"bound must be a real number or null, got {raw!r}", path)
    return float(raw)


@dataclass(frozen=True)
class DecisionVariableDecl:
    name: str
    description: str = ""
    var_kind: VarKind = VarKind.CONTINUOUS
    iteration_space: Optional[str] = None
    lower_bound: Optional[float] = 0.0
    upper_bound: Optional[float] = None

    @property
    def effective_lower_bound(self) -> Optional[float]:
        if self.var_kind is VarKind.BINARY:
            return max(0.0, self.lower_bound or 0.0)
        return self.lower_bound

    @property
    def effective_upper_bound(self) -> Optional[float]:
        if self.var_kind is VarKind.BINARY:
            return 1.0 if self.upper_bound is None else min(1.0, self.upper_bound)
        return self.upper_bound

    def to_dict(self) -> Dict[str, Any]:
        return {
            "description": self.description,
            "type": self.var_kind.gurobi_name,
            "iteration_space": self.iteration_space,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
        }

    @classmethod
    def from_dict(cls, name: str, data: Any, path: str) -> "DecisionVariableDecl":
        if not isinstance(data, dict):
            raise SchemaError("variable declaration must be an object", path)
        space = data.get("iteration_space")
        if isinstance(space, str) and space.strip() in ("", "None"):
            space = None
        if space is not None and not isinstance(space, str):
            raise SchemaError("iteration_space must be a string or null", f"{path}.iteration_space")
        return cls(
            name=name,
            description=str(data.get("description") or ""),
            var_kind=VarKind.parse(data.get("type"), f"{path}.type"),
            iteration_space=space,
            lower_bound=_optional_real(data["lower_bound"], f"{path}.lower_bound") if "lower_bound" in data else 0.0,
            upper_bound=_optional_real(data.get("upper_bound"), f"{path}.upper_bound"),
        )


def variables_from_dict(data: Any, path: str = "$.decision_variables") -> Tuple[DecisionVariableDecl, ...]:
    if not isinstance(data, dict):
        raise SchemaError("decision_variables must be an object", path)
    decls = []
    for name, body in data.items():
        if not isinstance(name, str):
            raise SchemaError(f"variable name must be a string, got {name!r}", path)
        decls.append(DecisionVariableDecl.from_dict(name, body, f"{path}.{name}"))
    return tuple(decls)


def variables_to_dict(variables: Tuple[DecisionVariableDecl, ...]) -> Dict[str, Any]:
    return {v.name: v.to_dict() for v in variables}


class Sense(Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class ObjectiveSpec:
    sense: Sense
    expression: str

    def to_dict(self) -> Dict[str, str]:
        return {self.sense.value: self.expression}

    @classmethod
    def from_dict(cls, data: Any, path: str = "$.objective") -> "ObjectiveSpec":
        if not isinstance(data, dict) or len(data) != 1:
            raise SchemaError("objective must have exactly one key, 'min' or 'max'", path)
        (key, expression), = data.items()
        try:
            sense = Sense(str(key).strip().lower())
        except ValueError:
            raise SchemaError(f"objective key must be 'min' or 'max', got {key!r}", path) from None
        if not isinstance(expression, str):
            raise SchemaError("objective expression must be a string", f"{path}.{key}")
        return cls(sense, expression)


class ConstraintKind(Enum):
    EQUALITY = "equality"
    INEQUALITY = "inequality"

    @property
    def key(self) -> str:
        return f"{self.value}_constraints"


ConstraintEntry = Tuple[Optional[str], Optional[str]]


@dataclass(frozen=True)
class ConstraintSet:
    """
    Named constraint strings of one kind.

    The ``{None: None}`` sentinel is normalized to an empty set; a None key
    mixed with real entries is kept so validation can report it.
    """
    kind: ConstraintKind
    entries: Tuple[ConstraintEntry, ...] = ()

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def items(self) -> List[Tuple[str, str]]:
        return [(n, t) for n, t in self.entries if n is not None and t is not None]

    @classmethod
    def of(cls, kind: ConstraintKind, mapping: Mapping[Any, Any]) -> "ConstraintSet":
        pairs = []
        for name, text in mapping.items():
            pairs.append((None if name in _SENTINEL_KEYS else name, text))
        if len(pairs) == 1 and pairs[0] == (None, None):
            pairs = []
        return cls(kind, tuple(pairs))

    def to_dict(self) -> Dict[str, Any]:
        if self.is_empty:
            return {"null": None}
        return {("null" if n is None else n): t for n, t in self.entries}

    def to_python(self) -> Dict[Any, Any]:
        if self.is_empty:
            return {None: None}
        return {n: t for n, t in self.entries}

    @classmethod
    def from_dict(cls, kind: ConstraintKind, data: Any, path: str) -> "ConstraintSet":
        if not isinstance(data, dict):
            raise SchemaError("constraints must be an object", path)
        for name, text in data.items():
            if text is not None and not isinstance(text, str):
                raise SchemaError("constraint must be a string", f"{path}.{name}")
            if name not in _SENTINEL_KEYS and not isinstance(name, str):
                raise SchemaError(f"constraint name must be a string, got {name!r}", path)
        return cls.of(kind, data)


@dataclass(frozen=True)
class Formulation:
    """
    Complete (depth 4) or partial formulation.

    Depth 1 holds parameters and variables, 2 adds the objective, 3 the
    equality constraints, 4 the inequality constraints. Parameters may be
    present at depth 0 while variables are being generated.
    """
    parameters: ParameterTable = field(default_factory=ParameterTable)
    variables: Tuple[DecisionVariableDecl, ...] = ()
    objective: Optional[ObjectiveSpec] = None
    equalities: Optional[ConstraintSet] = None
    inequalities: Optional[ConstraintSet] = None
    depth: int = MAX_DEPTH

    @property
    def is_complete(self) -> bool:
        return self.depth == MAX_DEPTH

    def truncated(self, depth: int) -> "Formulation":
        return Formulation(
            parameters=self.parameters,
            variables=self.variables if depth >= 1 else (),
            objective=self.objective if depth >= 2 else None,
            equalities=self.equalities if depth >= 3 else None,
            inequalities=self.inequalities if depth >= 4 else None,
            depth=depth,
        )

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"parameters": self.parameters.to_dict()}
        if self.depth >= 1:
            data["decision_variables"] = variables_to_dict(self.variables)
        if self.depth >= 2 and self.objective is not None:
            data["objective"] = self.objective.to_dict()
        if self.depth >= 3 and self.equalities is not None:
            data["equality_constraints"] = self.equalities.to_dict()
        if self.depth >= 4 and self.inequalities is not None:
            data["inequality_constraints"] = self.inequalities.to_dict()
        if self.depth < MAX_DEPTH:
            data["depth"] = self.depth
        return data

    @classmethod
    def from_dict(cls, data: Any) -> "Formulation":
        if not isinstance(data, dict):
            raise SchemaError("formulation must be an object")
        depth = data.get("depth", MAX_DEPTH)
        if not isinstance(depth, int) or isinstance(depth, bool) or not 0 <= depth <= MAX_DEPTH:
            raise SchemaError(f"depth must be an integer in 0..{MAX_DEPTH}", "$.depth")
        for key in COMPONENT_KEYS:
            if COMPONENT_DEPTH[key] <= depth and key not in data:
                raise SchemaError(f"missing key {key!r}", f"$.{key}")
        return cls(
            parameters=ParameterTable.from_dict(data.get("parameters", {})),
            variables=variables_from_dict(data["decision_variables"]) if depth >= 1 else (),
            objective=ObjectiveSpec.from_dict(data["objective"]) if depth >= 2 else None,
            equalities=ConstraintSet.from_dict(
                ConstraintKind.EQUALITY, data["equality_constraints"], "$.equality_constraints"
            ) if depth >= 3 else None,
            inequalities=ConstraintSet.from_dict(
                ConstraintKind.INEQUALITY, data["inequality_constraints"], "$.inequality_constraints"
            ) if depth >= 4 else None,
            depth=depth,
        )


PartialFormulation = Formulation


def serialize(f: Formulation) -> bytes:
    """UTF-8 JSON in the documented five-key schema."""
    return json.dumps(f.to_dict(), indent=2).encode("utf-8")


def deserialize(raw: Union[bytes, str]) -> Formulation:
    """
    Parse UTF-8 JSON into a Formulation.

    Raises:
        SchemaError: With a JSON path to the malformed element
    """
    try:
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        data = json.loads(text)
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise SchemaError(f"invalid JSON: {e}") from e
    return Formulation.from_dict(data)


_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def is_identifier(name: Any) -> bool:
    return isinstance(name, str) and bool(_IDENTIFIER.match(name))
