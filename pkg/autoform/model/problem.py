"""Natural-language problem descriptions and their benchmark labels."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

from autoform.errors import SchemaError


class Difficulty(Enum):
    EASY = "Easy"
    MEDIUM = "Medium"
    HARD = "Hard"


class ProblemType(Enum):
    LP = "LP"
    IP = "IP"
    MIP = "MIP"


def _label(enum_cls, raw: Any, field_name: str, aliases: Optional[Dict[str, Any]] = None):
    if raw is None:
        return None
    text = str(raw).strip()
    if aliases and text.upper() in aliases:
        return aliases[text.upper()]
    for member in enum_cls:
        if member.value.lower() == text.lower():
            return member
    raise SchemaError(f"unknown {field_name} {raw!r}", f"$.{field_name}")


@dataclass(frozen=True)
class ProblemDescription:
    id: str
    text: str
    ground_truth_objective: Optional[float] = None
    difficulty: Optional[Difficulty] = None
    problem_type: Optional[ProblemType] = None

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise SchemaError("description must be non-empty", "$.description")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "description": self.text,
            "ground_truth_objective": self.ground_truth_objective,
            "difficulty": self.difficulty.value if self.difficulty else None,
            "type": self.problem_type.value if self.problem_type else None,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "ProblemDescription":
        if not isinstance(data, dict):
            raise SchemaError("problem must be an object")
        for key in ("id", "description"):
            if key not in data:
                raise SchemaError(f"missing key {key!r}", f"$.{key}")
        if not isinstance(data["description"], str):
            raise SchemaError("description must be a string", "$.description")
        gt = data.get("ground_truth_objective")
        if gt is not None:
            if isinstance(gt, bool) or not isinstance(gt, (int, float)) or not math.isfinite(gt):
                raise SchemaError("ground_truth_objective must be a finite number or null", "$.ground_truth_objective")
            gt = float(gt)
        return cls(
            id=str(data["id"]),
            text=data["description"],
            ground_truth_objective=gt,
            difficulty=_label(Difficulty, data.get("difficulty"), "difficulty"),
            problem_type=_label(
                ProblemType,
                data.get("type", data.get("problem_type")),
                "type",
                aliases={"MILP": ProblemType.MIP},
            ),
        )
