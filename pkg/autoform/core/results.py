"""Terminal records and search results."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from autoform.core.tree import SearchTree
from autoform.model.formulation import Formulation
from autoform.solver.model import ComputationalModel
from autoform.solver.solve import SolveResult, SolveStatus

LOWERING_FAILED = "LoweringError"


@dataclass
class TerminalRecord:
    """
    One distinct complete formulation found by the search.

    Attributes:
        formulation: Complete formulation
        reward: Solver indicator times comparative score
        status: SolveStatus value, or "LoweringError"
        ordinal: Discovery order, from 0
        node_id: Terminal node in the search tree (None for sequential runs)
        path: Node ids root to terminal
        model: Lowered model; not persisted
        solve_result: Solver outcome when lowering succeeded
        detail: Lowering or solver message
    """
    formulation: Formulation
    reward: float
    status: str
    ordinal: int
    node_id: Optional[int] = None
    path: List[int] = field(default_factory=list)
    model: Optional[ComputationalModel] = None
    solve_result: Optional[SolveResult] = None
    detail: str = ""

    @property
    def objective_value(self) -> Optional[float]:
        return self.solve_result.objective_value if self.solve_result is not None else None

    @property
    def solved(self) -> bool:
        return self.status == SolveStatus.OPTIMAL.value

    def to_dict(self, include_time: bool = True) -> Dict[str, Any]:
        return {
            "ordinal": self.ordinal,
            "node_id": self.node_id,
            "path": list(self.path),
            "reward": self.reward,
            "status": self.status,
            "objective_value": self.objective_value,
            "solve": self.solve_result.to_dict(include_time) if self.solve_result is not None else None,
            "detail": self.detail,
            "formulation": self.formulation.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TerminalRecord":
        solve_data = data.get("solve")
        solve_result = None
        if solve_data:
            solve_result = SolveResult(
                status=SolveStatus(solve_data["status"]),
                objective_value=solve_data.get("objective_value"),
                assignment=solve_data.get("assignment"),
                solve_time=float(solve_data.get("solve_time", 0.0)),
                detail=solve_data.get("detail", ""),
            )
        return cls(
            formulation=Formulation.from_dict(data["formulation"]),
            reward=float(data["reward"]),
            status=str(data["status"]),
            ordinal=int(data["ordinal"]),
            node_id=data.get("node_id"),
            path=[int(p) for p in data.get("path", [])],
            solve_result=solve_result,
            detail=data.get("detail", ""),
        )


@dataclass
class RolloutEntry:
    """One rollout: the path walked, the reward routed through it, and which terminal (if any) it reached."""
    rollout: int
    path: List[int]
    reward: float
    terminal: Optional[int] = None
    aborted: bool = False
    new_terminal: bool = False
    reason: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rollout": self.rollout,
            "path": list(self.path),
            "reward": self.reward,
            "terminal": self.terminal,
            "aborted": self.aborted,
            "new_terminal": self.new_terminal,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RolloutEntry":
        return cls(
            rollout=int(data["rollout"]),
            path=[int(p) for p in data.get("path", [])],
            reward=float(data["reward"]),
            terminal=data.get("terminal"),
            aborted=bool(data.get("aborted", False)),
            new_terminal=bool(data.get("new_terminal", False)),
            reason=data.get("reason", ""),
        )


@dataclass
class SearchResult:
    strategy: str
    terminals: List[TerminalRecord]
    rollout_log: List[RolloutEntry]
    tree: Optional[SearchTree] = None
    baseline: Optional[Formulation] = None
    comparison_calls: int = 0

    @property
    def formulations(self) -> List[Formulation]:
        return [t.formulation for t in self.terminals]
