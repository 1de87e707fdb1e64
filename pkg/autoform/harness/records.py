"""Per-problem run records."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from autoform.core.results import RolloutEntry, SearchResult, TerminalRecord
from autoform.core.tree import SearchTree, greedy_formulation
from autoform.model.problem import ProblemDescription


@dataclass
class RunRecord:
    """
    Everything persisted for one problem.

    Wall-clock timings are kept out of ``to_dict`` and stored in a sidecar
    file so that repeated scripted runs produce identical record bytes.
    """
    problem: ProblemDescription
    config: Dict[str, Any]
    strategy: str
    terminals: List[TerminalRecord]
    rollout_log: List[RolloutEntry]
    tree_snapshot: Optional[Dict[str, Any]] = None
    call_log: Optional[str] = None
    error: Optional[str] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_search(
        cls,
        problem: ProblemDescription,
        config: Dict[str, Any],
        result: SearchResult,
        call_log: Optional[str] = None,
    ) -> "RunRecord":
        return cls(
            problem=problem,
            config=config,
            strategy=result.strategy,
            terminals=list(result.terminals),
            rollout_log=list(result.rollout_log),
            tree_snapshot=result.tree.snapshot() if result.tree is not None else None,
            call_log=call_log,
        )

    @classmethod
    def failed(cls, problem: ProblemDescription, config: Dict[str, Any], error: str) -> "RunRecord":
        strategy = config.get("search", {}).get("strategy", "mcts")
        return cls(problem, config, strategy, [], [], error=error)

    @property
    def tree(self) -> Optional[SearchTree]:
        return SearchTree.from_snapshot(self.tree_snapshot) if self.tree_snapshot else None

    @property
    def lam(self) -> float:
        return float(self.config.get("search", {}).get("lam", 0.5))

    def check(self) -> List[str]:
        """Broken invariants, empty when the record is consistent."""
        problems = []
        if self.error:
            return problems
        rollouts = self.config.get("search", {}).get("rollouts")
        if rollouts is not None and len(self.rollout_log) != rollouts:
            problems.append(f"rollout log has {len(self.rollout_log)} entries, expected {rollouts}")
        ordinals = {t.ordinal for t in self.terminals}
        for entry in self.rollout_log:
            if entry.terminal is not None and entry.terminal not in ordinals:
                problems.append(f"rollout {entry.rollout} references unknown terminal {entry.terminal}")
        return problems

    def statistics(self) -> Dict[str, Any]:
        tree = self.tree
        stats: Dict[str, Any] = {
            "unique_formulations": len(self.terminals),
            "aborted_rollouts": sum(1 for e in self.rollout_log if e.aborted),
        }
        if tree is not None:
            stats["nodes"] = len(tree)
            stats["stages"] = {str(k): v for k, v in tree.stage_statistics().items()}
            greedy = greedy_formulation(tree)
            stats["greedy_complete"] = greedy is not None
        return stats

    def to_dict(self) -> Dict[str, Any]:
        return {
            "problem": self.problem.to_dict(),
            "config": self.config,
            "strategy": self.strategy,
            "error": self.error,
            "statistics": self.statistics() if not self.error else {},
            "terminals": [t.to_dict(include_time=False) for t in self.terminals],
            "rollout_log": [e.to_dict() for e in self.rollout_log],
            "tree": self.tree_snapshot,
            "call_log": self.call_log,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunRecord":
        return cls(
            problem=ProblemDescription.from_dict(data["problem"]),
            config=data.get("config", {}),
            strategy=data.get("strategy", "mcts"),
            terminals=[TerminalRecord.from_dict(t) for t in data.get("terminals", [])],
            rollout_log=[RolloutEntry.from_dict(e) for e in data.get("rollout_log", [])],
            tree_snapshot=data.get("tree"),
            call_log=data.get("call_log"),
            error=data.get("error"),
        )
