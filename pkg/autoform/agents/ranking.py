"""Ranking Agent - orders sibling candidates and turns ranks into prior scores."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

from autoform.agents.base import BaseAgent
from autoform.agents.parsing import parse_rank
from autoform.agents.prompts import Phase, build_prompt
from autoform.errors import MalformedRank
from autoform.model.formulation import Formulation


def normalized_rank_score(r: int, k: int) -> float:
    """Center-normalized score of rank ``r`` among ``k``: 1 - (r - 0.5) / k."""
    if not 1 <= r <= k:
        raise ValueError(f"rank {r} outside 1..{k}")
    return 1.0 - (r - 0.5) / k


@dataclass(frozen=True)
class RankResult:
    """
    Attributes:
        order: Candidate indices from best to worst
        scores: Normalized score per candidate index
        fallback: True when generation order was used instead of a parsed ranking
    """
    order: List[int]
    scores: List[float]
    fallback: bool = False

    @classmethod
    def from_order(cls, order: Sequence[int], fallback: bool = False) -> "RankResult":
        k = len(order)
        scores = [0.0] * k
        for rank, index in enumerate(order, 1):
            scores[index] = normalized_rank_score(rank, k)
        return cls(list(order), scores, fallback)

    def rank_of(self, index: int) -> int:
        return self.order.index(index) + 1

    def to_dict(self) -> Dict[str, Any]:
        return {"order": self.order, "scores": self.scores, "fallback": self.fallback}


class RankingAgent(BaseAgent):
    """Ranking Agent asks for a full ranking of the retained children of a node."""

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "agent_type": "ranking",
            "description": "Ranks sibling candidates to initialize prior values",
            "capabilities": ["rank_candidates"],
            "inputs": ["partial_formulation", "candidates"],
            "outputs": ["rank_result"],
        }

    def rank_candidates(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        candidates: Sequence[Formulation],
        seed: Optional[int] = None,
    ) -> RankResult:
        """
        Rank ``candidates`` (formulations extending ``partial`` by ``phase``).

        A single candidate is not sent to the model. A malformed ranking is
        retried once; a second failure falls back to generation order.
        """
        if not candidates:
            raise ValueError("ranking needs at least one candidate")
        k = len(candidates)
        if k == 1:
            return RankResult.from_order([0])

        prompt = build_prompt(Phase.RANK, problem_text, partial, candidates=candidates, ranked_phase=phase)
        for attempt in range(2):
            response = self.call_llm(prompt, seed)
            try:
                order = parse_rank(response, k)
            except MalformedRank as e:
                self.logger.warning(f"Malformed ranking (attempt {attempt + 1}): {e}")
                continue
            self.stream_output(f"{phase.value}: ranked {k} candidates")
            return RankResult.from_order(order)
        self.stream_output(f"Warning: ranking failed twice, using generation order for {k} candidates")
        return RankResult.from_order(list(range(k)), fallback=True)
