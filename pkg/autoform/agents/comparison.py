"""Comparison Agent - scores a complete formulation against the baseline."""

from typing import Any, Dict, Optional

from autoform.agents.base import BaseAgent
from autoform.agents.parsing import parse_score
from autoform.agents.prompts import Phase, build_prompt
from autoform.errors import MalformedResponse
from autoform.model.formulation import Formulation

NEUTRAL_SCORE = 0.5


class ComparisonAgent(BaseAgent):
    """Comparison Agent returns a preference score in [0, 1]; above 0.5 favors the candidate."""

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "agent_type": "comparison",
            "description": "Compares a formulation against a baseline formulation",
            "capabilities": ["compare_to_baseline"],
            "inputs": ["candidate", "baseline", "problem_description"],
            "outputs": ["score"],
        }

    def compare_to_baseline(
        self,
        candidate: Formulation,
        baseline: Formulation,
        problem_text: str,
        seed: Optional[int] = None,
    ) -> float:
        """
        Comparative score of ``candidate`` against ``baseline``.

        Identical formulations score 0.5 without a model call. An unreadable
        answer is retried once, then scored 0.5.
        """
        if not (candidate.is_complete and baseline.is_complete):
            raise ValueError("comparison needs two complete formulations")
        if candidate.to_dict() == baseline.to_dict():
            return NEUTRAL_SCORE

        prompt = build_prompt(Phase.COMPARE, problem_text, baseline, candidate=candidate)
        for attempt in range(2):
            response = self.call_llm(prompt, seed)
            try:
                score = parse_score(response)
            except MalformedResponse as e:
                self.logger.warning(f"Unreadable comparison score (attempt {attempt + 1}): {e}")
                continue
            return min(1.0, max(0.0, score))
        self.stream_output("Warning: comparison unreadable twice, using the neutral score")
        return NEUTRAL_SCORE
