"""Grouping Agent - merges equivalent decision-variable sets at stage 1."""

from typing import Any, Dict, List, Optional, Sequence

from autoform.agents.base import BaseAgent
from autoform.agents.parsing import parse_groups
from autoform.agents.prompts import Phase, build_prompt
from autoform.errors import MalformedGroups
from autoform.model.formulation import Formulation


class GroupingAgent(BaseAgent):
    """
    Grouping Agent asks the model to cluster variable sets that lead to the
    same objective and constraints. The representative of each group is its
    earliest member.
    """

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "agent_type": "grouping",
            "description": "Groups equivalent decision-variable sets",
            "capabilities": ["group_variable_sets"],
            "inputs": ["partial_formulation", "candidates"],
            "outputs": ["groups"],
        }

    def group_variable_sets(
        self,
        problem_text: str,
        partial: Formulation,
        candidates: Sequence[Formulation],
        seed: Optional[int] = None,
    ) -> List[List[int]]:
        """
        Partition stage-1 candidates.

        Returns:
            Groups of candidate indices, each sorted, ordered by representative.
            Two malformed answers yield singleton groups.
        """
        if not candidates:
            raise ValueError("grouping needs at least one candidate")
        k = len(candidates)
        if k == 1:
            return [[0]]

        prompt = build_prompt(Phase.GROUP, problem_text, partial, candidates=candidates)
        for attempt in range(2):
            response = self.call_llm(prompt, seed)
            try:
                groups = parse_groups(response, k)
            except MalformedGroups as e:
                self.logger.warning(f"Malformed grouping (attempt {attempt + 1}): {e}")
                continue
            self.stream_output(f"variables: {k} candidates in {len(groups)} group(s)")
            return groups
        self.stream_output("Warning: grouping failed twice, keeping every variable set")
        return [[i] for i in range(k)]
