"""
GeneratorGateway - the single LLM-facing entry point of the search.

Wraps a backend and the four agents. Generation runs at the configured
sampling temperature; ranking, grouping and comparison at the structured
temperature.
"""

from typing import Callable, List, Optional, Sequence

from autoform.agents.backends import BackendConfig, CallRecord, GeneratorBackend, build_backend
from autoform.agents.comparison import ComparisonAgent
from autoform.agents.formulation import FormulationAgent, Payload
from autoform.agents.grouping import GroupingAgent
from autoform.agents.prompts import Phase, StagePrompt, build_prompt
from autoform.agents.ranking import RankingAgent, RankResult
from autoform.model.formulation import Formulation, ParameterTable


class GeneratorGateway:
    """Prompting, sampling, ranking, grouping and comparison behind one backend."""

    def __init__(
        self,
        backend: GeneratorBackend,
        temperature: float = 1.0,
        structured_temperature: float = 0.0,
        stream_callback: Optional[Callable[[str], None]] = None,
    ):
        self.backend = backend
        self.formulation_agent = FormulationAgent("formulation", backend, temperature, stream_callback)
        self.ranking_agent = RankingAgent("ranking", backend, structured_temperature, stream_callback)
        self.grouping_agent = GroupingAgent("grouping", backend, structured_temperature, stream_callback)
        self.comparison_agent = ComparisonAgent("comparison", backend, structured_temperature, stream_callback)

    @classmethod
    def from_config(
        cls,
        config: BackendConfig,
        stream_callback: Optional[Callable[[str], None]] = None,
    ) -> "GeneratorGateway":
        return cls(build_backend(config), config.temperature, config.structured_temperature, stream_callback)

    def build_prompt(self, phase: Phase, problem_text: str, partial: Formulation, **kwargs) -> StagePrompt:
        return build_prompt(phase, problem_text, partial, **kwargs)

    def generate_candidates(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        h: int,
        seed: Optional[int] = None,
    ) -> List[Payload]:
        return self.formulation_agent.generate_candidates(phase, problem_text, partial, h, seed)

    def candidate_formulations(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        h: int,
        seed: Optional[int] = None,
    ) -> List[Formulation]:
        return self.formulation_agent.candidate_formulations(phase, problem_text, partial, h, seed)

    def generate_parameters(self, problem_text: str, seed: Optional[int] = None) -> ParameterTable:
        return self.formulation_agent.generate_parameters(problem_text, seed)

    def rank_candidates(
        self,
        phase: Phase,
        problem_text: str,
        partial: Formulation,
        candidates: Sequence[Formulation],
        seed: Optional[int] = None,
    ) -> RankResult:
        return self.ranking_agent.rank_candidates(phase, problem_text, partial, candidates, seed)

    def group_variable_sets(
        self,
        problem_text: str,
        partial: Formulation,
        candidates: Sequence[Formulation],
        seed: Optional[int] = None,
    ) -> List[List[int]]:
        return self.grouping_agent.group_variable_sets(problem_text, partial, candidates, seed)

    def compare_to_baseline(
        self,
        candidate: Formulation,
        baseline: Formulation,
        problem_text: str,
        seed: Optional[int] = None,
    ) -> float:
        return self.comparison_agent.compare_to_baseline(candidate, baseline, problem_text, seed)

    @property
    def call_log(self) -> List[CallRecord]:
        return self.backend.call_log

    def save_call_log(self, path):
        self.backend.save_call_log(path)
