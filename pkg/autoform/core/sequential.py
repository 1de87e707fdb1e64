"""
Sequential sampling: the same component hierarchy without a tree.

Each rollout draws one candidate per stage conditioned on the partial
formulation built so far, and scores the result with the same reward as
the tree search. There is no pruning and no ranking.
"""

import logging
from typing import Callable, List, Optional

from autoform.agents.gateway import GeneratorGateway
from autoform.agents.prompts import Phase
from autoform.core.config import SearchConfig
from autoform.core.orchestrator import TerminalEvaluator
from autoform.core.results import RolloutEntry, SearchResult
from autoform.errors import ExpansionEmpty
from autoform.model.formulation import MAX_DEPTH, Formulation
from autoform.solver.solve import SolverConfig


class SequentialSampler:
    def __init__(
        self,
        gateway: GeneratorGateway,
        config: Optional[SearchConfig] = None,
        solver_config: Optional[SolverConfig] = None,
        stream_callback: Optional[Callable[[str], None]] = None,
    ):
        self.gateway = gateway
        self.config = config or SearchConfig(strategy="sequential")
        self.solver_config = solver_config or SolverConfig()
        self.stream_callback = stream_callback
        self.logger = logging.getLogger("autoform.search.sequential")

    def stream_output(self, text: str):
        if self.stream_callback:
            self.stream_callback(text)
        self.logger.info(text)

    def _sample(self, problem_text: str, root: Formulation) -> Formulation:
        partial = root
        for stage in range(1, MAX_DEPTH + 1):
            phase = Phase.for_stage(stage)
            candidates = self.gateway.candidate_formulations(phase, problem_text, partial, 1, self.config.seed)
            if not candidates:
                raise ExpansionEmpty(stage, "sample unusable")
            partial = candidates[0]
        return partial

    def run(self, problem_text: str) -> SearchResult:
        parameters = self.gateway.generate_parameters(problem_text, self.config.seed)
        root = Formulation(parameters=parameters, depth=0)
        evaluator = TerminalEvaluator(self.gateway, problem_text, self.solver_config, self.config.seed)
        log: List[RolloutEntry] = []
        for index in range(self.config.rollouts):
            try:
                f = self._sample(problem_text, root)
            except ExpansionEmpty as e:
                self.logger.warning(f"Rollout {index} aborted: {e}")
                log.append(RolloutEntry(index, [], 0.0, aborted=True, reason=str(e)))
                continue
            record, is_new = evaluator.evaluate(f)
            log.append(RolloutEntry(index, [], record.reward, record.ordinal, new_terminal=is_new))
        self.stream_output(f"Sequential sampling finished: {len(evaluator.records)} distinct formulation(s)")
        return SearchResult("sequential", evaluator.records, log, None, evaluator.baseline, evaluator.comparison_calls)
