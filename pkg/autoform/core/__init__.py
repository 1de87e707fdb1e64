"""Tree search over formulation components."""

from .config import PRIORS, STRATEGIES, SearchConfig
from .orchestrator import (
    SearchOrchestrator,
    TerminalEvaluator,
    backpropagate,
    equivalent_terminals,
    greedy_child,
    run_search,
    terminal_reward,
    uct_score,
    uct_select,
)
from .results import LOWERING_FAILED, RolloutEntry, SearchResult, TerminalRecord
from .sequential import SequentialSampler
from .tree import SearchNode, SearchTree, component_payload, greedy_formulation, random_formulation

__all__ = [
    "PRIORS",
    "STRATEGIES",
    "SearchConfig",
    "SearchOrchestrator",
    "TerminalEvaluator",
    "backpropagate",
    "equivalent_terminals",
    "greedy_child",
    "run_search",
    "terminal_reward",
    "uct_score",
    "uct_select",
    "LOWERING_FAILED",
    "RolloutEntry",
    "SearchResult",
    "TerminalRecord",
    "SequentialSampler",
    "SearchNode",
    "SearchTree",
    "component_payload",
    "greedy_formulation",
    "random_formulation",
]
