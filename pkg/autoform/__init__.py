"""
autoform - automated formulation of LP/MILP models from natural language.

An LLM proposes formulation components stage by stage (parameters and
decision variables, objective, equality constraints, inequality
constraints); a Monte-Carlo tree search explores them, pruning trivially
equivalent candidates symbolically and rewarding complete formulations by
solver outcome and comparison against a baseline.
"""

__version__ = "0.1.0"

from autoform.errors import AutoformError
from autoform.model import Formulation, ProblemDescription, deserialize, serialize, validate
from autoform.solver import SolveResult, SolveStatus, lower, solve
from autoform.agents import GeneratorGateway
from autoform.core import SearchConfig, SearchTree, TerminalRecord, run_search
from autoform.config import AutoformConfig

__all__ = [
    "__version__",
    "AutoformError",
    "Formulation",
    "ProblemDescription",
    "deserialize",
    "serialize",
    "validate",
    "SolveResult",
    "SolveStatus",
    "lower",
    "solve",
    "GeneratorGateway",
    "SearchConfig",
    "SearchTree",
    "TerminalRecord",
    "run_search",
    "AutoformConfig",
]
