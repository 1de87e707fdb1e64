"""Search configuration."""

from dataclasses import asdict, dataclass
from typing import Any, Dict

from autoform.errors import SchemaError

STRATEGIES = ("mcts", "sequential")
PRIORS = ("ranked", "uniform")

# short names accepted in config files
_ALIASES = {"H": "samples", "I": "retain", "T": "rollouts", "lambda": "lam"}


@dataclass
class SearchConfig:
    """
    Attributes:
        samples: Completions sampled per expansion (H)
        retain: Children kept per expansion (I)
        rollouts: Rollouts per problem (T)
        omega: UCT exploration constant
        lam: Weight of the prior in V = lam * V_prior + (1 - lam) * V_bp
        seed: Sampling seed forwarded to the backend and tree sampling
        strategy: "mcts" or "sequential"
        prior: "ranked" (LLM ranking) or "uniform" (every child 0.5)
        max_workers: Problems searched in parallel by the benchmark runner
    """
    samples: int = 10
    retain: int = 3
    rollouts: int = 16
    omega: float = 1.0
    lam: float = 0.5
    seed: int = 0
    strategy: str = "mcts"
    prior: str = "ranked"
    max_workers: int = 1

    def __post_init__(self):
        if not self.samples >= self.retain >= 1:
            raise SchemaError(f"need samples >= retain >= 1, got {self.samples} and {self.retain}", "$.search")
        if self.rollouts < 1:
            raise SchemaError("rollouts must be >= 1", "$.search.rollouts")
        if self.omega < 0:
            raise SchemaError("omega must be >= 0", "$.search.omega")
        if not 0.0 <= self.lam <= 1.0:
            raise SchemaError("lam must lie in [0, 1]", "$.search.lam")
        if self.strategy not in STRATEGIES:
            raise SchemaError(f"strategy must be one of {STRATEGIES}", "$.search.strategy")
        if self.prior not in PRIORS:
            raise SchemaError(f"prior must be one of {PRIORS}", "$.search.prior")
        if self.max_workers < 1:
            raise SchemaError("max_workers must be >= 1", "$.search.max_workers")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SearchConfig":
        if not isinstance(data, dict):
            raise SchemaError("search section must be an object", "$.search")
        normalized = {_ALIASES.get(k, k): v for k, v in data.items()}
        unknown = sorted(set(normalized) - set(cls.__dataclass_fields__))
        if unknown:
            raise SchemaError(f"unknown search keys: {', '.join(unknown)}", "$.search")
        return cls(**normalized)
