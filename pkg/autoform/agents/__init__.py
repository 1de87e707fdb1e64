"""LLM-facing agents: prompt construction, sampling, ranking, grouping, comparison."""

from .backends import (
    BackendConfig,
    CallRecord,
    GeneratorBackend,
    HttpBackend,
    ScriptedBackend,
    ScriptedFixtures,
    build_backend,
    prompt_sha256,
)
from .base import BaseAgent
from .comparison import NEUTRAL_SCORE, ComparisonAgent
from .formulation import FormulationAgent, attach, parse_payload
from .gateway import GeneratorGateway
from .grouping import GroupingAgent
from .prompts import Phase, StagePrompt, build_prompt, load_template, render_formalization
from .ranking import RankingAgent, RankResult, normalized_rank_score

__all__ = [
    "BackendConfig",
    "CallRecord",
    "GeneratorBackend",
    "HttpBackend",
    "ScriptedBackend",
    "ScriptedFixtures",
    "build_backend",
    "prompt_sha256",
    "BaseAgent",
    "NEUTRAL_SCORE",
    "ComparisonAgent",
    "FormulationAgent",
    "attach",
    "parse_payload",
    "GeneratorGateway",
    "GroupingAgent",
    "Phase",
    "StagePrompt",
    "build_prompt",
    "load_template",
    "render_formalization",
    "RankingAgent",
    "RankResult",
    "normalized_rank_score",
]
