"""
Base agent class.

Each agent owns one LLM-facing role (generation, ranking, grouping,
comparison). Agents share a GeneratorBackend and narrate through an
optional stream callback.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Callable, Dict, List, Optional

from autoform.agents.backends import GeneratorBackend
from autoform.agents.prompts import StagePrompt


class BaseAgent(ABC):
    """Abstract base class for all agents."""

    def __init__(
        self,
        agent_id: str,
        backend: GeneratorBackend,
        temperature: float = 1.0,
        stream_callback: Optional[Callable[[str], None]] = None,
    ):
        """
        Initialize the base agent.

        Args:
            agent_id: Unique identifier for this agent
            backend: Generator backend shared by all agents of a run
            temperature: Sampling temperature for this agent's calls
            stream_callback: Optional callback for streaming output
        """
        self.agent_id = agent_id
        self.backend = backend
        self.temperature = temperature
        self.stream_callback = stream_callback
        self.logger = logging.getLogger(f"autoform.agent.{agent_id}")

    @abstractmethod
    def get_capabilities(self) -> Dict[str, Any]:
        """
        Return the capabilities of this agent.

        Returns:
            Dictionary describing agent capabilities
        """

    def stream_output(self, text: str):
        if self.stream_callback:
            self.stream_callback(f"[{self.agent_id}] {text}")
        self.logger.debug(text)

    def call_llm(self, prompt: StagePrompt, seed: Optional[int] = None) -> str:
        """
        Single completion for a rendered prompt.

        Raises:
            BackendError: Transport failure after the backend's retries
        """
        self.logger.info(f"LLM call ({prompt.phase.value}, T={self.temperature}): {len(prompt.rendered_text)} chars")
        return self.backend.complete(prompt.rendered_text, self.temperature, seed, prompt.phase.value)

    def call_many(self, prompt: StagePrompt, n: int, seed: Optional[int] = None) -> List[str]:
        """``n`` independent samples of one prompt."""
        self.logger.info(f"LLM call ({prompt.phase.value}, T={self.temperature}) x{n}")
        return self.backend.complete_many(prompt.rendered_text, n, self.temperature, seed, prompt.phase.value)
