"""
LLM client for the HTTP generator backend.

Supports OpenAI, Anthropic and OpenAI-compatible APIs (Tetrate, Local).
There is no mock mode: a missing SDK or a failed call raises, and the
backend decides whether to retry.
"""

import logging
import os
from typing import Any, Optional

from autoform.errors import BackendError

PROVIDERS = ("OpenAI", "Tetrate", "Anthropic", "Local")

# errors that retrying will not fix
FATAL_MARKERS = (
    "context length exceeded",
    "authentication error",
    "invalid api key",
    "bad request",
    "max_tokens",
)

TETRATE_ERRORS = {
    401: "Authentication error",
    403: "Authentication error",
    429: "Rate limit exceeded",
    500: "Tetrate service error",
    503: "Tetrate service error",
}


class LLMClient:
    """
    Client for making LLM calls to various providers.

    Tetrate and Local base URLs come from ``TETRATE_API_BASE`` and
    ``LOCAL_API_BASE`` unless an explicit endpoint is configured.
    """

    def __init__(self, provider: str, api_key: str, model: str, endpoint: Optional[str] = None):
        """
        Initialize the LLM client.

        Args:
            provider: Provider name (Tetrate, OpenAI, Anthropic, Local)
            api_key: API key for authentication
            model: Model identifier
            endpoint: Optional base URL overriding the provider default
        """
        if provider not in PROVIDERS:
            raise BackendError(f"Unknown provider: {provider} (expected one of {', '.join(PROVIDERS)})")
        self.provider = provider
        self.api_key = api_key
        self.model = model
        self.endpoint = endpoint
        self.logger = logging.getLogger(f"autoform.llm_client.{provider}")
        self._client = None
        self._init_client()

    def _init_client(self):
        """Initialize the provider-specific client."""
        try:
            if self.provider == "Anthropic":
                from anthropic import Anthropic

                kwargs = {"api_key": self.api_key}
                if self.endpoint:
                    kwargs["base_url"] = self.endpoint
                self._client = Anthropic(**kwargs)
                return

            from openai import OpenAI

            if self.provider == "Tetrate":
                base_url = self.endpoint or os.environ.get("TETRATE_API_BASE", "https://api.router.tetrate.ai/v1")
                self._client = OpenAI(
                    api_key=self.api_key,
                    base_url=base_url,
                    default_headers={"X-Title": "autoform"},
                )
            elif self.provider == "Local":
                base_url = self.endpoint or os.environ.get("LOCAL_API_BASE", "http://localhost:11434/v1")
                self._client = OpenAI(api_key=self.api_key or "local", base_url=base_url)
            else:
                kwargs = {"api_key": self.api_key}
                if self.endpoint:
                    kwargs["base_url"] = self.endpoint
                self._client = OpenAI(**kwargs)
        except ImportError as e:
            raise BackendError(f"Provider SDK for {self.provider} is not installed: {e}") from e

    def call(
        self,
        prompt: str,
        system_prompt: Optional[str] = None,
        temperature: float = 1.0,
        max_tokens: int = 4096,
        seed: Optional[int] = None,
    ) -> str:
        """
        Make a single completion call.

        Args:
            prompt: User prompt
            system_prompt: Optional system prompt
            temperature: Sampling temperature
            max_tokens: Maximum tokens to generate
            seed: Sampling seed, forwarded where the provider supports it

        Returns:
            LLM response text
        """
        if self.provider == "Anthropic":
            return self._call_anthropic(prompt, system_prompt, temperature, max_tokens)
        return self._call_openai(prompt, system_prompt, temperature, max_tokens, seed)

    @staticmethod
    def is_fatal(error: Exception) -> bool:
        text = str(error).lower()
        return any(marker in text for marker in FATAL_MARKERS)

    def _check_tetrate_error(self, response: Any) -> None:
        """Tetrate can return errors inside HTTP 200 responses."""
        error = response.get("error") if isinstance(response, dict) else getattr(response, "error", None)
        if not error:
            return
        message = error.get("message", "unknown error") if isinstance(error, dict) else str(error)
        code = error.get("code", 0) if isinstance(error, dict) else 0
        self.logger.error(f"Tetrate error in 200: [{code}] {message}")
        if code == 400 and "maximum context length" in message.lower():
            raise ValueError(f"Context length exceeded: {message}")
        raise ValueError(f"{TETRATE_ERRORS.get(code, 'Tetrate API error')} [{code}]: {message}")

    def _call_openai(
        self,
        prompt: str,
        system_prompt: Optional[str],
        temperature: float,
        max_tokens: int,
        seed: Optional[int],
    ) -> str:
        messages = []
        if system_prompt:
            messages.append({"role": "system", "content": system_prompt})
        messages.append({"role": "user", "content": prompt})

        api_kwargs = {
            "model": self.model,
            "messages": messages,
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        if seed is not None:
            api_kwargs["seed"] = seed

        response = self._client.chat.completions.create(**api_kwargs)
        if self.provider == "Tetrate":
            self._check_tetrate_error(response)

        if isinstance(response, str):
            if not response.strip():
                raise ValueError(f"Received empty string response from {self.provider} API")
            self.logger.warning("Received raw string response instead of structured object")
            return response
        if not getattr(response, "choices", None):
            raise ValueError(f"No choices in API response from {self.provider}")

        content = response.choices[0].message.content
        if not content:
            self.logger.warning("Response content is empty")
            return ""
        return content

    def _call_anthropic(
        self,
        prompt: str,
        system_prompt: Optional[str],
        temperature: float,
        max_tokens: int,
    ) -> str:
        kwargs = {
            "model": self.model,
            "max_tokens": max_tokens,
            "temperature": temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        if system_prompt:
            kwargs["system"] = system_prompt
        response = self._client.messages.create(**kwargs)
        return "".join(block.text for block in response.content if getattr(block, "type", "text") == "text")
