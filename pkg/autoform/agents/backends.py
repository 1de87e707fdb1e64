"""
Generator backends.

A backend turns a prompt into completion text. Every call is identified by
``(sha256(prompt), ordinal)`` where the ordinal counts earlier calls with
the same prompt. Ordinals are reserved under a lock before any request is
issued, so concurrent sampling keeps a deterministic call log.

``ScriptedBackend`` replays fixture files and is a pure function of that
identity. ``HttpBackend`` calls a provider through ``LLMClient``.
"""

import hashlib
import json
import logging
import os
import threading
import time
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from autoform.errors import BackendError, SchemaError
from autoform.utils.llm_client import PROVIDERS, LLMClient
from autoform.utils.resources import resolve_data_path

API_KEY_ENV = "AUTOFORM_API_KEY"
PROVIDER_KEY_ENV = {
    "OpenAI": "OPENAI_API_KEY",
    "Anthropic": "ANTHROPIC_API_KEY",
    "Tetrate": "TETRATE_API_KEY",
    "Local": "LOCAL_API_KEY",
}


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CallRecord:
    prompt_sha256: str
    ordinal: int
    phase: str
    temperature: float
    response: str

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class BackendConfig:
    """Backend section of the run configuration."""
    kind: str = "scripted"
    provider: str = "Tetrate"
    endpoint: Optional[str] = None
    model: str = "claude-haiku-4-5"
    temperature: float = 1.0
    structured_temperature: float = 0.0
    max_retries: int = 3
    retry_delay: float = 1.0
    max_tokens: int = 4096
    fixtures: Optional[str] = None
    strict: bool = False
    max_workers: int = 4

    def __post_init__(self):
        if self.kind not in ("scripted", "http"):
            raise SchemaError(f"backend kind must be 'scripted' or 'http', got {self.kind!r}", "$.backend.kind")
        if self.provider not in PROVIDERS:
            raise SchemaError(f"unknown provider {self.provider!r}", "$.backend.provider")
        if self.max_retries < 0:
            raise SchemaError("max_retries must be >= 0", "$.backend.max_retries")

    def api_key(self) -> str:
        """Key from AUTOFORM_API_KEY, then the provider's usual variable."""
        return os.environ.get(API_KEY_ENV) or os.environ.get(PROVIDER_KEY_ENV.get(self.provider, ""), "")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BackendConfig":
        if not isinstance(data, dict):
            raise SchemaError("backend section must be an object", "$.backend")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise SchemaError(f"unknown backend keys: {', '.join(unknown)}", "$.backend")
        return cls(**data)


class GeneratorBackend(ABC):
    """Prompt to completion, with ordinal bookkeeping and a call log."""

    def __init__(self, max_workers: int = 4):
        self.max_workers = max(1, max_workers)
        self.logger = logging.getLogger(f"autoform.backend.{type(self).__name__}")
        self._lock = threading.Lock()
        self._ordinals: Dict[str, int] = {}
        self._calls: List[CallRecord] = []

    @abstractmethod
    def _complete_at(self, prompt: str, sha: str, ordinal: int, temperature: float, seed: Optional[int]) -> str:
        """Completion for one identified call."""

    def _reserve(self, sha: str, n: int) -> range:
        with self._lock:
            first = self._ordinals.get(sha, 0)
            self._ordinals[sha] = first + n
        return range(first, first + n)

    def _record(self, records: Sequence[CallRecord]):
        with self._lock:
            self._calls.extend(records)

    def complete(self, prompt: str, temperature: float = 1.0, seed: Optional[int] = None, phase: str = "") -> str:
        """
        One completion.

        Raises:
            BackendError: Transport failure after the retry budget
        """
        return self.complete_many(prompt, 1, temperature, seed, phase)[0]

    def complete_many(
        self,
        prompt: str,
        n: int,
        temperature: float = 1.0,
        seed: Optional[int] = None,
        phase: str = "",
    ) -> List[str]:
        """
        ``n`` independent completions of one prompt, issued concurrently.

        Responses come back in ordinal order regardless of completion order.
        """
        sha = prompt_sha256(prompt)
        ordinals = self._reserve(sha, n)
        self.logger.debug(f"{phase or 'call'} x{n}: {sha[:12]} ordinals {ordinals.start}..{ordinals.stop - 1}")
        if n == 1 or self.max_workers == 1:
            responses = [self._complete_at(prompt, sha, o, temperature, seed) for o in ordinals]
        else:
            with ThreadPoolExecutor(max_workers=min(self.max_workers, n)) as pool:
                responses = list(pool.map(lambda o: self._complete_at(prompt, sha, o, temperature, seed), ordinals))
        self._record([CallRecord(sha, o, phase, temperature, r) for o, r in zip(ordinals, responses)])
        return responses

    @property
    def call_log(self) -> List[CallRecord]:
        with self._lock:
            return list(self._calls)

    def save_call_log(self, path: Union[str, Path]):
        """Write the call log as JSONL."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for record in self.call_log:
                f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


@dataclass
class _MatchRule:
    substrings: Tuple[str, ...]
    responses: Tuple[str, ...]

    def applies(self, prompt: str) -> bool:
        return all(s in prompt for s in self.substrings)


@dataclass
class ScriptedFixtures:
    """
    Fixture entries, one JSON object per line, either

    - ``{"prompt_sha256": ..., "ordinal": n, "response": ...}`` for an exact call, or
    - ``{"match": [substr, ...], "responses": [...]}`` for any prompt containing
      every substring; ordinal ``n`` gets ``responses[n % len(responses)]``.

    Exact entries win; among match rules the first listed wins.
    """
    exact: Dict[Tuple[str, int], str] = field(default_factory=dict)
    rules: List[_MatchRule] = field(default_factory=list)

    @classmethod
    def from_records(cls, records: Sequence[Dict[str, Any]], source: str = "fixtures") -> "ScriptedFixtures":
        fixtures = cls()
        for lineno, entry in enumerate(records, 1):
            if not isinstance(entry, dict):
                raise SchemaError("fixture entry must be an object", source, lineno)
            if "prompt_sha256" in entry:
                try:
                    fixtures.exact[(str(entry["prompt_sha256"]), int(entry.get("ordinal", 0)))] = str(entry["response"])
                except (KeyError, TypeError, ValueError) as e:
                    raise SchemaError(f"bad exact fixture entry: {e}", source, lineno) from e
            elif "match" in entry:
                match = entry["match"]
                responses = entry.get("responses", [entry["response"]] if "response" in entry else [])
                if isinstance(match, str):
                    match = [match]
                if not responses or not all(isinstance(r, str) for r in responses):
                    raise SchemaError("match entry needs a non-empty list of string responses", source, lineno)
                fixtures.rules.append(_MatchRule(tuple(match), tuple(responses)))
            else:
                raise SchemaError("fixture entry needs 'prompt_sha256' or 'match'", source, lineno)
        return fixtures

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ScriptedFixtures":
        path = resolve_data_path(path)
        records = []
        with open(path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError as e:
                    raise SchemaError(f"invalid JSON: {e}", str(path), lineno) from e
        return cls.from_records(records, str(path))

    def lookup(self, prompt: str, sha: str, ordinal: int) -> Optional[str]:
        if (sha, ordinal) in self.exact:
            return self.exact[(sha, ordinal)]
        for rule in self.rules:
            if rule.applies(prompt):
                return rule.responses[ordinal % len(rule.responses)]
        return None


class ScriptedBackend(GeneratorBackend):
    """Replays fixture responses; never touches the network."""

    def __init__(self, fixtures: ScriptedFixtures, strict: bool = False, max_workers: int = 4):
        super().__init__(max_workers)
        self.fixtures = fixtures
        self.strict = strict

    @classmethod
    def from_file(cls, path: Union[str, Path], strict: bool = False, max_workers: int = 4) -> "ScriptedBackend":
        return cls(ScriptedFixtures.load(path), strict, max_workers)

    @classmethod
    def from_records(cls, records: Sequence[Dict[str, Any]], strict: bool = False) -> "ScriptedBackend":
        return cls(ScriptedFixtures.from_records(records), strict)

    def _complete_at(self, prompt: str, sha: str, ordinal: int, temperature: float, seed: Optional[int]) -> str:
        response = self.fixtures.lookup(prompt, sha, ordinal)
        if response is None:
            if self.strict:
                raise BackendError(f"no fixture for prompt {sha[:12]} ordinal {ordinal}")
            self.logger.warning(f"No fixture for prompt {sha[:12]} ordinal {ordinal}; returning empty response")
            return ""
        return response


class HttpBackend(GeneratorBackend):
    """Provider calls through LLMClient with bounded retries and a response cache."""

    def __init__(self, config: BackendConfig, client: Optional[LLMClient] = None):
        super().__init__(config.max_workers)
        self.config = config
        self.client = client or LLMClient(config.provider, config.api_key(), config.model, config.endpoint)
        self._cache: Dict[Tuple[str, int], str] = {}
        self._cache_lock = threading.Lock()

    def _complete_at(self, prompt: str, sha: str, ordinal: int, temperature: float, seed: Optional[int]) -> str:
        with self._cache_lock:
            if (sha, ordinal) in self._cache:
                return self._cache[(sha, ordinal)]

        call_seed = None if seed is None else seed + ordinal
        last_error: Optional[Exception] = None
        for attempt in range(self.config.max_retries + 1):
            try:
                response = self.client.call(
                    prompt,
                    temperature=temperature,
                    max_tokens=self.config.max_tokens,
                    seed=call_seed,
                )
                with self._cache_lock:
                    self._cache[(sha, ordinal)] = response
                return response
            except Exception as e:
                last_error = e
                if LLMClient.is_fatal(e):
                    self.logger.error(f"Fatal provider error: {e}")
                    raise BackendError(str(e)) from e
                self.logger.warning(f"Call {sha[:12]}#{ordinal} failed (attempt {attempt + 1}): {e}")
                if attempt < self.config.max_retries:
                    time.sleep(self.config.retry_delay * (attempt + 1))
        raise BackendError(f"call failed after {self.config.max_retries + 1} attempts: {last_error}")


def build_backend(config: BackendConfig) -> GeneratorBackend:
    """Backend for a configuration; scripted backends need a fixture path."""
    if config.kind == "scripted":
        if not config.fixtures:
            raise SchemaError("scripted backend needs a fixtures path", "$.backend.fixtures")
        return ScriptedBackend.from_file(config.fixtures, config.strict, config.max_workers)
    return HttpBackend(config)
