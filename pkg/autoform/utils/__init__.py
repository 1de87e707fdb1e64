"""Utility modules for autoform."""

from .llm_client import PROVIDERS, LLMClient
from .resources import DATA_DIR, resolve_data_path

__all__ = ["PROVIDERS", "LLMClient", "DATA_DIR", "resolve_data_path"]
