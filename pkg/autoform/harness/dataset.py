"""Benchmark dataset loading (JSONL, one problem per line)."""

import json
import logging
from pathlib import Path
from typing import List, Union

from autoform.errors import SchemaError
from autoform.model.problem import ProblemDescription
from autoform.utils.resources import resolve_data_path

logger = logging.getLogger("autoform.harness.dataset")


def load_dataset(path: Union[str, Path]) -> List[ProblemDescription]:
    """
    Load problems in file order.

    Each line is an object with ``id``, ``description`` and
    ``ground_truth_objective`` (nullable), plus optional ``difficulty`` and
    ``type``. Blank lines are skipped.

    Raises:
        SchemaError: Malformed line, with its 1-based line number
    """
    path = resolve_data_path(path)
    problems: List[ProblemDescription] = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"invalid JSON: {e.msg}", "$", lineno) from e
            try:
                problem = ProblemDescription.from_dict(data)
            except SchemaError as e:
                raise SchemaError(e.message, e.path, lineno) from e
            if problem.id in seen:
                raise SchemaError(f"duplicate problem id {problem.id!r}", "$.id", lineno)
            seen.add(problem.id)
            problems.append(problem)
    logger.info(f"Loaded {len(problems)} problems from {path}")
    return problems
