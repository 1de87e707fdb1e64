"""Run store: JSON files in a run directory."""

import json
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from autoform.errors import SchemaError
from autoform.harness.records import RunRecord

_UNSAFE = re.compile(r"[^A-Za-z0-9_.-]+")


def run_key(problem_id: str) -> str:
    return "run_" + _UNSAFE.sub("_", problem_id)


class RunStore:
    """
    Directory of ``<key>.json`` documents, with timing sidecars under
    ``timings/`` and backend call logs under ``calls/``.
    """

    def __init__(self, run_dir: Union[str, Path]):
        """
        Initialize the store.

        Args:
            run_dir: Directory holding the run documents; created if missing
        """
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        return self.run_dir / f"{key}.json"

    def call_log_path(self, key: str) -> Path:
        return self.run_dir / "calls" / f"{key}.jsonl"

    def store(self, key: str, data: Any) -> str:
        """
        Write ``data`` as ``<key>.json``.

        Returns:
            Reference key for retrieving the data
        """
        with open(self.path_for(key), "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
            f.write("\n")
        return key

    def retrieve(self, key: str) -> Optional[Any]:
        path = self.path_for(key)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def delete(self, key: str) -> bool:
        deleted = False
        for path in (self.path_for(key), self.run_dir / "timings" / f"{key}.json", self.call_log_path(key)):
            if path.exists():
                path.unlink()
                deleted = True
        return deleted

    def list_keys(self) -> List[str]:
        """Keys of run documents, sorted."""
        return sorted(p.stem for p in self.run_dir.glob("*.json"))

    def save_run(self, record: RunRecord) -> str:
        key = run_key(record.problem.id)
        self.store(key, record.to_dict())
        if record.timings:
            timings_dir = self.run_dir / "timings"
            timings_dir.mkdir(exist_ok=True)
            with open(timings_dir / f"{key}.json", "w", encoding="utf-8") as f:
                json.dump(record.timings, f, indent=2, sort_keys=True)
        return key

    def load_run(self, key: str) -> RunRecord:
        """
        Raises:
            SchemaError: Missing or malformed record
        """
        data = self.retrieve(key)
        if data is None:
            raise SchemaError(f"no run record {key!r} in {self.run_dir}")
        try:
            record = RunRecord.from_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed run record {key!r}: {e}") from e
        timings = self.run_dir / "timings" / f"{key}.json"
        if timings.exists():
            with open(timings, "r", encoding="utf-8") as f:
                record.timings = json.load(f)
        return record

    def load_runs(self) -> List[RunRecord]:
        return [self.load_run(key) for key in self.list_keys()]


def load_run_file(path: Union[str, Path]) -> RunRecord:
    """A single run record from an explicit file path."""
    path = Path(path)
    store = RunStore(path.parent)
    return store.load_run(path.stem)


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON in {path}: {e.msg}", "$", e.lineno) from e
