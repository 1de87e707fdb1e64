"""Locations of data files shipped inside the package."""

from pathlib import Path
from typing import Union

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def resolve_data_path(path: Union[str, Path]) -> Path:
    """
    Return ``path`` if it exists, otherwise the same relative path under the
    package data directory (``data/fixtures/micro.jsonl`` works from any cwd).
    """
    candidate = Path(path)
    if candidate.exists() or candidate.is_absolute():
        return candidate
    relative = candidate.parts[1:] if candidate.parts and candidate.parts[0] == "data" else candidate.parts
    packaged = DATA_DIR.joinpath(*relative)
    return packaged if packaged.exists() else candidate
