"""
Run configuration: ``search``, ``backend`` and ``solver`` sections of one JSON file.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

from autoform.agents.backends import BackendConfig
from autoform.core.config import SearchConfig
from autoform.errors import SchemaError
from autoform.solver.solve import SolverConfig
from autoform.utils.resources import resolve_data_path

DEFAULT_CONFIG = "data/config/default.json"
# small search used by the packaged micro benchmark
MICRO_CONFIG = "data/config/micro.json"


@dataclass
class AutoformConfig:
    search: SearchConfig = field(default_factory=SearchConfig)
    backend: BackendConfig = field(default_factory=BackendConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "search": self.search.to_dict(),
            "backend": self.backend.to_dict(),
            "solver": self.solver.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AutoformConfig":
        if not isinstance(data, dict):
            raise SchemaError("config must be an object")
        unknown = sorted(set(data) - {"search", "backend", "solver"})
        if unknown:
            raise SchemaError(f"unknown config sections: {', '.join(unknown)}")
        return cls(
            search=SearchConfig.from_dict(data.get("search", {})),
            backend=BackendConfig.from_dict(data.get("backend", {})),
            solver=SolverConfig.from_dict(data.get("solver", {})),
        )

    @classmethod
    def load(cls, path: Optional[Union[str, Path]] = None) -> "AutoformConfig":
        """
        Read a config file; without a path, the packaged default.

        Raises:
            SchemaError: Invalid JSON or an invalid section
        """
        path = resolve_data_path(path or DEFAULT_CONFIG)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON in {path}: {e.msg}", "$", e.lineno) from e
        return cls.from_dict(data)

    def with_overrides(self, search: Optional[Dict[str, Any]] = None, backend: Optional[Dict[str, Any]] = None) -> "AutoformConfig":
        """Copy with selected fields replaced (CLI flags win over the file)."""
        data = self.to_dict()
        data["search"].update({k: v for k, v in (search or {}).items() if v is not None})
        data["backend"].update({k: v for k, v in (backend or {}).items() if v is not None})
        return AutoformConfig.from_dict(data)
