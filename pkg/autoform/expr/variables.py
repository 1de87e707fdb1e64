"""Instantiated decision-variable table (names, kinds, bounds, index sets)."""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from autoform.errors import GroundError
from autoform.expr.ground import as_index, iterate_comprehensions
from autoform.expr.parser import parse_comprehensions

if TYPE_CHECKING:
    from autoform.model.formulation import ParameterTable


def instance_name(name: str, index: Tuple[int, ...]) -> str:
    """``x`` for scalars, ``x[0,1]`` for indexed instances."""
    if not index:
        return name
    return f"{name}[{','.join(str(k) for k in index)}]"


@dataclass(frozen=True)
class VariableInfo:
    name: str
    kind: str
    lower_bound: Optional[float]
    upper_bound: Optional[float]
    indices: Tuple[Tuple[int, ...], ...]
    indexed: bool

    @property
    def index_set(self) -> FrozenSet[Tuple[int, ...]]:
        return frozenset(self.indices)

    def instances(self) -> List[str]:
        return [instance_name(self.name, idx) for idx in self.indices]


class VariableTable:
    """Declaration-ordered variables, each expanded over its iteration space."""

    def __init__(self, infos: Iterable[VariableInfo]):
        self._infos: Dict[str, VariableInfo] = {}
        for info in infos:
            self._infos[info.name] = info

    @classmethod
    def from_declarations(cls, declarations: Iterable[Any], params: "ParameterTable") -> "VariableTable":
        """
        Instantiate declarations over their iteration spaces.

        Args:
            declarations: DecisionVariableDecl records
            params: Parameters resolving range bounds and iterables

        Raises:
            ParseError: Iteration space outside the grammar
            GroundError: Iteration space does not resolve
        """
        infos = []
        for decl in declarations:
            if decl.iteration_space:
                comps = parse_comprehensions(decl.iteration_space)
                indices = tuple(
                    tuple(as_index(env[c.var], f"index of {decl.name}") for c in comps)
                    for env in iterate_comprehensions(comps, params, {})
                )
                indexed = True
            else:
                indices = ((),)
                indexed = False
            if len(set(indices)) != len(indices):
                raise GroundError(f"iteration space of {decl.name} repeats an index")
            infos.append(VariableInfo(
                name=decl.name,
                kind=decl.var_kind.value,
                lower_bound=decl.effective_lower_bound,
                upper_bound=decl.effective_upper_bound,
                indices=indices,
                indexed=indexed,
            ))
        return cls(infos)

    def get(self, name: str) -> Optional[VariableInfo]:
        return self._infos.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._infos

    def __iter__(self):
        return iter(self._infos.values())

    def __len__(self) -> int:
        return len(self._infos)
