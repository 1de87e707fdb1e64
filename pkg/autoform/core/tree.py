"""
Search tree over hierarchical formulation components.

Depth 0 is the root (problem description only). Depth 1 holds parameters
and decision variables, 2 the objective, 3 equality constraints and 4
inequality constraints; depth-4 nodes are terminal. Each node stores the
partial formulation of its whole path so that it can be prompted, pruned
and lowered directly. Snapshots keep only each node's own component and
rebuild the formulations by concatenating payloads along the path. Payloads
are stored as JSON text so that declaration order survives writers that
sort keys.
"""

import json
import random
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

from autoform.errors import SchemaError
from autoform.model.formulation import MAX_DEPTH, Formulation

COMPONENTS_AT_DEPTH = {
    1: ("parameters", "decision_variables"),
    2: ("objective",),
    3: ("equality_constraints",),
    4: ("inequality_constraints",),
}


def component_payload(f: Formulation, depth: int) -> Dict[str, Any]:
    """The part of ``f``'s serialization introduced at ``depth``."""
    data = f.to_dict()
    return {key: data[key] for key in COMPONENTS_AT_DEPTH.get(depth, ()) if key in data}


@dataclass
class SearchNode:
    id: int
    depth: int
    formulation: Formulation
    parent: Optional[int] = None
    v_prior: float = 0.5
    v_bp: float = 0.0
    visits: int = 0
    children: List[int] = field(default_factory=list)
    expanded: bool = False
    # no live child left below an expanded node
    exhausted: bool = False
    # expansion statistics
    samples: int = 0
    usable: int = 0
    classes: int = 0

    @property
    def is_terminal(self) -> bool:
        return self.depth == MAX_DEPTH

    @property
    def is_dead(self) -> bool:
        """Expanded without producing children, or left with no live child."""
        if self.is_terminal:
            return False
        return self.exhausted or (self.expanded and not self.children)

    def value(self, lam: float) -> float:
        return lam * self.v_prior + (1.0 - lam) * self.v_bp

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "depth": self.depth,
            "parent": self.parent,
            "payload": json.dumps(component_payload(self.formulation, self.depth)),
            "v_prior": self.v_prior,
            "v_bp": self.v_bp,
            "visits": self.visits,
            "children": list(self.children),
            "expanded": self.expanded,
            "exhausted": self.exhausted,
            "samples": self.samples,
            "usable": self.usable,
            "classes": self.classes,
        }


class SearchTree:
    """Nodes indexed by id in creation order; node 0 is the root."""

    def __init__(self, problem_text: str = ""):
        self.problem_text = problem_text
        self.nodes: List[SearchNode] = [SearchNode(0, 0, Formulation(depth=0))]

    @property
    def root(self) -> SearchNode:
        return self.nodes[0]

    def node(self, node_id: int) -> SearchNode:
        return self.nodes[node_id]

    def __len__(self) -> int:
        return len(self.nodes)

    def __iter__(self) -> Iterator[SearchNode]:
        return iter(self.nodes)

    def children(self, node: SearchNode) -> List[SearchNode]:
        return [self.nodes[c] for c in node.children]

    def add_child(self, parent: SearchNode, formulation: Formulation, v_prior: float) -> SearchNode:
        if formulation.depth != parent.depth + 1:
            raise ValueError(f"child formulation depth {formulation.depth} under a depth-{parent.depth} node")
        child = SearchNode(len(self.nodes), parent.depth + 1, formulation, parent=parent.id, v_prior=v_prior)
        self.nodes.append(child)
        parent.children.append(child.id)
        return child

    def path_to(self, node: SearchNode) -> List[SearchNode]:
        """Root-to-node path, root first."""
        path = [node]
        while path[-1].parent is not None:
            path.append(self.nodes[path[-1].parent])
        return path[::-1]

    def mark_exhausted(self, path: List[SearchNode]) -> List[SearchNode]:
        """
        Walk ``path`` bottom-up, marking expanded nodes whose children are all dead.

        Stops at the first node that still has a live child. Returns the newly marked nodes.
        """
        marked = []
        for node in reversed(path):
            if node.is_dead:
                continue
            if node.is_terminal or not node.expanded or any(not c.is_dead for c in self.children(node)):
                break
            node.exhausted = True
            marked.append(node)
        return marked

    def terminals(self) -> List[SearchNode]:
        return [n for n in self.nodes if n.is_terminal]

    def expanded_nodes(self) -> List[SearchNode]:
        return [n for n in self.nodes if n.expanded and n.children]

    def stage_statistics(self) -> Dict[int, Dict[str, int]]:
        """Samples, usable candidates, classes and retained children per produced depth."""
        stats: Dict[int, Dict[str, int]] = {}
        for node in self.nodes:
            if not node.expanded:
                continue
            entry = stats.setdefault(node.depth + 1, {"expansions": 0, "samples": 0, "usable": 0, "classes": 0, "retained": 0})
            entry["expansions"] += 1
            entry["samples"] += node.samples
            entry["usable"] += node.usable
            entry["classes"] += node.classes
            entry["retained"] += len(node.children)
        return dict(sorted(stats.items()))

    def snapshot(self) -> Dict[str, Any]:
        return {"problem": self.problem_text, "nodes": [n.to_dict() for n in self.nodes]}

    def to_json(self) -> str:
        return json.dumps(self.snapshot(), indent=2, sort_keys=True)

    @classmethod
    def from_snapshot(cls, data: Dict[str, Any]) -> "SearchTree":
        """
        Rebuild a tree, reconstructing each formulation from the payloads on its path.

        Raises:
            SchemaError: Malformed snapshot
        """
        if not isinstance(data, dict) or not isinstance(data.get("nodes"), list) or not data["nodes"]:
            raise SchemaError("snapshot needs a non-empty 'nodes' list", "$.nodes")
        tree = cls(str(data.get("problem", "")))
        tree.nodes = []
        merged: Dict[int, Dict[str, Any]] = {}
        for i, raw in enumerate(data["nodes"]):
            path = f"$.nodes[{i}]"
            try:
                node_id, depth, parent = int(raw["id"]), int(raw["depth"]), raw.get("parent")
            except (KeyError, TypeError, ValueError) as e:
                raise SchemaError(f"bad node header: {e}", path) from e
            if node_id != i:
                raise SchemaError("node ids must be consecutive from 0", path)
            if parent is not None and not 0 <= int(parent) < i:
                raise SchemaError("parent must precede its child", path)
            combined = dict(merged[int(parent)]) if parent is not None else {}
            payload = raw.get("payload") or {}
            if isinstance(payload, str):
                try:
                    payload = json.loads(payload)
                except json.JSONDecodeError as e:
                    raise SchemaError(f"bad payload: {e}", f"{path}.payload") from e
            if not isinstance(payload, dict):
                raise SchemaError("payload must be an object", f"{path}.payload")
            combined.update(payload)
            merged[node_id] = combined
            formulation = Formulation.from_dict({**combined, "depth": depth}) if depth else Formulation(depth=0)
            tree.nodes.append(SearchNode(
                id=node_id,
                depth=depth,
                formulation=formulation,
                parent=None if parent is None else int(parent),
                v_prior=float(raw.get("v_prior", 0.5)),
                v_bp=float(raw.get("v_bp", 0.0)),
                visits=int(raw.get("visits", 0)),
                children=[int(c) for c in raw.get("children", [])],
                expanded=bool(raw.get("expanded", False)),
                exhausted=bool(raw.get("exhausted", False)),
                samples=int(raw.get("samples", 0)),
                usable=int(raw.get("usable", 0)),
                classes=int(raw.get("classes", 0)),
            ))
        return tree


def greedy_formulation(tree: SearchTree) -> Optional[Formulation]:
    """Follow the highest-prior child from the root; None if the walk stops short of a terminal."""
    node = tree.root
    while node.children:
        node = max(tree.children(node), key=lambda c: (c.v_prior, -c.id))
    return node.formulation if node.is_terminal else None


def random_formulation(tree: SearchTree, rng: random.Random) -> Optional[Formulation]:
    """Follow uniformly random children from the root."""
    node = tree.root
    while node.children:
        node = tree.node(rng.choice(node.children))
    return node.formulation if node.is_terminal else None
