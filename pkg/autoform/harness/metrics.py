"""
Evaluation metrics over search outcomes.

Execution accuracy allows a 5% relative margin on the optimal objective
(absolute 1e-6 when the ground truth is zero). Pass@N and Best-of-N look
at the first N distinct formulations in discovery order.
"""

import math
from typing import Dict, List, Optional, Sequence

from autoform.core.results import TerminalRecord
from autoform.core.tree import SearchTree

RELATIVE_MARGIN = 0.05
ZERO_TOLERANCE = 1e-6
# absorbs representation error at exactly 5%
_MARGIN_SLACK = 1e-9


def execution_accuracy(predicted: Optional[float], ground_truth: Optional[float]) -> bool:
    if predicted is None or ground_truth is None:
        return False
    if not (math.isfinite(predicted) and math.isfinite(ground_truth)):
        return False
    if ground_truth == 0:
        return abs(predicted) <= ZERO_TOLERANCE
    return abs(predicted - ground_truth) <= (RELATIVE_MARGIN + _MARGIN_SLACK) * abs(ground_truth)


def correctness_flags(records: Sequence[TerminalRecord], ground_truth: Optional[float]) -> List[bool]:
    return [execution_accuracy(r.objective_value, ground_truth) for r in records]


def pass_at_n(records: Sequence[TerminalRecord], ground_truth: Optional[float], n: int) -> bool:
    """True iff any of the first ``n`` records is accurate."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return any(correctness_flags(records[:n], ground_truth))


def path_mean_value(tree: SearchTree, node_id: int, lam: float) -> float:
    """Mean of V = lam * V_prior + (1 - lam) * V_bp over the path, root excluded."""
    path = tree.path_to(tree.node(node_id))[1:]
    if not path:
        return 0.0
    return sum(n.value(lam) for n in path) / len(path)


def best_of_n(
    records: Sequence[TerminalRecord],
    tree: Optional[SearchTree],
    n: int,
    lam: float = 0.5,
) -> Optional[TerminalRecord]:
    """
    Record with the highest path-mean value among the first ``n``; earliest on ties.

    Without a tree (sequential runs) the reward is the score.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    best, best_score = None, -math.inf
    for record in records[:n]:
        if tree is not None and record.node_id is not None:
            score = path_mean_value(tree, record.node_id, lam)
        else:
            score = record.reward
        if score > best_score:
            best, best_score = record, score
    return best


def node_entropy(visits: Sequence[int]) -> float:
    """Shannon entropy (nats) of the visit shares of visited children."""
    visited = [v for v in visits if v > 0]
    if len(visited) <= 1:
        return 0.0
    total = float(sum(visited))
    return -sum((v / total) * math.log(v / total) for v in visited)


def tree_entropy(tree: SearchTree) -> float:
    """Mean children-visit entropy over expanded internal nodes; 0 for a tree with none."""
    nodes = tree.expanded_nodes()
    if not nodes:
        return 0.0
    return sum(node_entropy([c.visits for c in tree.children(n)]) for n in nodes) / len(nodes)


def pruning_statistics(tree: SearchTree) -> Dict[int, Dict[str, float]]:
    """
    Per produced depth: usable samples, equivalence classes and the
    retained fraction (classes / usable).
    """
    stats = {}
    for depth, entry in tree.stage_statistics().items():
        usable = entry["usable"]
        stats[depth] = {
            **entry,
            "retained_fraction": entry["classes"] / usable if usable else 0.0,
        }
    return stats


def retained_fraction(tree: SearchTree, depths: Sequence[int] = (2, 3, 4)) -> Optional[float]:
    """Classes over usable candidates, pooled over the symbolically pruned depths."""
    stats = tree.stage_statistics()
    usable = sum(stats[d]["usable"] for d in depths if d in stats)
    classes = sum(stats[d]["classes"] for d in depths if d in stats)
    return classes / usable if usable else None


def mean(values: Sequence[Optional[float]]) -> Optional[float]:
    """Unweighted mean of the values that are not None (booleans count as 0/1)."""
    present = [float(v) for v in values if v is not None]
    return sum(present) / len(present) if present else None
