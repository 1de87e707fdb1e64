"""
Search orchestrator: Monte-Carlo tree search over formulation components.

Each rollout selects by UCT through expanded nodes, expands the first
unexpanded node, then keeps expanding along the highest-prior child until
a terminal is reached. The terminal is lowered and solved; an optimal solve
earns the comparative score against the baseline (the first terminal the
search reached), anything else earns 0. The reward is averaged into every
node on the path.
"""

import json
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from autoform.agents.gateway import GeneratorGateway
from autoform.agents.prompts import Phase
from autoform.core.config import SearchConfig
from autoform.core.results import LOWERING_FAILED, RolloutEntry, SearchResult, TerminalRecord
from autoform.core.tree import SearchNode, SearchTree
from autoform.equiv.prune import compare_components, component_of, prune_candidates
from autoform.errors import AutoformError, ExpansionEmpty, LoweringError
from autoform.expr.variables import VariableTable
from autoform.equiv.checker import Domain
from autoform.model.formulation import Formulation, serialize, variables_to_dict
from autoform.solver.model import lower
from autoform.solver.solve import SolverConfig, solve, solver_indicator


def uct_score(child: SearchNode, parent_visits: int, omega: float, lam: float) -> float:
    """V(child) + omega * sqrt(ln N(parent) / N(child)); infinite for unvisited children."""
    if child.visits == 0:
        return math.inf
    return child.value(lam) + omega * math.sqrt(math.log(max(parent_visits, 1)) / child.visits)


def uct_select(tree: SearchTree, node: SearchNode, omega: float, lam: float) -> Optional[SearchNode]:
    """
    Child maximizing the UCT score.

    Unvisited children come first, highest prior among them; remaining ties
    go to the earliest-generated child. Children whose expansion produced
    nothing are skipped; None when no live child remains.
    """
    children = [c for c in tree.children(node) if not c.is_dead]
    if not children:
        return None
    unvisited = [c for c in children if c.visits == 0]
    if unvisited:
        best = unvisited[0]
        for c in unvisited[1:]:
            if c.v_prior > best.v_prior:
                best = c
        return best
    best, best_score = children[0], uct_score(children[0], node.visits, omega, lam)
    for c in children[1:]:
        score = uct_score(c, node.visits, omega, lam)
        if score > best_score:
            best, best_score = c, score
    return best


def greedy_child(tree: SearchTree, node: SearchNode) -> Optional[SearchNode]:
    """Highest-prior live child, earliest on ties."""
    best = None
    for c in tree.children(node):
        if c.is_dead:
            continue
        if best is None or c.v_prior > best.v_prior:
            best = c
    return best


def backpropagate(path: Sequence[SearchNode], reward: float):
    """Fold ``reward`` into the running mean and visit count of every node on the path."""
    for node in path:
        node.v_bp = (node.v_bp * node.visits + reward) / (node.visits + 1)
        node.visits += 1


def equivalent_terminals(a: Formulation, b: Formulation) -> bool:
    """Same declarations and equivalent objective, equalities and inequalities."""
    if serialize(a) == serialize(b):
        return True
    if a.parameters.to_dict() != b.parameters.to_dict():
        return False
    if variables_to_dict(a.variables) != variables_to_dict(b.variables):
        return False
    try:
        table = VariableTable.from_declarations(a.variables, a.parameters)
        domain = Domain.from_table(table)
        for stage in (2, 3, 4):
            verdict = compare_components(component_of(a, stage, table), component_of(b, stage, table), stage, domain)
            if not verdict.is_equivalent:
                return False
    except AutoformError:
        return False
    return True


def terminal_reward(
    record: TerminalRecord,
    gateway: GeneratorGateway,
    problem_text: str,
    baseline: Formulation,
    seed: Optional[int] = None,
) -> float:
    """Solver indicator times the comparison score; a failed solve or lowering earns 0 without a model call."""
    if record.solve_result is None or not solver_indicator(record.solve_result):
        return 0.0
    return gateway.compare_to_baseline(record.formulation, baseline, problem_text, seed)


class TerminalEvaluator:
    """
    Reward of complete formulations, cached per formulation.

    The first formulation evaluated becomes the baseline. Formulations
    equivalent to an earlier one reuse its record.
    """

    def __init__(
        self,
        gateway: GeneratorGateway,
        problem_text: str,
        solver_config: Optional[SolverConfig] = None,
        seed: Optional[int] = None,
    ):
        self.gateway = gateway
        self.problem_text = problem_text
        self.solver_config = solver_config or SolverConfig()
        self.seed = seed
        self.baseline: Optional[Formulation] = None
        self.records: List[TerminalRecord] = []
        self._compare_offset = self._logged_comparisons()
        self._by_key: Dict[bytes, TerminalRecord] = {}
        self.logger = logging.getLogger("autoform.search.reward")

    def _logged_comparisons(self) -> int:
        return sum(1 for call in self.gateway.call_log if call.phase == Phase.COMPARE.value)

    @property
    def comparison_calls(self) -> int:
        """Comparison prompts sent since this evaluator started, retries included."""
        return self._logged_comparisons() - self._compare_offset

    def find(self, f: Formulation) -> Optional[TerminalRecord]:
        key = serialize(f)
        if key in self._by_key:
            return self._by_key[key]
        for record in self.records:
            if equivalent_terminals(record.formulation, f):
                self._by_key[key] = record
                return record
        return None

    def evaluate(self, f: Formulation, node_id: Optional[int] = None, path: Sequence[int] = ()) -> Tuple[TerminalRecord, bool]:
        """
        Returns:
            (record, is_new); an already-known or equivalent formulation returns its existing record
        """
        known = self.find(f)
        if known is not None:
            return known, False

        if self.baseline is None:
            self.baseline = f
        record = TerminalRecord(f, 0.0, LOWERING_FAILED, len(self.records), node_id, list(path))
        try:
            record.model = lower(f)
        except LoweringError as e:
            record.detail = str(e)
            self.logger.info(f"Terminal {record.ordinal} does not lower: {e}")
        if record.model is not None:
            record.solve_result = solve(record.model, self.solver_config)
            record.status = record.solve_result.status.value
            record.detail = record.solve_result.detail
        record.reward = terminal_reward(record, self.gateway, self.problem_text, self.baseline, self.seed)
        self.records.append(record)
        self._by_key[serialize(f)] = record
        return record, True


class SearchOrchestrator:
    """
    Runs the tree search for one problem.

    Selection, expansion and backpropagation are serialized; the samples
    of one expansion are drawn concurrently by the backend.
    """

    def __init__(
        self,
        gateway: GeneratorGateway,
        config: Optional[SearchConfig] = None,
        solver_config: Optional[SolverConfig] = None,
        stream_callback: Optional[Callable[[str], None]] = None,
    ):
        """
        Initialize the orchestrator.

        Args:
            gateway: LLM-facing gateway
            config: Search hyperparameters
            solver_config: Backend and limits for terminal solves
            stream_callback: Optional callback for streaming output
        """
        self.gateway = gateway
        self.config = config or SearchConfig()
        self.solver_config = solver_config or SolverConfig()
        self.stream_callback = stream_callback
        self.logger = logging.getLogger("autoform.search.mcts")

    def stream_output(self, text: str):
        if self.stream_callback:
            self.stream_callback(text)
        self.logger.info(text)

    # expansion

    def _retain(self, order: Sequence[int]) -> List[int]:
        """Top ``retain`` indices by rank, returned in generation order."""
        return sorted(list(order)[:self.config.retain])

    def _prior(self, phase: Phase, problem_text: str, partial: Formulation, reps: List[Formulation]) -> Tuple[List[float], List[int]]:
        if self.config.prior == "uniform" or len(reps) == 1:
            return [0.5] * len(reps), list(range(len(reps)))
        ranked = self.gateway.rank_candidates(phase, problem_text, partial, reps, self.config.seed)
        return ranked.scores, ranked.order

    def _stage_one(self, tree: SearchTree, node: SearchNode) -> Tuple[Formulation, List[Formulation], List[int]]:
        """Variable-set candidates under the shared parameter table, with their group representatives."""
        parameters = self.gateway.generate_parameters(tree.problem_text, self.config.seed)
        partial = Formulation(parameters=parameters, depth=0)
        sampled = self.gateway.candidate_formulations(
            Phase.VARIABLES, tree.problem_text, partial, self.config.samples, self.config.seed
        )
        unique: List[Formulation] = []
        seen = set()
        for f in sampled:
            key = json.dumps(variables_to_dict(f.variables), sort_keys=True)
            if key not in seen:
                seen.add(key)
                unique.append(f)
        node.usable = len(sampled)
        if not unique:
            return partial, [], []
        groups = self.gateway.group_variable_sets(tree.problem_text, partial, unique, self.config.seed)
        return partial, unique, [g[0] for g in groups]

    def expand(self, tree: SearchTree, node: SearchNode) -> List[SearchNode]:
        """
        Sample, prune, rank and attach the children of ``node``.

        Raises:
            ExpansionEmpty: No usable candidate; the node is marked expanded with no children
        """
        if node.is_terminal:
            raise ValueError("terminal nodes are not expanded")
        stage = node.depth + 1
        node.samples = self.config.samples
        if node.depth == 0:
            phase = Phase.VARIABLES
            partial, candidates, reps = self._stage_one(tree, node)
        else:
            phase = Phase.for_stage(stage)
            partial = node.formulation
            candidates = self.gateway.candidate_formulations(
                phase, tree.problem_text, partial, self.config.samples, self.config.seed
            )
            node.usable = len(candidates)
            reps = prune_candidates(candidates, stage).retained if candidates else []

        node.expanded = True
        if not candidates:
            node.classes = 0
            raise ExpansionEmpty(stage, f"0 of {self.config.samples} samples usable")
        node.classes = len(reps)

        rep_formulations = [candidates[i] for i in reps]
        scores, order = self._prior(phase, tree.problem_text, partial, rep_formulations)
        children = [tree.add_child(node, rep_formulations[j], scores[j]) for j in self._retain(order)]
        self.stream_output(
            f"Expanded node {node.id} (depth {node.depth}): {node.usable} usable, "
            f"{node.classes} classes, {len(children)} children"
        )
        return children

    # rollouts

    def _rollout(self, tree: SearchTree, evaluator: TerminalEvaluator, index: int) -> RolloutEntry:
        path = [tree.root]
        node = tree.root
        while node.expanded and not node.is_terminal:
            nxt = uct_select(tree, node, self.config.omega, self.config.lam)
            if nxt is None:
                break
            node = nxt
            path.append(node)

        try:
            while not node.is_terminal:
                if node.is_dead:
                    raise ExpansionEmpty(node.depth + 1, "branch produced no candidates earlier")
                if not node.expanded:
                    self.expand(tree, node)
                child = greedy_child(tree, node)
                if child is None:
                    raise ExpansionEmpty(node.depth + 1, "every child branch is exhausted")
                node = child
                path.append(node)
        except ExpansionEmpty as e:
            backpropagate(path, 0.0)
            for exhausted in tree.mark_exhausted(path):
                self.logger.info(f"Node {exhausted.id} has no live child left")
            self.logger.warning(f"Rollout {index} aborted: {e}")
            return RolloutEntry(index, [n.id for n in path], 0.0, aborted=True, reason=str(e))

        record, is_new = evaluator.evaluate(node.formulation, node.id, [n.id for n in path])
        backpropagate(path, record.reward)
        return RolloutEntry(index, [n.id for n in path], record.reward, record.ordinal, new_terminal=is_new)

    def run(self, problem_text: str) -> SearchResult:
        """
        Run ``rollouts`` rollouts for one problem.

        Returns:
            SearchResult with distinct terminals in discovery order
        """
        tree = SearchTree(problem_text)
        evaluator = TerminalEvaluator(self.gateway, problem_text, self.solver_config, self.config.seed)
        log: List[RolloutEntry] = []
        for index in range(self.config.rollouts):
            entry = self._rollout(tree, evaluator, index)
            log.append(entry)
            if entry.new_terminal:
                self.stream_output(f"Rollout {index + 1}/{self.config.rollouts}: new terminal {entry.terminal}, reward {entry.reward:.3f}")
        self.stream_output(f"Search finished: {len(evaluator.records)} distinct formulation(s), {len(tree)} nodes")
        return SearchResult("mcts", evaluator.records, log, tree, evaluator.baseline, evaluator.comparison_calls)


def run_search(
    problem_text: str,
    gateway: GeneratorGateway,
    config: Optional[SearchConfig] = None,
    solver_config: Optional[SolverConfig] = None,
    stream_callback: Optional[Callable[[str], None]] = None,
) -> SearchResult:
    """Search one problem with the configured strategy."""
    config = config or SearchConfig()
    if config.strategy == "sequential":
        from autoform.core.sequential import SequentialSampler

        return SequentialSampler(gateway, config, solver_config, stream_callback).run(problem_text)
    return SearchOrchestrator(gateway, config, solver_config, stream_callback).run(problem_text)
