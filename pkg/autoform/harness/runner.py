"""Benchmark runner: one independent search per problem, persisted per problem."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Union

from autoform.agents.gateway import GeneratorGateway
from autoform.config import AutoformConfig
from autoform.core.orchestrator import run_search
from autoform.errors import AutoformError
from autoform.harness.records import RunRecord
from autoform.harness.store import RunStore, run_key
from autoform.model.problem import ProblemDescription


class BenchmarkRunner:
    """
    Runs the configured search over a dataset.

    Every problem gets its own backend, so call ordinals and therefore the
    scripted responses do not depend on how problems are scheduled.
    """

    def __init__(
        self,
        config: AutoformConfig,
        out_dir: Union[str, Path],
        stream_callback: Optional[Callable[[str], None]] = None,
    ):
        self.config = config
        self.store = RunStore(out_dir)
        self.stream_callback = stream_callback
        self.logger = logging.getLogger("autoform.harness.runner")

    def stream_output(self, text: str):
        if self.stream_callback:
            self.stream_callback(text)
        self.logger.info(text)

    def run_problem(self, problem: ProblemDescription) -> RunRecord:
        """Search one problem and persist its record; module errors become a failed record."""
        key = run_key(problem.id)
        config_dict = self.config.to_dict()
        started = time.perf_counter()
        try:
            gateway = GeneratorGateway.from_config(self.config.backend)
            result = run_search(problem.text, gateway, self.config.search, self.config.solver)
            call_log = self.store.call_log_path(key)
            gateway.save_call_log(call_log)
            record = RunRecord.from_search(problem, config_dict, result, f"calls/{call_log.name}")
        except AutoformError as e:
            self.logger.error(f"Problem {problem.id} failed: {e}")
            record = RunRecord.failed(problem, config_dict, f"{type(e).__name__}: {e}")
        record.timings = {"wall_clock": time.perf_counter() - started}
        for issue in record.check():
            self.logger.warning(f"Run record {problem.id}: {issue}")
        self.store.save_run(record)
        status = "failed" if record.error else f"{len(record.terminals)} formulation(s)"
        self.stream_output(f"[{problem.id}] {status}")
        return record

    def run(self, problems: Sequence[ProblemDescription]) -> List[RunRecord]:
        """Records in dataset order."""
        workers = min(self.config.search.max_workers, max(1, len(problems)))
        self.stream_output(f"Running {len(problems)} problem(s) with {workers} worker(s)")
        if workers == 1:
            return [self.run_problem(p) for p in problems]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.run_problem, problems))
