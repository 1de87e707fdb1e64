"""Main entry point for autoform."""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from autoform.errors import AutoformError

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2


def configure_logging(level: str = "INFO", log_dir: Optional[Path] = Path("./logs")) -> Optional[Path]:
    """Console plus per-session log file; returns the log file path."""
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    log_file = None
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"autoform_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        handlers.insert(0, logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )
    return log_file


def _read_formulation(path: str):
    from autoform.model import deserialize

    return deserialize(Path(path).read_bytes())


def cmd_run(args) -> int:
    from autoform.config import AutoformConfig
    from autoform.harness import BenchmarkRunner, load_dataset

    config = AutoformConfig.load(args.config).with_overrides(
        search={
            "samples": args.samples,
            "retain": args.retain,
            "rollouts": args.rollouts,
            "seed": args.seed,
            "strategy": args.strategy,
            "prior": args.prior,
            "max_workers": args.workers,
        },
        backend={
            "kind": args.backend,
            "fixtures": args.fixtures,
            "provider": args.provider,
            "model": args.model,
        },
    )
    problems = load_dataset(args.dataset)
    if args.problem:
        wanted = set(args.problem)
        problems = [p for p in problems if p.id in wanted]
        if not problems:
            print(f"Error: no problem matches {sorted(wanted)}", file=sys.stderr)
            return EXIT_USAGE

    print(f"Running {len(problems)} problem(s), strategy {config.search.strategy}, backend {config.backend.kind}")
    print("=" * 80)
    runner = BenchmarkRunner(config, args.out, stream_callback=print if args.verbose else None)
    records = runner.run(problems)
    failed = [r.problem.id for r in records if r.error]
    print(f"\nWrote {len(records)} run record(s) to {Path(args.out).resolve()}")
    if failed:
        print(f"Failed problems: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAILURES
    return EXIT_OK


def cmd_score(args) -> int:
    from autoform.harness import MetricsTable, RunStore

    records = RunStore(args.runs).load_runs()
    if not records:
        print(f"Error: no run records in {args.runs}", file=sys.stderr)
        return EXIT_USAGE
    try:
        table = MetricsTable.build(records, args.metric)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(table.to_tsv() if args.format == "tsv" else table.to_text(), end="")
    if args.pdf:
        Path(args.pdf).write_bytes(table.to_pdf())
        print(f"\nPDF saved to: {args.pdf}")
    return EXIT_OK


def _describe(node) -> str:
    payload = node.formulation
    if node.depth == 1:
        return "vars: " + ", ".join(v.name for v in payload.variables)
    if node.depth == 2 and payload.objective is not None:
        return f"{payload.objective.sense.value}: {payload.objective.expression}"
    if node.depth in (3, 4):
        cs = payload.equalities if node.depth == 3 else payload.inequalities
        names = [n for n, _ in cs.items()] if cs is not None else []
        return ("eq: " if node.depth == 3 else "ineq: ") + (", ".join(names) or "(none)")
    return "root"


def cmd_inspect(args) -> int:
    from autoform.core import greedy_formulation
    from autoform.harness import load_run_file

    record = load_run_file(args.run)
    tree = record.tree
    print(f"Problem {record.problem.id} ({record.strategy}): {len(record.terminals)} distinct formulation(s)")
    if record.error:
        print(f"Error: {record.error}")
    if tree is None:
        print("No tree recorded")
        return EXIT_OK
    print(f"nodes: {len(tree)}")
    lam = record.lam

    def show(node, indent: int):
        print(
            f"{'  ' * indent}#{node.id} d={node.depth} N={node.visits} "
            f"Vp={node.v_prior:.3f} Vbp={node.v_bp:.3f} V={node.value(lam):.3f}  {_describe(node)}"
        )
        for child in tree.children(node):
            show(child, indent + 1)

    show(tree.root, 0)
    for t in record.terminals:
        print(f"terminal {t.ordinal}: node {t.node_id} status={t.status} objective={t.objective_value} reward={t.reward:.3f}")
    if args.greedy:
        greedy = greedy_formulation(tree)
        print("\nGreedy formulation:")
        print(json.dumps(greedy.to_dict(), indent=2) if greedy is not None else "(greedy walk stops before a terminal)")
    return EXIT_OK


def cmd_equiv(args) -> int:
    from autoform.equiv import Domain, EquivVerdict, combine_verdicts
    from autoform.equiv.prune import compare_components, component_of
    from autoform.expr import VariableTable
    from autoform.model.formulation import variables_to_dict

    a, b = _read_formulation(args.a), _read_formulation(args.b)
    if not (a.is_complete and b.is_complete):
        print("Error: both formulations must be complete", file=sys.stderr)
        return EXIT_USAGE
    components = {}
    if variables_to_dict(a.variables) != variables_to_dict(b.variables) or a.parameters.to_dict() != b.parameters.to_dict():
        overall = EquivVerdict.distinct(None, "parameters or decision variables differ")
    else:
        table = VariableTable.from_declarations(a.variables, a.parameters)
        domain = Domain.from_table(table)
        for stage, name in ((2, "objective"), (3, "equality_constraints"), (4, "inequality_constraints")):
            components[name] = compare_components(component_of(a, stage, table), component_of(b, stage, table), stage, domain)
        overall = combine_verdicts(components.values())
    report = overall.to_dict()
    report["components"] = {name: verdict.to_dict() for name, verdict in components.items()}
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_lower(args) -> int:
    from autoform.solver import SolverConfig, lower, solve, to_lp

    f = _read_formulation(args.formulation)
    model = lower(f)
    print(f"Lowered: {len(model.columns)} column(s), {len(model.rows)} row(s)")
    if args.lp:
        Path(args.lp).write_text(to_lp(model, Path(args.formulation).stem), encoding="utf-8")
        print(f"LP file saved to: {args.lp}")
    if args.solve:
        result = solve(model, SolverConfig(backend=args.solver))
        print(json.dumps(result.to_dict(), indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    from autoform.model import validate

    violations = validate(_read_formulation(args.formulation))
    for v in violations:
        print(v)
    print(f"{len(violations)} violation(s)")
    return EXIT_FAILURES if violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autoform",
        description="autoform - LLM-guided tree search for LP/MILP formulations",
    )
    parser.add_argument("--log-level", default="INFO", help="Logging level (default: INFO)")
    parser.add_argument("--no-log-file", action="store_true", help="Do not write a session log under ./logs")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Search formulations for every problem of a dataset")
    run.add_argument("--dataset", required=True, help="Problems as JSONL")
    run.add_argument("--config", help="Config JSON (default: packaged default)")
    run.add_argument("--backend", choices=["scripted", "http"], help="Generator backend kind")
    run.add_argument("--fixtures", help="Scripted backend fixture JSONL")
    run.add_argument("--provider", help="HTTP provider (Tetrate, OpenAI, Anthropic, Local)")
    run.add_argument("--model", help="Model name for the HTTP backend")
    run.add_argument("--out", required=True, help="Run directory")
    run.add_argument("--strategy", choices=["mcts", "sequential"])
    run.add_argument("--prior", choices=["ranked", "uniform"])
    run.add_argument("--samples", type=int, help="Samples per expansion (H)")
    run.add_argument("--retain", type=int, help="Children retained (I)")
    run.add_argument("--rollouts", type=int, help="Rollouts per problem (T)")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int, help="Problems searched in parallel")
    run.add_argument("--problem", action="append", help="Only this problem id (repeatable)")
    run.add_argument("--verbose", action="store_true", help="Stream search progress")
    run.set_defaults(func=cmd_run)

    score = sub.add_parser("score", help="Print a metrics table for a run directory")
    score.add_argument("--runs", required=True)
    score.add_argument("--metric", default="pass@1", help="pass@N, best-of-N, accuracy, entropy or pruning")
    score.add_argument("--format", choices=["text", "tsv"], default="text")
    score.add_argument("--pdf", help="Also write the table as PDF")
    score.set_defaults(func=cmd_score)

    inspect = sub.add_parser("inspect", help="Pretty-print the search tree of a run record")
    inspect.add_argument("--run", required=True, help="Run record JSON")
    inspect.add_argument("--greedy", action="store_true", help="Also print the greedy-by-prior formulation")
    inspect.set_defaults(func=cmd_inspect)

    equiv = sub.add_parser("equiv", help="Equivalence checks")
    equiv_sub = equiv.add_subparsers(dest="equiv_command", required=True)
    check = equiv_sub.add_parser("check", help="Compare two complete formulations component by component")
    check.add_argument("a")
    check.add_argument("b")
    check.set_defaults(func=cmd_equiv)

    low = sub.add_parser("lower", help="Lower a formulation to a computational model")
    low.add_argument("--formulation", required=True)
    low.add_argument("--solve", action="store_true", help="Solve and print the result as JSON")
    low.add_argument("--lp", help="Write the model in LP format")
    low.add_argument("--solver", choices=["builtin", "scipy"], default="builtin")
    low.set_defaults(func=cmd_lower)

    val = sub.add_parser("validate", help="List structural violations of a formulation")
    val.add_argument("--formulation", required=True)
    val.set_defaults(func=cmd_validate)

    sub.add_parser("version", help="Print the version").set_defaults(func=None)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for autoform."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "version":
        from autoform import __version__

        print(f"autoform version {__version__}")
        return EXIT_OK

    configure_logging(args.log_level, None if args.no_log_file else Path("./logs"))
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AutoformError as e:
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
