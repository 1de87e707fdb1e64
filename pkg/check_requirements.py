"""Check that the autoform modules, packaged data and optional backends are in place."""

import sys


def check_requirements():
    """Check the modules, packaged data and optional backends."""
    checks = []

    # 1. Formulation model and expression language
    try:
        from autoform.model import Formulation, deserialize, serialize, validate
        from autoform.expr import VariableTable, parse_expression, to_linear
        checks.append(("Formulation model and expression language", True))
    except Exception as e:
        checks.append(("Formulation model and expression language", False, str(e)))

    # 2. Equivalence pruning
    try:
        from autoform.equiv import Domain, prune_candidates
        checks.append(("Equivalence pruning", True))
    except Exception as e:
        checks.append(("Equivalence pruning", False, str(e)))

    # 3. Generator gateway and prompt templates
    try:
        from autoform.agents import GeneratorGateway
        from autoform.agents.prompts import TEMPLATE_DIR, Phase
        names = [phase.value for phase in Phase] + ["preamble"]
        missing = [name for name in names if not (TEMPLATE_DIR / f"{name}.txt").exists()]
        checks.append(("Prompt templates", not missing, f"missing {missing}"))
    except Exception as e:
        checks.append(("Prompt templates", False, str(e)))

    # 4. Search strategies
    try:
        from autoform.core import SearchConfig, run_search
        import inspect
        source = inspect.getsource(run_search)
        checks.append(("Tree search and sequential sampling", "sequential" in source))
    except Exception as e:
        checks.append(("Tree search and sequential sampling", False, str(e)))

    # 5. Packaged config, benchmark and fixtures
    try:
        from autoform.config import MICRO_CONFIG, AutoformConfig
        from autoform.harness import load_dataset
        from autoform.utils.resources import resolve_data_path
        config = AutoformConfig.load(MICRO_CONFIG)
        problems = load_dataset("data/benchmarks/micro.jsonl")
        fixtures = resolve_data_path(config.backend.fixtures)
        checks.append(("Packaged data", bool(problems) and fixtures.exists(), f"fixtures {fixtures}"))
    except Exception as e:
        checks.append(("Packaged data", False, str(e)))

    # 6. Solver
    try:
        from autoform.solver import SolverConfig, lower, solve, to_lp
        checks.append(("Lowering and solver", True))
    except Exception as e:
        checks.append(("Lowering and solver", False, str(e)))

    # 7. LLM client integration
    try:
        from autoform.utils.llm_client import LLMClient
        checks.append(("LLM client exists", True))
    except Exception as e:
        checks.append(("LLM client exists", False, str(e)))

    # 8. PDF export
    try:
        import reportlab
        from autoform.harness import MetricsTable
        checks.append(("PDF export", True))
    except Exception as e:
        checks.append(("PDF export", False, str(e)))

    # Optional, reported without failing the check
    try:
        import scipy
        scipy_status = f"scipy {scipy.__version__} available"
    except ImportError:
        scipy_status = "scipy not installed (builtin solver only)"

    # Print results
    print("=" * 60)
    print("autoform Requirements Check")
    print("=" * 60)

    passed = 0
    failed = 0

    for check in checks:
        name = check[0]
        status = check[1]
        if status:
            print(f"✅ {name}")
            passed += 1
        else:
            error = check[2] if len(check) > 2 else "Not found"
            print(f"❌ {name}: {error}")
            failed += 1

    print(f"ℹ️  {scipy_status}")
    print("=" * 60)
    print(f"Results: {passed}/{len(checks)} passed")
    print("=" * 60)

    return failed == 0


if __name__ == "__main__":
    success = check_requirements()
    sys.exit(0 if success else 1)
