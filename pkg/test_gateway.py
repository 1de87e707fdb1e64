"""Tests for prompt rendering, response parsing, backends and the LLM-facing agents."""

import pytest

from autoform.agents import (
    BackendConfig,
    GeneratorGateway,
    HttpBackend,
    Phase,
    RankResult,
    ScriptedBackend,
    ScriptedFixtures,
    build_prompt,
    normalized_rank_score,
    parse_payload,
)
from autoform.agents.parsing import extract_component, parameter_comments, parse_groups, parse_rank, parse_score
from autoform.errors import BackendError, MalformedGroups, MalformedRank, MalformedResponse
from autoform.model import Formulation, ObjectiveSpec, ParameterTable, Sense
from autoform.model.formulation import variables_from_dict

PROBLEM = "A workshop makes chairs and tables from 40 hours of labor."

PARTIAL = Formulation(
    parameters=ParameterTable.from_dict({"hours": 40, "profit": [3, 5]}),
    variables=variables_from_dict({
        "chairs": {"description": "chairs made", "type": "GRB.INTEGER", "iteration_space": None},
        "tables": {"description": "tables made", "type": "GRB.INTEGER", "iteration_space": None},
    }),
    depth=1,
)

GOOD_OBJECTIVE = 'formalization_dict["objective"] = {"max": "profit[0] * chairs + profit[1] * tables"}'
OTHER_OBJECTIVE = 'formalization_dict["objective"] = {"max": "chairs + tables"}'
BAD_OBJECTIVE = 'formalization_dict["objective"] = {"max": "profit[0] * stools"}'


def _backend(responses, match="reflecting the nature of the objective", strict=False):
    return ScriptedBackend.from_records([{"match": [match], "responses": responses}], strict=strict)


def test_generation_prompt_embeds_problem_and_partial():
    print("\n🧪 Testing prompt rendering...")

    prompt = build_prompt(Phase.OBJECTIVE, PROBLEM, PARTIAL)
    text = prompt.rendered_text
    assert PROBLEM in text, "Problem text should be embedded verbatim"
    assert "formalization_dict = {" in text, "Current formalization should be rendered"
    assert '"type": "GRB.INTEGER"' in text, "Variable types should render as Gurobi names"
    assert "reflecting the nature of the objective" in text, "Objective template missing"
    assert prompt.stage == 2, "Objective prompts produce stage 2 candidates"

    print("✅ Prompt rendering: PASSED")


def test_prompt_depth_mismatch():
    with pytest.raises(ValueError):
        build_prompt(Phase.OBJECTIVE, PROBLEM, Formulation(depth=0))
    with pytest.raises(ValueError):
        build_prompt(Phase.RANK, PROBLEM, PARTIAL)


def test_rank_prompt_lists_solutions():
    candidates = [
        Formulation(PARTIAL.parameters, PARTIAL.variables, ObjectiveSpec(Sense.MAX, "chairs"), depth=2),
        Formulation(PARTIAL.parameters, PARTIAL.variables, ObjectiveSpec(Sense.MAX, "tables"), depth=2),
    ]
    text = build_prompt(Phase.RANK, PROBLEM, PARTIAL, candidates=candidates, ranked_phase=Phase.OBJECTIVE).rendered_text
    assert "selecting the optimal objective" in text, "Ranked component name should be substituted"
    assert '"solution_1": {' in text and '"solution_2": {' in text, "Both candidates should be listed"
    assert "#VARIABLE#" not in text and "###SOLUTIONS###" not in text, "Placeholders should be replaced"


def test_extract_component_last_assignment_wins():
    """Restated or revised answers are read from the last assignment."""
    print("\n🧪 Testing response extraction...")

    text = (
        "First attempt:\n"
        'formalization_dict["decision_variables"] = {"x": {"type": GRB.CONTINUOUS, "iteration_space": None}}\n'
        "Revised, since units are whole:\n"
        'formalization_dict["decision_variables"] = {\n'
        '    "x": {"description": "units # made", "type": GRB.INTEGER, "iteration_space": None},  # count\n'
        "}\n"
    )
    value, _ = extract_component(text, "decision_variables")
    assert value["x"]["type"] == "GRB.INTEGER", "Bare GRB tokens should be quoted and the last block read"
    assert value["x"]["description"] == "units # made", "Hashes inside strings are not comments"

    with pytest.raises(MalformedResponse):
        extract_component("I could not decide.", "objective")

    print("✅ Response extraction: PASSED")


def test_extract_component_from_full_restatement():
    text = 'formalization_dict = {"parameters": {}, "objective": {"min": "x"}}'
    value, _ = extract_component(text, "objective")
    assert value == {"min": "x"}, "A full formalization_dict restatement should be accepted"


def test_parameter_comments():
    block = '{\n    # number of items\n    "n": 3,\n    "cap": 10,  # capacity in kg\n}'
    assert parameter_comments(block) == {"n": "number of items", "cap": "capacity in kg"}, \
        "Leading and trailing comments should attach to their keys"


def test_parse_payload_parameters_keeps_comments():
    text = 'formalization_dict["parameters"] = {\n    # hours of labor\n    "hours": 40,\n}'
    table = parse_payload(Phase.PARAMETERS, text)
    assert table.get("hours").comment == "hours of labor", "Parameter comment should be kept"


def test_parse_rank():
    assert parse_rank("So: rank = {1: solution_2, 2: solution_1, 3: solution_3}", 3) == [1, 0, 2], \
        "Rank order mismatch"
    assert parse_rank("rank = {1: 'solution_1', 2: 'solution_2'}", 2) == [0, 1], "Quoted names should parse"
    with pytest.raises(MalformedRank):
        parse_rank("rank = {1: solution_1, 2: solution_1}", 2)
    with pytest.raises(MalformedRank):
        parse_rank("rank = {1: solution_1, 2: solution_5}", 2)


def test_parse_groups():
    groups = parse_groups("groups = {1: ['solution_3', 'solution_1'], 2: ['solution_2']}", 4)
    assert groups == [[0, 2], [1], [3]], f"Unexpected partition {groups}"
    with pytest.raises(MalformedGroups):
        parse_groups("groups = {1: ['solution_1'], 2: ['solution_1', 'solution_2']}", 2)


def test_parse_score():
    assert parse_score("Reasoning...\nscore = 0.7") == pytest.approx(0.7), "score = line should be read"
    assert parse_score("0.35") == pytest.approx(0.35), "Bare number should be read"
    with pytest.raises(MalformedResponse):
        parse_score("no opinion")


def test_scripted_backend_ordinals():
    """Ordinals count calls per prompt and pick responses cyclically."""
    print("\n🧪 Testing scripted backend...")

    backend = _backend(["A", "B"], match="hello")
    assert backend.complete_many("hello world", 3) == ["A", "B", "A"], "Responses should cycle by ordinal"
    assert backend.complete("hello world") == "B", "Ordinal 3 should pick the second response"
    assert [r.ordinal for r in backend.call_log] == [0, 1, 2, 3], "Call log should record ordinals"
    assert backend.complete("other prompt") == "", "Unmatched prompts return empty text when not strict"

    strict = _backend(["A"], match="hello", strict=True)
    with pytest.raises(BackendError):
        strict.complete("other prompt")

    print("✅ Scripted backend: PASSED")


def test_exact_fixture_wins_over_rule():
    from autoform.agents import prompt_sha256

    sha = prompt_sha256("hello world")
    backend = ScriptedBackend.from_records([
        {"match": ["hello"], "responses": ["rule"]},
        {"prompt_sha256": sha, "ordinal": 1, "response": "exact"},
    ])
    assert backend.complete_many("hello world", 2) == ["rule", "exact"], "Exact entries should win"


def test_packaged_fixtures_load():
    fixtures = ScriptedFixtures.load("data/fixtures/micro.jsonl")
    assert fixtures.rules, "Packaged micro fixtures should define match rules"


class FlakyClient:
    def __init__(self, failures=1):
        self.failures = failures
        self.seeds = []

    def call(self, prompt, temperature=1.0, max_tokens=4096, seed=None):
        self.seeds.append(seed)
        if self.failures:
            self.failures -= 1
            raise RuntimeError("connection reset")
        return f"answer for {seed}"


def test_http_backend_retries_and_seeds():
    config = BackendConfig(kind="http", provider="OpenAI", retry_delay=0.0, max_retries=2, max_workers=1)
    client = FlakyClient(failures=1)
    backend = HttpBackend(config, client=client)
    assert backend.complete_many("prompt", 2, seed=10) == ["answer for 10", "answer for 11"], \
        "Per-call seeds should be seed + ordinal"
    assert client.seeds == [10, 10, 11], "The failed call should be retried with the same seed"


def test_http_backend_gives_up():
    config = BackendConfig(kind="http", provider="OpenAI", retry_delay=0.0, max_retries=1)
    backend = HttpBackend(config, client=FlakyClient(failures=5))
    with pytest.raises(BackendError):
        backend.complete("prompt")


def test_generate_candidates_drops_invalid_samples():
    """Samples that reference undeclared names never become candidates."""
    print("\n🧪 Testing candidate generation...")

    gateway = GeneratorGateway(_backend([GOOD_OBJECTIVE, BAD_OBJECTIVE, "nothing useful", OTHER_OBJECTIVE]))
    candidates = gateway.candidate_formulations(Phase.OBJECTIVE, PROBLEM, PARTIAL, 4)
    assert [c.objective.expression for c in candidates] == [
        "profit[0] * chairs + profit[1] * tables", "chairs + tables"
    ], "Only valid samples should survive, in generation order"
    assert all(c.depth == 2 for c in candidates), "Candidates extend the partial by one stage"
    temperatures = {r.temperature for r in gateway.call_log}
    assert temperatures == {1.0}, "Generation runs at the sampling temperature"

    print("✅ Candidate generation: PASSED")


def test_ranking_falls_back_to_generation_order():
    candidates = [
        Formulation(PARTIAL.parameters, PARTIAL.variables, ObjectiveSpec(Sense.MAX, "chairs"), depth=2),
        Formulation(PARTIAL.parameters, PARTIAL.variables, ObjectiveSpec(Sense.MAX, "tables"), depth=2),
    ]
    gateway = GeneratorGateway(_backend(["I like them both."], match="selecting the optimal"))
    result = gateway.rank_candidates(Phase.OBJECTIVE, PROBLEM, PARTIAL, candidates)
    assert result.fallback, "Two malformed rankings should fall back"
    assert result.order == [0, 1], "Fallback keeps generation order"
    assert len(gateway.call_log) == 2, "A malformed ranking is retried once"
    assert all(r.temperature == 0.0 for r in gateway.call_log), "Ranking runs at the structured temperature"


def test_ranking_single_candidate_skips_model():
    gateway = GeneratorGateway(_backend(["unused"], match="selecting the optimal"))
    only = [Formulation(PARTIAL.parameters, PARTIAL.variables, ObjectiveSpec(Sense.MAX, "chairs"), depth=2)]
    assert gateway.rank_candidates(Phase.OBJECTIVE, PROBLEM, PARTIAL, only).order == [0], "Single candidate ranks first"
    assert gateway.call_log == [], "No call for a single candidate"


def test_normalized_rank_scores():
    assert normalized_rank_score(1, 3) == pytest.approx(1 - 0.5 / 3), "Best rank score mismatch"
    assert normalized_rank_score(3, 3) == pytest.approx(1 / 6), "Worst rank score mismatch"
    scores = RankResult.from_order([2, 0, 1]).scores
    assert scores == pytest.approx([0.5, 1 / 6, 5 / 6]), f"Scores should follow rank, got {scores}"
    with pytest.raises(ValueError):
        normalized_rank_score(0, 3)


def test_grouping_leaves_unmentioned_candidates_alone():
    candidates = [PARTIAL, PARTIAL, PARTIAL]
    gateway = GeneratorGateway(_backend(
        ["groups = {1: ['solution_1', 'solution_3']}"],
        match="determining if two or more sets of decision variables should be grouped",
    ))
    groups = gateway.group_variable_sets(PROBLEM, Formulation(PARTIAL.parameters, depth=0), candidates)
    assert groups == [[0, 2], [1]], f"Unexpected groups {groups}"


def test_comparison_scores():
    complete = Formulation.from_dict({
        "parameters": {"hours": 40},
        "decision_variables": {"chairs": {"type": "GRB.INTEGER"}},
        "objective": {"max": "chairs"},
        "equality_constraints": {"null": None},
        "inequality_constraints": {"labor": "chairs <= hours"},
    })
    other = Formulation.from_dict({**complete.to_dict(), "objective": {"max": "2 * chairs"}})
    gateway = GeneratorGateway(_backend(["score = 1.7"], match="baseline formulation of the problem description"))

    assert gateway.compare_to_baseline(complete, complete, PROBLEM) == 0.5, "Identical formulations score 0.5"
    assert gateway.call_log == [], "Identical formulations need no model call"
    assert gateway.compare_to_baseline(other, complete, PROBLEM) == 1.0, "Scores are clamped to [0, 1]"
