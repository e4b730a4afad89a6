import pytest

from dataset_service import Difficulty, generate_dataset
from feedback_service import (
    EMPTY_SPACE,
    EmptySpace,
    FeedbackPayload,
    SummaryPath,
    build_feedback,
    merge_space,
    plan_with_feedback,
    prune_action_space,
    summarize_bt,
)
from planner_service import Outcome, run_algorithm
from provider_service import MockProvider, OracleProvider, ScriptedProvider
from reasoning_parser import ReasoningResult
from simulator import simulate_execution

# Grab is the bottleneck: without it the apple can never be held.
NO_GRAB = ReasoningResult(
    predicates=frozenset({"Walk", "Put"}),
    objects=frozenset({"apple", "table"}),
    path=("Walk_table", "Put_apple_table"),
)
ONLY_GRAB = ReasoningResult(predicates=frozenset({"Grab"}), objects=frozenset({"apple"}))


def test_prune_uses_reasoning_and_path_symbols(kitchen):
    space = prune_action_space(kitchen, NO_GRAB)
    assert space.actions == ("Walk_apple", "Walk_table", "Put_apple_table")

    from_path_only = ReasoningResult(path=("Walk_fridge",))
    assert prune_action_space(kitchen, from_path_only).actions == ("Walk_fridge",)

    with pytest.raises(EmptySpace):
        prune_action_space(kitchen, ReasoningResult())


def test_merge_space_is_monotone(kitchen):
    first = merge_space(kitchen, None, NO_GRAB, 0)
    second = merge_space(kitchen, first, ONLY_GRAB, 1)
    assert set(first.actions) <= set(second.actions)
    assert "Grab_apple" in second.actions
    assert second.round == 1
    third = merge_space(kitchen, second, ReasoningResult(), 2)
    assert third.actions == second.actions


def test_summary_of_failed_search(kitchen_problem):
    space = prune_action_space(kitchen_problem.domain, NO_GRAB)
    run = run_algorithm("hbtp-o", kitchen_problem.with_actions(space.actions), NO_GRAB.path)
    assert run.outcome == Outcome.EXHAUSTED
    paths = summarize_bt(run, k=3)
    assert [p.actions for p in paths] == [("Walk_table", "Put_apple_table")]
    assert [str(l) for l in sorted(paths[0].frontier)] == ["Holding(apple)"]

    payload = build_feedback(kitchen_problem.domain, space, run, run.outcome.value)
    assert payload.missing_predicates == ["Grab"]
    assert payload.missing_objects == ["fridge"]
    text = payload.render()
    assert "1. Walk_table, Put_apple_table" in text
    assert "Action predicates not considered yet: Grab" in text


def test_feedback_render_truncates_and_marks_empty():
    payload = FeedbackPayload(
        top_paths=[],
        missing_predicates=["Cut", "Open", "Wipe"],
        missing_objects=[],
        reason="timeout",
        max_items=2,
    )
    text = payload.render()
    assert "Cut, Open (+1 more)" in text
    assert "Objects not considered yet: none" in text
    assert "Longest explored paths:\nnone" in text


def test_summary_keeps_k_longest():
    class Run:
        expanded = []

    assert summarize_bt(Run(), k=2) == []
    assert SummaryPath(("A",), frozenset()).to_dict() == {"actions": ["A"], "frontier": []}


def test_feedback_recovers_missing_predicate(kitchen_problem, optimal_kitchen_path):
    revised = ReasoningResult.from_actions([kitchen_problem.domain.action_by_name[n] for n in optimal_kitchen_path])
    provider = ScriptedProvider(NO_GRAB, revised, trigger="Grab")
    result, log = plan_with_feedback(kitchen_problem, provider, "hbtp-o", max_rounds=3)
    assert result.solved
    assert result.total_cost == 4.0
    assert result.feedback_rounds == 1
    assert log.solved_round == 1
    assert provider.calls == [0, 1]
    assert log.rounds[0].outcome == Outcome.EXHAUSTED.value
    assert log.rounds[0].feedback["missing_predicates"] == ["Grab"]
    assert simulate_execution(result.tree, kitchen_problem.s0).succeeded


def test_no_feedback_rounds_means_failure(kitchen_problem):
    provider = ScriptedProvider(NO_GRAB)
    result, log = plan_with_feedback(kitchen_problem, provider, "hbtp-o", max_rounds=0)
    assert not result.solved
    assert log.solved_round is None
    assert len(log.rounds) == 1


def test_space_accumulates_across_rounds(kitchen_problem):
    provider = ScriptedProvider(NO_GRAB, ONLY_GRAB, trigger="Grab")
    result, log = plan_with_feedback(kitchen_problem, provider, "hbtp-s", max_rounds=2)
    sizes = [r.sizes["actions"] for r in log.rounds]
    assert sizes == sorted(sizes)
    assert result.solved
    assert result.total_cost == 4.0


def test_empty_space_round_asks_again(kitchen_problem):
    provider = ScriptedProvider(ReasoningResult(), OracleProvider().reason(kitchen_problem))
    result, log = plan_with_feedback(kitchen_problem, provider, "hbtp-o", max_rounds=1)
    assert log.rounds[0].outcome == EMPTY_SPACE
    assert log.rounds[0].feedback["top_paths"] == []
    assert result.solved
    assert log.solved_round == 1


def test_negative_rounds_rejected(kitchen_problem):
    with pytest.raises(ValueError):
        plan_with_feedback(kitchen_problem, ScriptedProvider(NO_GRAB), max_rounds=-1)


@pytest.mark.parametrize("problem_fixture", ["kitchen_problem", "candle_problem"])
@pytest.mark.parametrize("algorithm", ["hbtp-o", "hbtp-s"])
def test_exact_mock_plans_like_the_oracle(request, problem_fixture, algorithm):
    problem = request.getfixturevalue(problem_fixture)
    oracle_result, oracle_log = plan_with_feedback(problem, OracleProvider(), algorithm, max_rounds=2)
    mock_result, mock_log = plan_with_feedback(problem, MockProvider(1.0, 0.0, seed=5), algorithm, max_rounds=2)
    assert oracle_result.solved
    assert mock_result.to_record(include_timing=False) == oracle_result.to_record(include_timing=False)
    assert mock_log.to_dict(include_timing=False) == oracle_log.to_dict(include_timing=False)


@pytest.mark.parametrize(
    "predicates,objects",
    [
        ({"Walk"}, {"apple"}),
        ({"Grab", "Put"}, {"apple", "table", "fridge"}),
        ({"Walk", "Grab", "Put"}, {"table"}),
    ],
)
def test_feedback_lists_exactly_the_excluded_symbols(kitchen, predicates, objects):
    space = prune_action_space(kitchen, ReasoningResult(predicates=frozenset(predicates), objects=frozenset(objects)))
    payload = build_feedback(kitchen, space, None, Outcome.EXHAUSTED.value)
    assert payload.missing_predicates == sorted({"Walk", "Grab", "Put"} - predicates)
    assert payload.missing_objects == sorted({"apple", "table", "fridge"} - objects)
    for a in kitchen.actions:
        inside = a.predicate in space.predicates and set(a.args) <= space.objects
        assert (a.name in space.actions) == inside


@pytest.mark.parametrize("algorithm", ["obtea", "hbtp-o"])
def test_oracle_pruning_keeps_the_optimum(kitchen, near_fridge, algorithm):
    for task in generate_dataset(kitchen, 4, Difficulty.EASY, seed=3, base_state=near_fridge):
        problem = task.problem(kitchen)
        reasoning = OracleProvider().reason(problem)
        space = prune_action_space(kitchen, reasoning)
        assert set(task.optimal_path) <= set(space.actions)
        result = run_algorithm(algorithm, problem.with_actions(space.actions), reasoning.path)
        assert result.total_cost == task.optimal_cost
        assert simulate_execution(result.tree, problem.s0).succeeded
