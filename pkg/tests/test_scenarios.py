import pytest

from dataset_service import Difficulty, generate_dataset
from domain_model import PlanningProblem, lit, make_condition
from feedback_service import prune_action_space
from oracle_service import optimal_path, oracle_heuristic
from planner_service import obtea, run_algorithm
from scenarios import SIZES, chain_problem, household_domain, household_state, pruning_witness_problem, witness_problem
from simulator import simulate_execution


@pytest.fixture(scope="module")
def small():
    return household_domain("small")


def test_household_sizes_grow():
    counts = [len(household_domain(size).actions) for size in SIZES]
    assert counts == sorted(counts)
    assert counts[0] == 45


def test_unknown_size():
    with pytest.raises(ValueError):
        household_domain("huge")


def test_household_state_is_valid(small):
    s0 = household_state(small, seed=4)
    assert all(small.is_valid_literal(l) for l in s0)
    assert lit("IsRightHandEmpty") in s0
    assert household_state(small, seed=4) == s0
    grabbables = small.categories["GRABBABLE"]
    assert sum(1 for l in s0 if l.predicate == "IsOn") == len(grabbables)


def test_grab_clears_placement(small):
    grab = small.action_by_name["RightGrab_apple"]
    assert lit("IsOn", "apple", "kitchentable") in grab.delete
    assert lit("IsIn", "apple", "fridge") in grab.delete
    assert lit("IsRightHandEmpty") in grab.delete


@pytest.mark.parametrize(
    "goal,cost",
    [
        ([lit("IsSwitchedOn", "tv")], 23.0),
        ([lit("IsClean", "kitchentable")], 50.0),
    ],
)
def test_household_tasks_solved_optimally(small, goal, cost):
    problem = PlanningProblem(small, household_state(small, seed=0), make_condition(goal), "household")
    found = optimal_path(problem)
    assert found.cost == cost
    for algorithm, p_hat in (("obtea", ()), ("hbtp-o", found.names), ("hbtp-s", found.names)):
        result = run_algorithm(algorithm, problem, p_hat)
        assert result.total_cost == cost
        assert simulate_execution(result.tree, problem.s0).succeeded


def test_chain_shape():
    problem = chain_problem(4)
    assert len(problem.domain.actions) == 8
    assert len(chain_problem(4, distractors=False).domain.actions) == 4
    assert obtea(problem).total_cost == 4.0
    with pytest.raises(ValueError):
        chain_problem(0)


def test_witness_fixture():
    problem, p_hat = witness_problem()
    assert [a.name for a in problem.domain.actions] == ["Drive_parcel", "Cycle_parcel", "Load_parcel"]
    assert set(p_hat) == {a.name for a in problem.domain.actions}


def test_pruning_witness_fixture():
    problem, p_hat = pruning_witness_problem()
    assert [a.name for a in problem.domain.actions] == ["Fetch", "MakeFrame", "Assemble", "Finish", "Fast"]
    assert set(p_hat) == {a.name for a in problem.domain.actions}
    assert not problem.goal <= problem.s0


def test_exact_heuristic_on_easy_household_suite(small):
    suite = generate_dataset(small, 12, Difficulty.EASY, seed=21, base_state=household_state(small, 0))
    satisficing_total = optimal_total = 0.0
    for task in suite:
        problem = task.problem(small)
        optimal = run_algorithm("hbtp-o", problem, task.optimal_path)
        assert optimal.total_cost == task.optimal_cost, task.id
        satisficing = run_algorithm("hbtp-s", problem, task.optimal_path)
        assert satisficing.solved, task.id
        assert simulate_execution(satisficing.tree, problem.s0).succeeded, task.id
        satisficing_total += satisficing.total_cost
        optimal_total += task.optimal_cost
    assert satisficing_total <= 1.05 * optimal_total


@pytest.fixture(scope="module")
def large():
    return household_domain("large")


@pytest.mark.parametrize("device", ["tv", "lamp"])
def test_oracle_pruning_shrinks_large_household(large, device):
    problem = PlanningProblem(
        large, household_state(large, seed=0), make_condition([lit("IsSwitchedOn", device)]), f"switch-{device}"
    )
    reasoning = oracle_heuristic(problem)
    space = prune_action_space(large, reasoning)
    assert len(space.actions) <= 0.2 * len(large.actions)
    assert set(reasoning.path) <= set(space.actions)

    pruned = run_algorithm("hbtp-s", problem.with_actions(space.actions), reasoning.path)
    assert pruned.solved
    assert simulate_execution(pruned.tree, problem.s0).succeeded

    full = obtea(problem, budget=30.0, record_trace=False)
    assert full.solved
    assert pruned.explored_count * 2 <= full.explored_count
