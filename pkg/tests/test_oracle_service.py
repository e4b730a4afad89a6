import pytest

from conftest import solvable_random_problems
from domain_model import PlanningProblem, lit, make_condition
from heuristics import path_cost, path_h_alpha, path_h_inf
from oracle_service import (
    BudgetExceeded,
    Unreachable,
    enumerate_paths,
    optimal_path,
    oracle_heuristic,
    reachable_state_count,
)
from planner_service import run_algorithm
from provider_service import perturb_path
from scenarios import chain_problem


def test_optimal_path_kitchen(kitchen_problem, optimal_kitchen_path):
    found = optimal_path(kitchen_problem)
    assert tuple(found.names) == optimal_kitchen_path
    assert found.cost == 4.0
    assert found.predicates == ["Grab", "Put", "Walk"]
    assert found.objects == ["apple", "table"]


def test_unreachable_goal():
    problem = chain_problem(2)
    blocked = PlanningProblem(problem.domain, problem.s0, make_condition([lit("Unlocked", "gate")]), "blocked")
    with pytest.raises(Unreachable):
        optimal_path(blocked)
    with pytest.raises(Unreachable):
        oracle_heuristic(blocked)


def test_state_budget_falls_back_to_backward_search(kitchen_problem, optimal_kitchen_path):
    with pytest.raises(BudgetExceeded):
        optimal_path(kitchen_problem, max_states=0)
    with pytest.raises(BudgetExceeded):
        oracle_heuristic(kitchen_problem, max_states=0, fallback_budget=None)

    reasoning = oracle_heuristic(kitchen_problem, max_states=0)
    assert reasoning.path == optimal_kitchen_path
    assert reasoning.predicates == {"Walk", "Grab", "Put"}


def test_reachable_state_count(kitchen_problem):
    # robot at one of three places, apple held, on one of two surfaces, or nowhere yet
    assert 3 < reachable_state_count(kitchen_problem) < 30


def test_every_simple_path_costs_at_least_the_optimum(kitchen_problem):
    best = optimal_path(kitchen_problem).cost
    costs = [sum(a.cost for a in p) for p in enumerate_paths(kitchen_problem, max_depth=6)]
    assert costs
    assert min(costs) == best


@pytest.mark.parametrize("correct_rate,error_rate,seed", [(1.0, 0.0, 0), (0.5, 0.0, 1), (0.5, 0.5, 2), (0.0, 1.0, 3)])
def test_hbtp_optimal_matches_oracle_under_any_heuristic(kitchen_problem, correct_rate, error_rate, seed):
    found = optimal_path(kitchen_problem)
    candidates = [a.name for a in kitchen_problem.domain.actions]
    p_hat = perturb_path(found.names, correct_rate, error_rate, seed, candidates)
    result = run_algorithm("hbtp-o", kitchen_problem, p_hat)
    assert result.total_cost == found.cost
    costs = {a.name: a.cost for a in kitchen_problem.domain.actions}
    assert path_cost([a.name for a in result.executed_path()], costs) == found.cost


@pytest.mark.parametrize("alpha", [1.0, 10.0, 1e6])
@pytest.mark.parametrize("correct_rate,seed", [(1.0, 0), (0.5, 4), (0.25, 7), (0.0, 0)])
def test_optimal_path_minimizes_h_alpha_when_heuristic_has_no_wrong_actions(kitchen_problem, alpha, correct_rate, seed):
    found = optimal_path(kitchen_problem)
    costs = {a.name: a.cost for a in kitchen_problem.domain.actions}
    p_hat = perturb_path(found.names, correct_rate, 0.0, seed, list(costs))
    assert set(p_hat) <= set(found.names)
    best = path_h_alpha(found.names, p_hat, alpha, costs)
    for p in enumerate_paths(kitchen_problem, max_depth=6):
        assert best <= path_h_alpha([a.name for a in p], p_hat, alpha, costs) + 1e-9


def test_exact_heuristic_zeroes_h_inf_on_the_optimal_path():
    problem = chain_problem(3)
    found = optimal_path(problem)
    costs = {a.name: a.cost for a in problem.domain.actions}
    assert path_h_inf(found.names, found.names, costs) == 0.0
    for p in enumerate_paths(problem, max_depth=5):
        assert path_h_inf([a.name for a in p], found.names, costs) >= 0.0


@pytest.mark.parametrize("alpha", [1.0, 10.0, 1e6])
def test_optimal_path_minimizes_h_alpha_on_random_problems(alpha):
    for i, (problem, found) in enumerate(solvable_random_problems(15)):
        costs = {a.name: a.cost for a in problem.domain.actions}
        p_hat = perturb_path(found.names, 0.5, 0.0, i, list(costs))
        best = path_h_alpha(found.names, p_hat, alpha, costs)
        for p in enumerate_paths(problem, max_depth=6):
            assert best <= path_h_alpha([a.name for a in p], p_hat, alpha, costs) + 1e-9, problem.label
