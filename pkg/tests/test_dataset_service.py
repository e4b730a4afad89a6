import pytest

from dataset_service import (
    Difficulty,
    GoalPool,
    InsufficientGoals,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from oracle_service import optimal_path
from scenarios import HOUSEHOLD_GOAL_PREDICATES, household_domain, household_state


def test_generation_is_deterministic(kitchen, near_fridge):
    first = generate_dataset(kitchen, 5, Difficulty.EASY, seed=11, base_state=near_fridge)
    second = generate_dataset(kitchen, 5, Difficulty.EASY, seed=11, base_state=near_fridge)
    assert first == second
    assert [t.id for t in first] == [f"kitchen_mini-easy-{i:03d}" for i in range(5)]
    assert len({(t.s0, t.goal) for t in first}) == 5


def test_generated_tasks_are_reachable(kitchen, near_fridge):
    for task in generate_dataset(kitchen, 5, "easy", seed=2, base_state=near_fridge):
        assert len(task.goal) == 1
        assert not task.goal <= task.s0
        found = optimal_path(task.problem(kitchen))
        assert found.cost == task.optimal_cost
        assert tuple(found.names) == task.optimal_path


def test_insufficient_goals(kitchen, near_fridge):
    # three goal subjects would need the robot near two places at once
    with pytest.raises(InsufficientGoals):
        generate_dataset(kitchen, 1, Difficulty.HARD, seed=0, base_state=near_fridge, max_attempts=20)


def test_medium_goals_use_distinct_objects(kitchen, near_fridge):
    tasks = generate_dataset(kitchen, 4, Difficulty.MEDIUM, seed=5, base_state=near_fridge)
    for task in tasks:
        subjects = [l.args[0] for l in task.goal]
        assert len(task.goal) == 2
        assert len(subjects) == len(set(subjects))


def test_household_easy_tasks():
    domain = household_domain("small")
    tasks = generate_dataset(domain, 3, Difficulty.EASY, seed=5, base_state=household_state(domain, 5), max_walk=2)
    assert all(next(iter(t.goal)).predicate in HOUSEHOLD_GOAL_PREDICATES for t in tasks)


def test_goal_pool(kitchen):
    assert GoalPool.for_domain(kitchen).simple == ("Holding", "Near", "On")
    assert GoalPool.for_domain(household_domain("small")).simple == HOUSEHOLD_GOAL_PREDICATES


def test_save_and_load(tmp_path, kitchen, near_fridge):
    tasks = generate_dataset(kitchen, 3, Difficulty.EASY, seed=1, base_state=near_fridge)
    path = str(tmp_path / "tasks.jsonl")
    save_dataset(tasks, path)
    assert load_dataset(path) == tasks
