import pytest

from behavior_tree import Status, action_node, condition_node, fallback, sequence
from domain_model import PlanningProblem, lit, make_condition
from planner_service import obtea
from simulator import Perturbation, StepCapExceeded, run_tree, simulate_execution, step_cap


@pytest.fixture
def planned(kitchen_problem):
    return obtea(kitchen_problem).tree


def test_planned_tree_reaches_goal(planned, kitchen_problem):
    trace = simulate_execution(planned, kitchen_problem.s0)
    assert trace.succeeded
    assert trace.steps == 4
    assert trace.actions == ["Walk_apple", "Grab_apple", "Walk_table", "Put_apple_table"]
    assert kitchen_problem.goal <= trace.final_state


def test_tree_reacts_to_perturbation(planned, kitchen_problem):
    # the robot is pulled away from the table right after walking there
    moved = Perturbation(
        after_step=3,
        add=make_condition([lit("Near", "fridge")]),
        delete=make_condition([lit("Near", "table")]),
    )
    trace = simulate_execution(planned, kitchen_problem.s0, [moved])
    assert trace.succeeded
    assert trace.steps == 5
    assert trace.actions[3] == "Walk_table"


def test_tree_fails_outside_its_region(kitchen_problem):
    # planned for a robot already next to the apple, so no condition covers Near(fridge)
    near_apple = PlanningProblem(
        kitchen_problem.domain, make_condition([lit("Near", "apple")]), kitchen_problem.goal, "near-apple"
    )
    tree = obtea(near_apple).tree
    assert simulate_execution(tree, near_apple.s0).succeeded
    trace = simulate_execution(tree, kitchen_problem.s0)
    assert trace.status == Status.FAILURE
    assert trace.steps == 0


def test_step_cap(kitchen):
    walk_apple = kitchen.action_by_name["Walk_apple"]
    walk_fridge = kitchen.action_by_name["Walk_fridge"]
    goal = make_condition([lit("Holding", "apple")])
    # walks back and forth forever
    looping = fallback(
        condition_node(goal),
        sequence(condition_node(make_condition([lit("Near", "apple")])), action_node(walk_fridge)),
        sequence(condition_node(frozenset()), action_node(walk_apple)),
    )
    assert step_cap(looping) == 30
    s0 = make_condition([lit("Near", "fridge")])
    with pytest.raises(StepCapExceeded) as info:
        run_tree(looping, s0)
    assert len(info.value.actions) == 30

    trace = simulate_execution(looping, s0, cap=5)
    assert trace.status == Status.FAILURE
    assert trace.steps == 5
    assert "5 steps" in trace.error


def test_trace_dict(planned, kitchen_problem):
    data = simulate_execution(planned, kitchen_problem.s0).to_dict()
    assert data["status"] == "success"
    assert data["final_state"] == ["Near(table)", "On(apple,table)"]
    assert data["error"] is None
