import os
import random
from typing import List, Tuple

import pytest

from domain_model import Domain, PlanningProblem, lit, make_action, make_condition
from domain_parser import load_domain, load_task
from oracle_service import OraclePath, Unreachable, optimal_path

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DOMAINS = os.path.join(ROOT, "domains")
GOLDEN = os.path.join(os.path.dirname(os.path.abspath(__file__)), "golden")


def fixture_path(name: str) -> str:
    return os.path.join(DOMAINS, name)


def random_problem(seed: int, n_literals: int = 5, n_actions: int = 7) -> PlanningProblem:
    """Zero-arity literals L0..Ln and actions A0..An with seeded pre/add/del lists and costs 1-3."""
    rng = random.Random(seed)
    literals = [lit(f"L{i}") for i in range(n_literals)]
    actions = []
    for i in range(n_actions):
        add = rng.sample(literals, rng.randint(1, 2))
        rest = [l for l in literals if l not in add]
        actions.append(
            make_action(
                f"A{i}",
                pre=rng.sample(literals, rng.randint(0, 2)),
                add=add,
                delete=rng.sample(rest, rng.randint(0, 1)),
                cost=float(rng.randint(1, 3)),
            )
        )
    domain = Domain(
        objects={},
        predicates={l.predicate: () for l in literals},
        schemas=(),
        actions=tuple(actions),
        name=f"random-{seed}",
    )
    s0 = make_condition(rng.sample(literals, rng.randint(0, 2)))
    goal = make_condition(rng.sample(literals, rng.randint(1, 2)))
    return PlanningProblem(domain, s0, goal, f"random-{seed}")


def solvable_random_problems(count: int, first_seed: int = 0) -> List[Tuple[PlanningProblem, OraclePath]]:
    """The first count random problems whose goal is reachable and not already true, with their optimal paths."""
    found: List[Tuple[PlanningProblem, OraclePath]] = []
    seed = first_seed
    while len(found) < count:
        problem = random_problem(seed)
        seed += 1
        if problem.goal <= problem.s0:
            continue
        try:
            found.append((problem, optimal_path(problem)))
        except Unreachable:
            continue
    return found


@pytest.fixture
def kitchen():
    return load_domain(fixture_path("kitchen_mini.domain"))


@pytest.fixture
def kitchen_task(kitchen):
    return load_task(fixture_path("kitchen_mini.task"), kitchen)


@pytest.fixture
def kitchen_problem(kitchen, kitchen_task):
    return kitchen_task.problem(kitchen, label="kitchen_mini")


@pytest.fixture
def candle_problem():
    domain = load_domain(fixture_path("candle.domain"))
    return load_task(fixture_path("candle.task"), domain).problem(domain, label="candle")


@pytest.fixture
def optimal_kitchen_path():
    return ("Walk_apple", "Grab_apple", "Walk_table", "Put_apple_table")


@pytest.fixture
def near_fridge():
    return make_condition([lit("Near", "fridge")])
