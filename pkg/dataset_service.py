"""
File: dataset_service.py
Seeded task generation in three difficulty tiers, with every goal checked
reachable by the oracle, and JSON-lines storage for task suites.
"""

import json
import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

from domain_model import Condition, Domain, Literal, PlanningProblem, State, canonical, make_condition
from domain_parser import parse_literal
from oracle_service import oracle_heuristic
from reasoning_parser import ProviderError
from scenarios import HOUSEHOLD_GOAL_PREDICATES, HOUSEHOLD_TOOL_PREDICATES

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"


SUBGOALS = {Difficulty.EASY: 1, Difficulty.MEDIUM: 2, Difficulty.HARD: 3}


class InsufficientGoals(Exception):
    pass


@dataclass(frozen=True)
class TaskRecord:
    id: str
    s0: State
    goal: Condition
    difficulty: Difficulty
    optimal_cost: Optional[float] = None
    optimal_path: Tuple[str, ...] = ()

    def problem(self, domain: Domain) -> PlanningProblem:
        return PlanningProblem(domain=domain, s0=self.s0, goal=self.goal, label=self.id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "difficulty": self.difficulty.value,
            "s0": canonical(self.s0),
            "goal": canonical(self.goal),
            "optimal_cost": self.optimal_cost,
            "optimal_path": list(self.optimal_path),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TaskRecord":
        return cls(
            id=data["id"],
            s0=make_condition(parse_literal(t) for t in data["s0"]),
            goal=make_condition(parse_literal(t) for t in data["goal"]),
            difficulty=Difficulty(data["difficulty"]),
            optimal_cost=data.get("optimal_cost"),
            optimal_path=tuple(data.get("optimal_path", ())),
        )


@dataclass(frozen=True)
class GoalPool:
    simple: Tuple[str, ...]
    tool: Tuple[str, ...] = ()

    @classmethod
    def for_domain(cls, domain: Domain) -> "GoalPool":
        """Household domains use their task predicates; any other domain draws from every added predicate."""
        household = set(HOUSEHOLD_GOAL_PREDICATES) | set(HOUSEHOLD_TOOL_PREDICATES)
        if household <= set(domain.predicates):
            return cls(HOUSEHOLD_GOAL_PREDICATES, HOUSEHOLD_TOOL_PREDICATES)
        added = sorted({l.predicate for a in domain.actions for l in a.add})
        return cls(tuple(added))


def _random_walk(domain: Domain, base: State, rng: random.Random, steps: int) -> State:
    state = base
    for _ in range(steps):
        applicable = [a for a in domain.actions if a.pre <= state]
        if not applicable:
            break
        a = rng.choice(applicable)
        state = (state | a.add) - a.delete
    return state


def _candidates(domain: Domain, s0: State, predicates: Sequence[str]) -> List[Literal]:
    wanted = set(predicates)
    return sorted({l for a in domain.actions for l in a.add if l.predicate in wanted and l not in s0})


def _subject(l: Literal) -> str:
    return l.args[0] if l.args else l.predicate


def _draw_goal(rng: random.Random, simple: List[Literal], tool: List[Literal], difficulty: Difficulty) -> Optional[Condition]:
    if difficulty == Difficulty.EASY:
        return make_condition([rng.choice(simple)]) if simple else None
    if difficulty == Difficulty.MEDIUM and tool and rng.random() < 0.5:
        return make_condition([rng.choice(tool)])
    pool = simple + tool
    chosen: List[Literal] = []
    subjects: Set[str] = set()
    for l in rng.sample(pool, len(pool)):
        if _subject(l) in subjects:
            continue
        chosen.append(l)
        subjects.add(_subject(l))
        if len(chosen) == SUBGOALS[difficulty]:
            return make_condition(chosen)
    return None


def generate_dataset(
    domain: Domain,
    n: int,
    difficulty: Difficulty,
    seed: int = 0,
    base_state: Optional[State] = None,
    max_walk: int = 6,
    max_states: int = 20_000,
    max_attempts: Optional[int] = None,
) -> List[TaskRecord]:
    """
    n distinct (s0, goal) tasks. Each s0 is a seeded random walk from base_state;
    Easy goals are one literal, Medium goals one tool literal or two literals,
    Hard goals three literals over distinct objects.
    """
    rng = random.Random(seed)
    difficulty = Difficulty(difficulty)
    pool = GoalPool.for_domain(domain)
    base = make_condition(base_state or ())
    attempts = max_attempts if max_attempts is not None else 50 * n
    records: List[TaskRecord] = []
    seen: Set[Tuple[State, Condition]] = set()

    for _ in range(attempts):
        if len(records) == n:
            break
        s0 = _random_walk(domain, base, rng, rng.randint(0, max_walk))
        goal = _draw_goal(rng, _candidates(domain, s0, pool.simple), _candidates(domain, s0, pool.tool), difficulty)
        if goal is None or (s0, goal) in seen:
            continue
        seen.add((s0, goal))
        task_id = f"{domain.name}-{difficulty.value}-{len(records):03d}"
        problem = PlanningProblem(domain, s0, goal, task_id)
        try:
            reasoning = oracle_heuristic(problem, max_states=max_states)
        except ProviderError as e:
            logger.debug(f"Skipping candidate goal {canonical(goal)}: {str(e)}")
            continue
        cost = sum(domain.action_by_name[name].cost for name in reasoning.path)
        records.append(TaskRecord(task_id, s0, goal, difficulty, cost, reasoning.path))

    if len(records) < n:
        raise InsufficientGoals(f"Only found {len(records)} of {n} distinct reachable {difficulty.value} tasks")
    logger.info(f"Generated {n} {difficulty.value} tasks for {domain.name}")
    return records


def save_dataset(records: Sequence[TaskRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as file:
        for record in records:
            file.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")


def load_dataset(path: str) -> List[TaskRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as file:
        for line in file:
            if line.strip():
                records.append(TaskRecord.from_dict(json.loads(line)))
    return records
