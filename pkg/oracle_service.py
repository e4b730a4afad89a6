"""
File: oracle_service.py
Exact heuristics for desk-scale domains.
Uniform-cost forward search over the grounded state graph gives the optimal
path p* (equal-cost paths resolved by lexicographic order of action names), and
a bounded depth-first enumerator lists the simple s0 -> g paths used by the
property checks.
"""

import heapq
import logging
import time
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from domain_model import GroundedAction, PlanningProblem, canonical
from planner_service import DEFAULT_BUDGET, Outcome, _Encoder, obtea
from reasoning_parser import ProviderError, ReasoningResult

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_MAX_STATES = 200_000


class Unreachable(ProviderError):
    pass


class BudgetExceeded(ProviderError):
    pass


@dataclass(frozen=True)
class OraclePath:
    actions: Tuple[GroundedAction, ...]
    cost: float
    states_expanded: int

    @property
    def names(self) -> List[str]:
        return [a.name for a in self.actions]

    @property
    def predicates(self) -> List[str]:
        return sorted({a.predicate for a in self.actions})

    @property
    def objects(self) -> List[str]:
        return sorted({o for a in self.actions for o in a.args})


def optimal_path(
    problem: PlanningProblem,
    max_states: int = DEFAULT_MAX_STATES,
    budget: Optional[float] = None,
) -> OraclePath:
    """Minimum-cost action sequence from s0 to the goal; ties go to the lexicographically smallest."""
    domain = problem.domain
    compiled = domain.compiled
    requirers = domain.requirers
    unconditional = [i for i, ca in enumerate(compiled) if not ca.pre]
    encoder = _Encoder(domain.literal_table, domain.literal_ids)
    start_state = encoder.encode(problem.s0)
    goal = encoder.encode(problem.goal)
    deadline = time.monotonic() + budget if budget is not None else None

    best: Dict[FrozenSet[int], Tuple[float, Tuple[str, ...]]] = {start_state: (0.0, ())}
    heap: List[Tuple[float, Tuple[str, ...], FrozenSet[int], Tuple[int, ...]]] = [(0.0, (), start_state, ())]
    closed = set()

    while heap:
        cost, names, state, steps = heapq.heappop(heap)
        if state in closed:
            continue
        if best[state] != (cost, names):
            continue
        closed.add(state)
        if goal <= state:
            actions = tuple(compiled[i].action for i in steps)
            logger.debug(f"Oracle found cost {cost} path {names} after {len(closed)} states")
            return OraclePath(actions=actions, cost=cost, states_expanded=len(closed))
        if len(closed) > max_states or (deadline is not None and time.monotonic() > deadline):
            raise BudgetExceeded(f"Oracle search exceeded {max_states} states or its time budget")
        candidates = set(unconditional)
        for l in state:
            candidates.update(requirers.get(l, ()))
        for i in candidates:
            ca = compiled[i]
            if not ca.pre <= state:
                continue
            nxt = (state | ca.add) - ca.delete
            if nxt in closed:
                continue
            key = (cost + ca.action.cost, names + (ca.action.name,))
            if nxt not in best or key < best[nxt]:
                best[nxt] = key
                heapq.heappush(heap, (key[0], key[1], nxt, steps + (i,)))

    raise Unreachable(f"Goal {canonical(problem.goal)} is unreachable from s0")


def reachable_state_count(problem: PlanningProblem, limit: int = 10_000) -> int:
    """Size of the forward-reachable state graph, capped at limit + 1."""
    domain = problem.domain
    encoder = _Encoder(domain.literal_table, domain.literal_ids)
    start = encoder.encode(problem.s0)
    seen = {start}
    stack = [start]
    while stack and len(seen) <= limit:
        state = stack.pop()
        for ca in domain.compiled:
            if ca.pre <= state:
                nxt = (state | ca.add) - ca.delete
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return len(seen)


def enumerate_paths(
    problem: PlanningProblem,
    max_depth: int = 8,
    max_paths: int = 50_000,
) -> Iterator[List[GroundedAction]]:
    """Simple paths (no repeated state) from s0 that end on first reaching the goal."""
    domain = problem.domain
    encoder = _Encoder(domain.literal_table, domain.literal_ids)
    goal = encoder.encode(problem.goal)
    start = encoder.encode(problem.s0)
    emitted = 0

    def walk(state: FrozenSet[int], visited: set, path: List[GroundedAction]) -> Iterator[List[GroundedAction]]:
        nonlocal emitted
        if emitted >= max_paths:
            return
        if goal <= state:
            emitted += 1
            yield list(path)
            return
        if len(path) >= max_depth:
            return
        for ca in domain.compiled:
            if not ca.pre <= state:
                continue
            nxt = (state | ca.add) - ca.delete
            if nxt in visited:
                continue
            visited.add(nxt)
            path.append(ca.action)
            yield from walk(nxt, visited, path)
            path.pop()
            visited.discard(nxt)

    yield from walk(start, {start}, [])


def oracle_heuristic(
    problem: PlanningProblem,
    max_states: int = DEFAULT_MAX_STATES,
    fallback_budget: Optional[float] = DEFAULT_BUDGET * 6,
) -> ReasoningResult:
    """
    Reasoning output built from the optimal path. When forward search runs out
    of states (large generated domains) the path comes from a cost-ordered
    backward expansion instead, which is optimal too but breaks ties its own way.
    """
    try:
        path = optimal_path(problem, max_states=max_states)
        return ReasoningResult.from_actions(path.actions)
    except BudgetExceeded:
        if fallback_budget is None:
            raise
        logger.info(f"Forward oracle gave up on {problem.label}; falling back to backward expansion")
    result = obtea(problem, budget=fallback_budget, record_trace=False)
    if result.solved:
        return ReasoningResult.from_actions(result.executed_path())
    if result.outcome == Outcome.EXHAUSTED:
        raise Unreachable(f"Goal {canonical(problem.goal)} is unreachable from s0")
    raise BudgetExceeded(f"Oracle could not solve {problem.label} within {fallback_budget}s")
