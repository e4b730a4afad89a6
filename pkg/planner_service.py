"""
File: planner_service.py
Backward behavior-tree expansion planners: BT Expansion (FIFO), OBTEA
(cost-ordered) and HBTP with the optimal-alpha or satisficing heuristic.
All three share one expansion loop and differ in queue order and action cost.
"""

import heapq
import itertools
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from behavior_tree import BTNode, action_node, condition_node, dnf_goal_tree, fallback, sequence, tree_cost
from domain_model import GUARDS, Condition, GroundedAction, Literal, PlanningProblem, canonical
from heuristics import DEFAULT_ALPHA, HeuristicPath, InvalidAlpha, indicator_of

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 5.0
ALGORITHM_NAMES = ("btexp", "obtea", "hbtp-o", "hbtp-s")


class Outcome(str, Enum):
    SOLVED = "solved"
    TIMEOUT = "timeout"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class OptimalAlpha:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.alpha < 1:
            raise InvalidAlpha(f"alpha must be >= 1, got {self.alpha}")


@dataclass(frozen=True)
class Satisficing:
    pass


PlannerMode = Union[OptimalAlpha, Satisficing]


@dataclass
class SearchNode:
    condition: Condition
    ids: FrozenSet[int]
    h: float
    cost: float
    indicator: Dict[str, int]
    parent: Optional["SearchNode"] = None
    action: Optional[GroundedAction] = None
    depth: int = 0

    def path(self) -> List[GroundedAction]:
        """Actions from this condition forward to the goal."""
        actions, node = [], self
        while node is not None and node.action is not None:
            actions.append(node.action)
            node = node.parent
        return actions


@dataclass
class PlanResult:
    tree: BTNode
    outcome: Outcome
    explored_count: int
    elapsed: float
    algorithm: str = "hbtp"
    total_cost: Optional[float] = None
    generated_count: int = 0
    pruned_count: int = 0
    solution: Optional[SearchNode] = None
    expanded: List[SearchNode] = field(default_factory=list)
    trace: List[Dict[str, Any]] = field(default_factory=list)
    feedback_rounds: int = 0

    @property
    def solved(self) -> bool:
        return self.outcome == Outcome.SOLVED

    def executed_path(self) -> List[GroundedAction]:
        return self.solution.path() if self.solution is not None else []

    def to_record(self, include_timing: bool = True, include_trace: bool = True) -> Dict[str, Any]:
        record = {
            "algorithm": self.algorithm,
            "outcome": self.outcome.value,
            "explored_count": self.explored_count,
            "generated_count": self.generated_count,
            "pruned_count": self.pruned_count,
            "total_cost": self.total_cost,
            "tree_cost": tree_cost(self.tree),
            "feedback_rounds": self.feedback_rounds,
            "path": [a.name for a in self.executed_path()],
        }
        if include_timing:
            record["elapsed"] = round(self.elapsed, 6)
        if include_trace:
            record["trace"] = self.trace
        return record


class _Encoder:
    """Maps literals to interned ids; literals no action mentions get run-local ids."""

    def __init__(self, table: Sequence[Literal], ids: Dict[Literal, int]):
        self.table = list(table)
        self.ids = ids
        self.extra: Dict[Literal, int] = {}

    def encode(self, c: Iterable[Literal]) -> FrozenSet[int]:
        out = []
        for l in c:
            i = self.ids.get(l)
            if i is None:
                i = self.extra.get(l)
                if i is None:
                    i = len(self.table)
                    self.table.append(l)
                    self.extra[l] = i
            out.append(i)
        return frozenset(out)

    def decode(self, ids: Iterable[int]) -> Condition:
        return frozenset(self.table[i] for i in ids)


class _ExpandedIndex:
    """
    Answers: is c a superset of some expanded condition? Each expanded condition
    is filed once, under whichever of its literals has the fewest entries so far,
    so a lookup only subset-tests conditions filed under literals of c.
    """

    def __init__(self):
        self.by_literal: Dict[int, List[FrozenSet[int]]] = {}
        self.exact: set = set()
        self.has_empty = False

    def __len__(self) -> int:
        return len(self.exact)

    def add(self, ids: FrozenSet[int]) -> None:
        if ids in self.exact:
            return
        self.exact.add(ids)
        if not ids:
            self.has_empty = True
            return
        key = min(ids, key=lambda l: (len(self.by_literal.get(l, ())), l))
        self.by_literal.setdefault(key, []).append(ids)

    def covers(self, ids: FrozenSet[int]) -> bool:
        if self.has_empty or ids in self.exact:
            return True
        by_literal = self.by_literal
        for l in ids:
            for expanded in by_literal.get(l, ()):
                if expanded <= ids:
                    return True
        return False


def _search(
    problem: PlanningProblem,
    p_hat: HeuristicPath,
    credit_cost: Callable[[float], float],
    order: str,
    guard: str,
    budget: float,
    algorithm: str,
    record_trace: bool = True,
) -> PlanResult:
    if guard not in GUARDS:
        raise ValueError(f"Unknown guard {guard}")
    start = time.monotonic()
    deadline = start + budget
    domain = problem.domain
    compiled = domain.compiled
    adders = domain.adders
    requirers = domain.requirers
    encoder = _Encoder(domain.literal_table, domain.literal_ids)
    s0_ids = encoder.encode(problem.s0)

    unknown = [name for name in p_hat if name not in domain.action_by_name]
    if unknown:
        logger.warning(f"Heuristic path names {len(unknown)} actions outside the action space: {unknown[:5]}")

    root = SearchNode(
        condition=problem.goal,
        ids=encoder.encode(problem.goal),
        h=0.0,
        cost=0.0,
        indicator=dict(indicator_of(p_hat)),
    )
    counter = itertools.count()
    best_h: Dict[FrozenSet[int], float] = {root.ids: 0.0}
    frontier: Dict[FrozenSet[int], Tuple[int, SearchNode]] = {}
    heap: List[Tuple] = []

    def push(node: SearchNode) -> None:
        seq = next(counter)
        frontier[node.ids] = (seq, node)
        key = (seq,) if order == "fifo" else (node.h, len(node.ids), seq)
        heapq.heappush(heap, key + (node.ids,))

    push(root)
    expanded: List[SearchNode] = []
    index = _ExpandedIndex()
    sequences: List[BTNode] = []
    trace: List[Dict[str, Any]] = []
    generated = 1
    pruned = 0

    def finish(outcome: Outcome, solution: Optional[SearchNode] = None) -> PlanResult:
        tree = fallback(condition_node(problem.goal), *sequences)
        result = PlanResult(
            tree=tree,
            outcome=outcome,
            explored_count=len(expanded),
            elapsed=time.monotonic() - start,
            algorithm=algorithm,
            total_cost=solution.cost if solution is not None else None,
            generated_count=generated,
            pruned_count=pruned,
            solution=solution,
            expanded=expanded,
            trace=trace,
        )
        logger.debug(
            f"{algorithm}: {outcome.value} explored={result.explored_count} "
            f"cost={result.total_cost} in {result.elapsed:.4f}s"
        )
        return result

    while heap:
        if time.monotonic() > deadline:
            return finish(Outcome.TIMEOUT)
        entry = heapq.heappop(heap)
        ids = entry[-1]
        current = frontier.get(ids)
        # stale entry: the condition was re-pushed with a lower h
        if current is None or current[0] != entry[-2]:
            continue
        del frontier[ids]
        node = current[1]

        # only actions touching c can pass the guard
        candidates = set()
        for l in node.ids:
            candidates.update(adders.get(l, ()))
            if guard == "compat":
                candidates.update(requirers.get(l, ()))

        for i in sorted(candidates):
            ca = compiled[i]
            if ca.delete & node.ids:
                continue
            if guard == "standard" and not (ca.add & node.ids):
                continue
            c_a = ca.pre | (node.ids - ca.add)
            name = ca.action.name
            credited = node.indicator.get(name, 0) > 0
            h_a = credit_cost(ca.action.cost) if credited else ca.action.cost
            new_h = node.h + h_a
            if order == "fifo" and c_a in best_h:
                continue
            if new_h >= best_h.get(c_a, float("inf")):
                continue
            # anything satisfying c_a already satisfies an expanded condition
            if index.covers(c_a):
                pruned += 1
                continue
            best_h[c_a] = new_h
            # copy-on-write: siblings keep sharing the parent's credits
            indicator = node.indicator
            if credited:
                indicator = dict(indicator)
                indicator[name] -= 1
                if indicator[name] == 0:
                    del indicator[name]
            push(
                SearchNode(
                    condition=encoder.decode(c_a),
                    ids=c_a,
                    h=new_h,
                    cost=node.cost + ca.action.cost,
                    indicator=indicator,
                    parent=node,
                    action=ca.action,
                    depth=node.depth + 1,
                )
            )
            generated += 1

        # c joins the expanded set only after its own children are generated
        expanded.append(node)
        index.add(node.ids)
        if node.action is not None:
            sequences.append(sequence(condition_node(node.condition), action_node(node.action)))
        if record_trace:
            trace.append(
                {
                    "condition": canonical(node.condition),
                    "action": node.action.name if node.action else None,
                    "h": node.h,
                }
            )
        if node.ids <= s0_ids:
            return finish(Outcome.SOLVED, node)

    return finish(Outcome.EXHAUSTED)


def hbtp(
    problem: PlanningProblem,
    p_hat: HeuristicPath,
    mode: PlannerMode = OptimalAlpha(),
    budget: float = DEFAULT_BUDGET,
    guard: str = "standard",
    record_trace: bool = True,
) -> PlanResult:
    """
    Heuristic BT planning. An action still credited by the heuristic path costs
    D(a)/alpha (optimal mode) or 0 (satisficing mode); everything else costs D(a).
    """
    if isinstance(mode, Satisficing):
        return _search(problem, p_hat, lambda cost: 0.0, "cost", guard, budget, "hbtp-s", record_trace)
    alpha = mode.alpha
    return _search(problem, p_hat, lambda cost: cost / alpha, "cost", guard, budget, "hbtp-o", record_trace)


def obtea(
    problem: PlanningProblem,
    budget: float = DEFAULT_BUDGET,
    guard: str = "standard",
    record_trace: bool = True,
) -> PlanResult:
    return _search(problem, (), lambda cost: cost, "cost", guard, budget, "obtea", record_trace)


def bt_expansion(
    problem: PlanningProblem,
    budget: float = DEFAULT_BUDGET,
    guard: str = "standard",
    record_trace: bool = True,
) -> PlanResult:
    return _search(problem, (), lambda cost: cost, "fifo", guard, budget, "btexp", record_trace)


def run_algorithm(
    name: str,
    problem: PlanningProblem,
    p_hat: HeuristicPath = (),
    alpha: float = DEFAULT_ALPHA,
    budget: float = DEFAULT_BUDGET,
    guard: str = "standard",
    record_trace: bool = True,
) -> PlanResult:
    if name == "btexp":
        return bt_expansion(problem, budget, guard, record_trace)
    if name == "obtea":
        return obtea(problem, budget, guard, record_trace)
    if name == "hbtp-o":
        return hbtp(problem, p_hat, OptimalAlpha(alpha), budget, guard, record_trace)
    if name == "hbtp-s":
        return hbtp(problem, p_hat, Satisficing(), budget, guard, record_trace)
    raise ValueError(f"Unknown algorithm {name}; expected one of {', '.join(ALGORITHM_NAMES)}")


def plan_dnf(
    problem: PlanningProblem,
    goals: Sequence[Condition],
    plan: Callable[[PlanningProblem], PlanResult],
) -> Tuple[BTNode, List[PlanResult]]:
    """Plans each disjunct of a DNF goal and joins the trees with a fallback."""
    results: List[PlanResult] = []

    def plan_one(goal: Condition) -> BTNode:
        result = plan(PlanningProblem(problem.domain, problem.s0, goal, problem.label))
        results.append(result)
        return result.tree

    return dnf_goal_tree(goals, plan_one), results
