"""
File: feedback_service.py
Action-space pruning from reasoning output and the reflective feedback loop:
plan in the pruned space, and on failure send the longest explored paths plus
the predicates and objects not yet considered back to the provider.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

from behavior_tree import condition_node, fallback
from domain_model import Condition, Domain, PlanningProblem, canonical
from heuristics import DEFAULT_ALPHA
from planner_service import DEFAULT_BUDGET, Outcome, PlanResult, SearchNode, run_algorithm
from provider_service import ReasoningProvider
from reasoning_parser import ReasoningResult
from templates import PROMPT_TEMPLATES

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

DEFAULT_K = 3
DEFAULT_MAX_ROUNDS = 3
EMPTY_SPACE = "empty_space"


class EmptySpace(Exception):
    pass


@dataclass(frozen=True)
class PrunedSpace:
    predicates: FrozenSet[str]
    objects: FrozenSet[str]
    actions: Tuple[str, ...]
    round: int = 0

    def merge(self, other: "PrunedSpace") -> "PrunedSpace":
        seen = set(self.actions)
        return PrunedSpace(
            predicates=self.predicates | other.predicates,
            objects=self.objects | other.objects,
            actions=self.actions + tuple(a for a in other.actions if a not in seen),
            round=max(self.round, other.round),
        )

    def sizes(self) -> Dict[str, int]:
        return {"predicates": len(self.predicates), "objects": len(self.objects), "actions": len(self.actions)}


def _space(domain: Domain, predicates: FrozenSet[str], objects: FrozenSet[str], round_index: int) -> PrunedSpace:
    actions = tuple(
        a.name for a in domain.actions if a.predicate in predicates and all(o in objects for o in a.args)
    )
    return PrunedSpace(predicates, objects, actions, round_index)


def prune_action_space(domain: Domain, result: ReasoningResult, round_index: int = 0) -> PrunedSpace:
    """Q⁻ = Q̂ ∪ Q(p̂), O⁻ = Ô ∪ O(p̂), and A⁻ their valid groundings in domain order."""
    path_actions = [domain.action_by_name[n] for n in result.path if n in domain.action_by_name]
    predicates = frozenset(result.predicates) | {a.predicate for a in path_actions}
    objects = frozenset(result.objects) | {o for a in path_actions for o in a.args}
    space = _space(domain, frozenset(predicates), frozenset(objects), round_index)
    if not space.actions:
        raise EmptySpace(f"Pruned action space is empty for predicates {sorted(predicates)}")
    return space


def merge_space(domain: Domain, space: Optional[PrunedSpace], result: ReasoningResult, round_index: int) -> PrunedSpace:
    """Adds a later round's reasoning to the cumulative space; raises EmptySpace only if the union is empty."""
    try:
        fresh = prune_action_space(domain, result, round_index)
    except EmptySpace:
        if space is None:
            raise
        return PrunedSpace(space.predicates, space.objects, space.actions, round_index)
    return fresh if space is None else space.merge(fresh)


@dataclass(frozen=True)
class SummaryPath:
    actions: Tuple[str, ...]
    frontier: Condition

    def to_dict(self) -> Dict[str, Any]:
        return {"actions": list(self.actions), "frontier": canonical(self.frontier)}


def summarize_bt(run: PlanResult, k: int = DEFAULT_K) -> List[SummaryPath]:
    """
    The k longest distinct action sequences ending at an expanded condition with
    no expanded child, in forward order. Equal lengths keep expansion order.
    """
    expanded: Sequence[SearchNode] = run.expanded
    parents = {id(n.parent) for n in expanded if n.parent is not None}
    seen = set()
    chains: List[SummaryPath] = []
    for node in expanded:
        if id(node) in parents or node.action is None:
            continue
        names = tuple(a.name for a in node.path())
        if names in seen:
            continue
        seen.add(names)
        chains.append(SummaryPath(names, node.condition))
    chains.sort(key=lambda c: -len(c.actions))
    return chains[:k]


@dataclass
class FeedbackPayload:
    top_paths: List[SummaryPath]
    missing_predicates: List[str]
    missing_objects: List[str]
    reason: str = "failure"
    max_items: Optional[int] = None

    def _listing(self, items: Sequence[str]) -> str:
        if not items:
            return "none"
        if self.max_items is None or len(items) <= self.max_items:
            return ", ".join(items)
        return ", ".join(items[: self.max_items]) + f" (+{len(items) - self.max_items} more)"

    def render(self) -> str:
        paths = "\n".join(f"{i}. {', '.join(p.actions)}" for i, p in enumerate(self.top_paths, 1)) or "none"
        return PROMPT_TEMPLATES["feedback"].format(
            reason=self.reason,
            paths=paths,
            predicates=self._listing(self.missing_predicates),
            objects=self._listing(self.missing_objects),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "reason": self.reason,
            "top_paths": [p.to_dict() for p in self.top_paths],
            "missing_predicates": self.missing_predicates,
            "missing_objects": self.missing_objects,
        }


def build_feedback(
    domain: Domain,
    space: Optional[PrunedSpace],
    run: Optional[PlanResult],
    reason: str,
    k: int = DEFAULT_K,
    max_items: Optional[int] = None,
) -> FeedbackPayload:
    predicates = space.predicates if space is not None else frozenset()
    objects = space.objects if space is not None else frozenset()
    return FeedbackPayload(
        top_paths=summarize_bt(run, k) if run is not None else [],
        missing_predicates=sorted(set(domain.action_predicates) - predicates),
        missing_objects=sorted(set(domain.object_names) - objects),
        reason=reason,
        max_items=max_items,
    )


@dataclass
class RoundLog:
    round: int
    reasoning: Dict[str, Any]
    sizes: Dict[str, int]
    outcome: str
    explored_count: int = 0
    elapsed: float = 0.0
    feedback: Optional[Dict[str, Any]] = None

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "round": self.round,
            "reasoning": self.reasoning,
            "sizes": self.sizes,
            "outcome": self.outcome,
            "explored_count": self.explored_count,
            "feedback": self.feedback,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 6)
        return data


@dataclass
class FeedbackLog:
    label: str
    rounds: List[RoundLog] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return bool(self.rounds) and self.rounds[-1].outcome == Outcome.SOLVED.value

    @property
    def solved_round(self) -> Optional[int]:
        return self.rounds[-1].round if self.solved else None

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        return {
            "label": self.label,
            "solved_round": self.solved_round,
            "rounds": [r.to_dict(include_timing) for r in self.rounds],
        }


def _empty_result(problem: PlanningProblem, algorithm: str) -> PlanResult:
    return PlanResult(
        tree=fallback(condition_node(problem.goal)),
        outcome=Outcome.EXHAUSTED,
        explored_count=0,
        elapsed=0.0,
        algorithm=algorithm,
    )


def plan_with_feedback(
    problem: PlanningProblem,
    provider: ReasoningProvider,
    algorithm: str = "hbtp-o",
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    budget: float = DEFAULT_BUDGET,
    k: int = DEFAULT_K,
    alpha: float = DEFAULT_ALPHA,
    guard: str = "standard",
    max_items: Optional[int] = None,
) -> Tuple[PlanResult, FeedbackLog]:
    """
    Round 0 queries the provider, prunes and plans. A timeout, an exhausted
    search or an empty pruned space triggers feedback while rounds remain; the
    space grows cumulatively and the latest heuristic path drives the planner.
    """
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    domain = problem.domain
    log = FeedbackLog(label=problem.label)
    space: Optional[PrunedSpace] = None
    payload: Optional[FeedbackPayload] = None
    result = _empty_result(problem, algorithm)

    for round_index in range(max_rounds + 1):
        reasoning = provider.reason(problem, payload, round_index)
        try:
            space = merge_space(domain, space, reasoning, round_index)
        except EmptySpace as e:
            logger.warning(f"{problem.label} round {round_index}: {str(e)}")
            result = _empty_result(problem, algorithm)
            outcome = EMPTY_SPACE
        else:
            result = run_algorithm(
                algorithm,
                problem.with_actions(space.actions),
                reasoning.path,
                alpha=alpha,
                budget=budget,
                guard=guard,
                record_trace=False,
            )
            outcome = result.outcome.value
        result.feedback_rounds = round_index

        entry = RoundLog(
            round=round_index,
            reasoning=reasoning.to_dict(),
            sizes=space.sizes() if space is not None else {"predicates": 0, "objects": 0, "actions": 0},
            outcome=outcome,
            explored_count=result.explored_count,
            elapsed=result.elapsed,
        )
        log.rounds.append(entry)
        logger.info(f"{problem.label} round {round_index}: {outcome} with {entry.sizes['actions']} actions")
        if result.solved or round_index == max_rounds:
            break

        payload = build_feedback(domain, space, result if outcome != EMPTY_SPACE else None, outcome, k, max_items)
        entry.feedback = payload.to_dict()

    return result, log
