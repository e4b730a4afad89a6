"""
File: simulator.py
Executes a behavior tree against a symbolic state: tick, apply the emitted
action, optionally disturb the state, repeat until the tree succeeds or fails.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from behavior_tree import BTNode, Status, tick, tree_actions
from domain_model import Condition, State, apply_action, canonical, is_applicable, make_condition

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class StepCapExceeded(Exception):
    def __init__(self, message: str, actions: Sequence[str] = (), state: State = frozenset()):
        self.actions = list(actions)
        self.state = state
        super().__init__(message)


@dataclass(frozen=True)
class Perturbation:
    """Literals added and removed right after the action of step `after_step` is applied."""
    after_step: int
    add: Condition = frozenset()
    delete: Condition = frozenset()


@dataclass
class ExecutionTrace:
    status: Status
    steps: int
    actions: List[str] = field(default_factory=list)
    final_state: State = frozenset()
    error: Optional[str] = None

    @property
    def succeeded(self) -> bool:
        return self.status == Status.SUCCESS

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "steps": self.steps,
            "actions": self.actions,
            "final_state": canonical(self.final_state),
            "error": self.error,
        }


def step_cap(tree: BTNode) -> int:
    """Ten ticks per planned sequence; equals 10 x root children for planner-shaped trees."""
    return 10 * (len(tree_actions(tree)) + 1)


def run_tree(tree: BTNode, s0: State, perturbations: Sequence[Perturbation] = (), cap: Optional[int] = None) -> ExecutionTrace:
    """Like simulate_execution but raises StepCapExceeded instead of reporting it."""
    limit = step_cap(tree) if cap is None else cap
    pending = {p.after_step: p for p in perturbations}
    state = make_condition(s0)
    actions: List[str] = []

    while True:
        result = tick(tree, state)
        if result.status != Status.RUNNING:
            return ExecutionTrace(result.status, len(actions), actions, state)
        if len(actions) >= limit:
            raise StepCapExceeded(
                f"No terminal status after {limit} steps; last actions {actions[-3:]}", actions, state
            )
        action = result.emitted_action
        if not is_applicable(state, action):
            logger.warning(f"{action.name} ticked with unmet preconditions {canonical(action.pre - state)}")
        state = apply_action(state, action)
        actions.append(action.name)
        disturbance = pending.get(len(actions))
        if disturbance is not None:
            state = (state - disturbance.delete) | disturbance.add
            logger.debug(f"Perturbed state after step {len(actions)}")


def simulate_execution(
    tree: BTNode,
    s0: State,
    perturbations: Sequence[Perturbation] = (),
    cap: Optional[int] = None,
) -> ExecutionTrace:
    try:
        return run_tree(tree, s0, perturbations, cap)
    except StepCapExceeded as e:
        logger.warning(f"Execution stopped: {str(e)}")
        return ExecutionTrace(Status.FAILURE, len(e.actions), e.actions, e.state, error=str(e))
