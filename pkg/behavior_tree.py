"""
File: behavior_tree.py
Behavior-tree nodes, the combinators the planners build trees with, reactive
tick execution, JSON serialization and an indented text renderer.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from domain_model import Condition, DomainError, GroundedAction, State, canonical, holds, make_action, make_condition
from domain_parser import parse_literal

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class NodeKind(str, Enum):
    FALLBACK = "fallback"
    SEQUENCE = "sequence"
    CONDITION = "condition"
    ACTION = "action"


class Status(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    RUNNING = "running"


class BTParseError(Exception):
    def __init__(self, message: str, position: str):
        self.position = position
        super().__init__(f"{message} at {position}")


@dataclass(frozen=True)
class BTNode:
    kind: NodeKind
    children: Tuple["BTNode", ...] = ()
    condition: Optional[Condition] = None
    action: Optional[GroundedAction] = None

    @property
    def is_leaf(self) -> bool:
        return self.kind in (NodeKind.CONDITION, NodeKind.ACTION)


@dataclass(frozen=True)
class TickResult:
    status: Status
    emitted_action: Optional[GroundedAction] = None

    def __post_init__(self):
        if (self.status == Status.RUNNING) != (self.emitted_action is not None):
            raise ValueError("emitted_action is set exactly when status is running")


SUCCESS = TickResult(Status.SUCCESS)
FAILURE = TickResult(Status.FAILURE)


def condition_node(c: Condition) -> BTNode:
    return BTNode(kind=NodeKind.CONDITION, condition=make_condition(c))


def action_node(a: GroundedAction) -> BTNode:
    return BTNode(kind=NodeKind.ACTION, action=a)


def fallback(*children: BTNode, flatten: bool = True) -> BTNode:
    """Fallback over children in order. Nested fallbacks are spliced in unless flatten is off."""
    if not children:
        raise ValueError("fallback needs at least one child")
    flat: List[BTNode] = []
    for child in children:
        if flatten and child.kind == NodeKind.FALLBACK:
            flat.extend(child.children)
        else:
            flat.append(child)
    return BTNode(kind=NodeKind.FALLBACK, children=tuple(flat))


def sequence(*children: BTNode) -> BTNode:
    if not children:
        raise ValueError("sequence needs at least one child")
    return BTNode(kind=NodeKind.SEQUENCE, children=tuple(children))


def tick(node: BTNode, s: State) -> TickResult:
    if node.kind == NodeKind.CONDITION:
        return SUCCESS if holds(node.condition, s) else FAILURE
    if node.kind == NodeKind.ACTION:
        return TickResult(Status.RUNNING, node.action)
    if node.kind == NodeKind.FALLBACK:
        for child in node.children:
            result = tick(child, s)
            if result.status != Status.FAILURE:
                return result
        return FAILURE
    for child in node.children:
        result = tick(child, s)
        if result.status != Status.SUCCESS:
            return result
    return SUCCESS


def dnf_goal_tree(goals: Sequence[Condition], plan: Callable[[Condition], BTNode]) -> BTNode:
    """Plans every disjunct independently and joins the sub-trees under one fallback."""
    if not goals:
        raise ValueError("dnf_goal_tree needs at least one disjunct")
    return fallback(*(plan(g) for g in goals), flatten=False)


def iter_nodes(node: BTNode) -> Iterator[BTNode]:
    yield node
    for child in node.children:
        yield from iter_nodes(child)


def tree_actions(node: BTNode) -> List[GroundedAction]:
    return [n.action for n in iter_nodes(node) if n.kind == NodeKind.ACTION]


def tree_cost(node: BTNode) -> float:
    """Sum over every action leaf."""
    return sum(a.cost for a in tree_actions(node))


def embedded_pairs(node: BTNode) -> List[Tuple[Condition, GroundedAction]]:
    """(condition, action) pairs of a planner-shaped tree in child order."""
    pairs = []
    for child in node.children:
        if child.kind == NodeKind.SEQUENCE and len(child.children) == 2:
            cond, act = child.children
            if cond.kind == NodeKind.CONDITION and act.kind == NodeKind.ACTION:
                pairs.append((cond.condition, act.action))
    return pairs


def _to_dict(node: BTNode) -> Dict[str, Any]:
    if node.kind == NodeKind.CONDITION:
        return {"kind": node.kind.value, "literals": canonical(node.condition)}
    if node.kind == NodeKind.ACTION:
        a = node.action
        return {
            "kind": node.kind.value,
            "name": a.name,
            "cost": a.cost,
            "pre": canonical(a.pre),
            "add": canonical(a.add),
            "del": canonical(a.delete),
        }
    return {"kind": node.kind.value, "children": [_to_dict(c) for c in node.children]}


def serialize(tree: BTNode) -> str:
    return json.dumps(_to_dict(tree), sort_keys=True, indent=2) + "\n"


def _literals(items: Any, where: str) -> Condition:
    if not isinstance(items, list):
        raise BTParseError("expected a list of literals", where)
    try:
        return make_condition(parse_literal(text) for text in items)
    except (DomainError, AttributeError) as e:
        raise BTParseError(f"bad literal ({e})", where) from e


def _from_dict(data: Any, where: str) -> BTNode:
    if not isinstance(data, dict) or "kind" not in data:
        raise BTParseError("expected a node object with a kind", where)
    try:
        kind = NodeKind(data["kind"])
    except ValueError as e:
        raise BTParseError(f"unknown node kind {data['kind']!r}", where) from e

    if kind == NodeKind.CONDITION:
        return condition_node(_literals(data.get("literals"), f"{where}.literals"))
    if kind == NodeKind.ACTION:
        try:
            a = make_action(
                data["name"],
                pre=_literals(data.get("pre", []), f"{where}.pre"),
                add=_literals(data.get("add", []), f"{where}.add"),
                delete=_literals(data.get("del", []), f"{where}.del"),
                cost=float(data["cost"]),
            )
        except (KeyError, TypeError, ValueError, DomainError) as e:
            raise BTParseError(f"bad action payload ({e})", where) from e
        return action_node(a)

    children = data.get("children")
    if not isinstance(children, list) or not children:
        raise BTParseError("composite node needs a non-empty children list", where)
    nodes = tuple(_from_dict(c, f"{where}.children[{i}]") for i, c in enumerate(children))
    return BTNode(kind=kind, children=nodes)


def deserialize(text: str) -> BTNode:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        logger.error(f"Error reading behavior tree: {str(e)}")
        raise BTParseError(f"malformed JSON: {e.msg}", f"line {e.lineno} col {e.colno}") from e
    return _from_dict(data, "$")


def render(node: BTNode, indent: int = 0) -> str:
    pad = "  " * indent
    if node.kind == NodeKind.CONDITION:
        body = ", ".join(canonical(node.condition)) or "<true>"
        return f"{pad}? {body}\n"
    if node.kind == NodeKind.ACTION:
        return f"{pad}! {node.action.name}\n"
    label = "Fallback" if node.kind == NodeKind.FALLBACK else "Sequence"
    return f"{pad}{label}\n" + "".join(render(c, indent + 1) for c in node.children)
