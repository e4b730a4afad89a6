"""
File: reasoning_parser.py
Builds the reasoning prompt for a task and parses a provider's answer back
into relevant action predicates, relevant objects and a heuristic path.
"""

import logging
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from domain_model import Condition, Domain, GroundedAction, State, action_name, split_action_name
from templates import DEFAULT_DEMOS, PROMPT_TEMPLATES, Demonstration

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

TEMPLATE_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "prompt_template.txt")

SECTION_LABELS = {
    "Heuristic Path": ("heuristic path", "optimal actions"),
    "Relevant Action Predicates": ("relevant action predicates",),
    "Relevant Objects": ("relevant objects",),
}


class ProviderError(Exception):
    """Base class for failures while producing reasoning for a task."""


class MissingSection(ProviderError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"Reasoning output has no '{name}:' section")


@dataclass(frozen=True)
class ReasoningResult:
    predicates: FrozenSet[str] = frozenset()
    objects: FrozenSet[str] = frozenset()
    path: Tuple[str, ...] = ()
    raw_text: str = ""

    @classmethod
    def from_actions(cls, actions: Sequence[GroundedAction], raw_text: Optional[str] = None) -> "ReasoningResult":
        result = cls(
            predicates=frozenset(a.predicate for a in actions),
            objects=frozenset(o for a in actions for o in a.args),
            path=tuple(a.name for a in actions),
        )
        text = raw_text if raw_text is not None else render_answer(result)
        return cls(result.predicates, result.objects, result.path, text)

    @property
    def is_empty(self) -> bool:
        return not (self.predicates or self.objects or self.path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "predicates": sorted(self.predicates),
            "objects": sorted(self.objects),
            "path": list(self.path),
            "raw_text": self.raw_text,
        }


def render_answer(result: ReasoningResult) -> str:
    """The answer format the prompt asks for."""
    return (
        f"Heuristic Path: {', '.join(result.path)}\n"
        f"Relevant Action Predicates: {', '.join(sorted(result.predicates))}\n"
        f"Relevant Objects: {', '.join(sorted(result.objects))}\n"
    )


def _get_default_template() -> str:
    return (
        "[Condition Predicates]\n{condition_predicates}\n\n"
        "[Action Predicates]\n{action_predicates}\n\n"
        "[Objects]\n{objects}\n\n"
        "[Few-shot Demonstrations]\n{demonstrations}\n"
        "[System]\n{system}\n\n"
        "{extra_sections}[Task]\nInitial State: {initial_state}\nGoals: {goals}\n"
    )


@lru_cache(maxsize=1)
def load_prompt_template() -> str:
    try:
        with open(TEMPLATE_PATH, "r", encoding="utf-8") as file:
            template = file.read()
        logger.info("Successfully loaded prompt template")
        return template
    except Exception as e:
        logger.error(f"Error loading prompt template: {str(e)}")
        return _get_default_template()


def _signature(categories: Iterable[str]) -> str:
    return ", ".join(f"<{c}>" for c in categories)


def _objects_block(domain: Domain) -> str:
    lines = []
    used = []
    for cat, members in sorted(domain.categories.items()):
        if cat == "ALL" or not members:
            continue
        used.append(f"<{cat}>")
        lines.append(f"<{cat}> = [{', '.join(repr(m) for m in sorted(members))}]")
    lines.append(f"<ALL> = {' + '.join(used)}" if used else "<ALL> = []")
    return "\n".join(lines)


def _demo_block(demo: Demonstration) -> str:
    return PROMPT_TEMPLATES["demonstration"].format(
        goals=demo.goals,
        path=", ".join(demo.path),
        predicates=", ".join(demo.predicates),
        objects=", ".join(demo.objects),
    )


def build_prompt(
    domain: Domain,
    s0: State,
    goal: Condition,
    demos: Sequence[Demonstration] = DEFAULT_DEMOS,
    blacklist: Sequence[str] = (),
    feedback: Optional[str] = None,
) -> str:
    """Deterministic prompt document; the blacklist section appears only when non-empty."""
    condition_predicates = ", ".join(
        f"{name}({_signature(domain.predicates[name])})" for name in domain.condition_predicates
    )
    action_predicates = ", ".join(
        f"{schema.predicate}({_signature(c for _, c in schema.params)}) ({schema.cost:g})"
        for schema in sorted(domain.schemas, key=lambda s: s.predicate)
    )
    extra = ""
    if blacklist:
        items = "\n".join(f"- {item}" for item in blacklist)
        extra += PROMPT_TEMPLATES["blacklist"].format(items=items)
    if feedback:
        extra += feedback

    return load_prompt_template().format(
        condition_predicates=condition_predicates,
        action_predicates=action_predicates,
        objects=_objects_block(domain),
        demonstrations="\n".join(_demo_block(d) for d in demos),
        system=PROMPT_TEMPLATES["system"],
        extra_sections=extra,
        initial_state=", ".join(l.name for l in sorted(s0)),
        goals=" & ".join(l.name for l in sorted(goal)),
    )


def _section(text: str, label: str) -> Optional[str]:
    aliases = "|".join(re.escape(a) for a in SECTION_LABELS[label])
    matches = re.findall(rf"(?im)(?:{aliases})[*_`]*\s*:[ \t]*([^\n]*)", text)
    return matches[-1] if matches else None


def _items(body: str) -> List[str]:
    # commas inside parentheses belong to one action, e.g. Put(apple, table)
    parts = re.split(r",(?![^(]*\))", body)
    cleaned = [p.strip().strip("'\"`*[]. ") for p in parts]
    return [c for c in cleaned if c]


def _resolve(symbol: str, names: Sequence[str]) -> Optional[str]:
    if symbol in names:
        return symbol
    folded = [n for n in names if n.lower() == symbol.lower()]
    return folded[0] if len(folded) == 1 else None


def normalize_action(item: str, domain: Domain) -> str:
    """Walk(apple), walk_Apple and Walk_apple all become Walk_apple when the symbols resolve."""
    m = re.fullmatch(r"(\w+?)\s*\(([^)]*)\)", item)
    if m:
        predicate, args = m.group(1), [a.strip() for a in m.group(2).split(",") if a.strip()]
    else:
        predicate, args = split_action_name(item)
    resolved_pred = _resolve(predicate, domain.action_predicates)
    resolved_args = [_resolve(a, domain.object_names) for a in args]
    if resolved_pred is not None and all(a is not None for a in resolved_args):
        return action_name(resolved_pred, resolved_args)
    return action_name(predicate, args) if m else item


def parse_reasoning(text: str, domain: Domain) -> ReasoningResult:
    bodies = {}
    for label in SECTION_LABELS:
        body = _section(text, label)
        if body is None:
            raise MissingSection(label)
        bodies[label] = body

    path = tuple(normalize_action(item, domain) for item in _items(bodies["Heuristic Path"]))
    predicates = frozenset(
        _resolve(p, domain.action_predicates) or p for p in _items(bodies["Relevant Action Predicates"])
    )
    objects = frozenset(_resolve(o, domain.object_names) or o for o in _items(bodies["Relevant Objects"]))
    return ReasoningResult(predicates=predicates, objects=objects, path=path, raw_text=text)
