"""
File: grammar_checker.py
Validates parsed reasoning against a domain: unknown predicates and objects,
category-invalid groundings, and path actions outside the valid action set.
Violations are returned as data; the provider turns them into a blacklist.
"""

import difflib
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from domain_model import Domain, split_action_name
from reasoning_parser import ReasoningResult

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    kind: str
    item: str
    message: str
    suggestion: Optional[str] = None

    def __str__(self) -> str:
        hint = f" (did you mean {self.suggestion}?)" if self.suggestion else ""
        return f"{self.message}{hint}"


def closest_name(symbol: str, names: Sequence[str]) -> Optional[str]:
    """Closest valid name by string similarity, compared case-insensitively."""
    if not names:
        return None
    lowered = {n.lower(): n for n in names}
    match = difflib.get_close_matches(symbol.lower(), list(lowered), n=1, cutoff=0.0)
    return lowered[match[0]] if match else None


def _check_action(name: str, domain: Domain) -> Optional[Violation]:
    if name in domain.action_by_name:
        return None
    predicate, args = split_action_name(name)
    schemas = {s.predicate: s for s in domain.schemas}
    if predicate not in schemas:
        return Violation(
            "unknown_predicate",
            name,
            f"{name}: unknown action predicate {predicate}",
            closest_name(predicate, domain.action_predicates),
        )
    for arg in args:
        if arg not in domain.objects:
            return Violation(
                "unknown_object", name, f"{name}: unknown object {arg}", closest_name(arg, domain.object_names)
            )
    schema = schemas[predicate]
    if len(args) != len(schema.params):
        return Violation("arity", name, f"{name}: {predicate} takes {len(schema.params)} objects, got {len(args)}")
    categories = domain.categories
    for arg, (_, cat) in zip(args, schema.params):
        if arg not in categories.get(cat, ()):
            return Violation("category", name, f"{name}: {arg} is not {cat}")
    return Violation("invalid_action", name, f"{name} is not in the valid action set")


def grammar_check(result: ReasoningResult, domain: Domain) -> List[Violation]:
    """Empty list means the result only names valid symbols and valid grounded actions."""
    violations: List[Violation] = []
    predicates = domain.action_predicates
    objects = domain.object_names

    for p in sorted(result.predicates):
        if p not in predicates:
            violations.append(
                Violation("unknown_predicate", p, f"unknown action predicate {p}", closest_name(p, predicates))
            )
    for o in sorted(result.objects):
        if o not in domain.objects:
            violations.append(Violation("unknown_object", o, f"unknown object {o}", closest_name(o, objects)))
    for name in result.path:
        violation = _check_action(name, domain)
        if violation is not None:
            violations.append(violation)

    if violations:
        logger.warning(f"Grammar check found {len(violations)} violations")
    return violations
