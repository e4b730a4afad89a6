"""
File: domain_model.py
Predicate-logic domain representation for behavior-tree planning.
Holds literals, conditions, action schemas and their groundings, the STRIPS
state transition and the goal regression every planner runs on.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

ALL_CATEGORY = "ALL"
GUARDS = ("standard", "compat")
# joins predicate and objects in action and literal names
NAME_SEPARATOR = "_"


class DomainError(Exception):
    """Invalid domain or task definition. Carries the source position when known."""

    def __init__(self, message: str, line: Optional[int] = None, col: Optional[int] = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(f"{message}{where}")


class PreconditionViolated(Exception):
    """An action was applied in a state that does not satisfy its precondition."""


class Literal(NamedTuple):
    predicate: str
    args: Tuple[str, ...] = ()

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"

    @property
    def name(self) -> str:
        return NAME_SEPARATOR.join((self.predicate,) + tuple(self.args))


Condition = FrozenSet[Literal]
State = Condition


def lit(predicate: str, *args: str) -> Literal:
    return Literal(predicate, tuple(args))


def make_condition(literals: Iterable[Literal]) -> Condition:
    return frozenset(literals)


def canonical(c: Iterable[Literal]) -> List[str]:
    """Sorted literal text; equal sets always give equal lists."""
    return [str(l) for l in sorted(c)]


def action_name(predicate: str, args: Sequence[str]) -> str:
    return NAME_SEPARATOR.join([predicate, *args])


def split_action_name(name: str) -> Tuple[str, Tuple[str, ...]]:
    predicate, *args = name.split(NAME_SEPARATOR)
    return predicate, tuple(args)


def check_symbol(symbol: str, kind: str, line: Optional[int] = None) -> None:
    """Objects and predicates end up inside action names, so they may not contain the separator."""
    if NAME_SEPARATOR in symbol:
        raise DomainError(f"{kind} name {symbol} may not contain '{NAME_SEPARATOR}'", line=line)


@dataclass(frozen=True)
class GroundedAction:
    predicate: str
    args: Tuple[str, ...]
    pre: Condition
    add: Condition
    delete: Condition
    cost: float = 1.0

    def __post_init__(self):
        if self.cost <= 0:
            raise DomainError(f"Action {self.name} has non-positive cost {self.cost}")
        overlap = self.add & self.delete
        if overlap:
            raise DomainError(f"Action {self.name} adds and deletes {canonical(overlap)}")

    @property
    def name(self) -> str:
        return action_name(self.predicate, self.args)

    @property
    def objects(self) -> Tuple[str, ...]:
        return self.args

    def __str__(self) -> str:
        return self.name


def make_action(
    name: str,
    pre: Iterable[Literal] = (),
    add: Iterable[Literal] = (),
    delete: Iterable[Literal] = (),
    cost: float = 1.0,
) -> GroundedAction:
    """Builds a grounded action from an underscore name such as Put_apple_table."""
    predicate, args = split_action_name(name)
    return GroundedAction(
        predicate=predicate,
        args=args,
        pre=make_condition(pre),
        add=make_condition(add),
        delete=make_condition(delete),
        cost=cost,
    )


@dataclass(frozen=True)
class ActionSchema:
    predicate: str
    params: Tuple[Tuple[str, str], ...]
    pre: Tuple[Literal, ...] = ()
    add: Tuple[Literal, ...] = ()
    delete: Tuple[Literal, ...] = ()
    cost: float = 1.0
    mutex: Tuple[str, ...] = ()
    line: Optional[int] = None


@dataclass(frozen=True)
class CompiledAction:
    """Interned view of a grounded action used by the search loops."""
    action: GroundedAction
    pre: FrozenSet[int]
    add: FrozenSet[int]
    delete: FrozenSet[int]


@dataclass(frozen=True, eq=False)
class Domain:
    objects: Dict[str, Tuple[str, ...]]
    predicates: Dict[str, Tuple[str, ...]]
    schemas: Tuple[ActionSchema, ...]
    actions: Tuple[GroundedAction, ...]
    name: str = "domain"

    @cached_property
    def categories(self) -> Dict[str, Tuple[str, ...]]:
        members: Dict[str, List[str]] = {ALL_CATEGORY: []}
        for cats in self.predicates.values():
            for cat in cats:
                members.setdefault(cat, [])
        for obj, cats in self.objects.items():
            members[ALL_CATEGORY].append(obj)
            for cat in cats:
                members.setdefault(cat, []).append(obj)
        return {cat: tuple(objs) for cat, objs in members.items()}

    @property
    def condition_predicates(self) -> List[str]:
        return sorted(self.predicates)

    @property
    def action_predicates(self) -> List[str]:
        return sorted({schema.predicate for schema in self.schemas})

    @property
    def object_names(self) -> List[str]:
        return sorted(self.objects)

    @cached_property
    def action_by_name(self) -> Dict[str, GroundedAction]:
        return {a.name: a for a in self.actions}

    @cached_property
    def literal_table(self) -> Tuple[Literal, ...]:
        """Every literal mentioned by a grounded action; the position is the interned id."""
        literals = set()
        for a in self.actions:
            literals |= a.pre | a.add | a.delete
        return tuple(sorted(literals))

    @cached_property
    def literal_ids(self) -> Dict[Literal, int]:
        return {l: i for i, l in enumerate(self.literal_table)}

    @cached_property
    def compiled(self) -> Tuple[CompiledAction, ...]:
        ids = self.literal_ids
        return tuple(
            CompiledAction(
                action=a,
                pre=frozenset(ids[l] for l in a.pre),
                add=frozenset(ids[l] for l in a.add),
                delete=frozenset(ids[l] for l in a.delete),
            )
            for a in self.actions
        )

    @cached_property
    def adders(self) -> Dict[int, Tuple[int, ...]]:
        """Literal id to the indices of compiled actions adding it."""
        index: Dict[int, List[int]] = {}
        for i, ca in enumerate(self.compiled):
            for l in ca.add:
                index.setdefault(l, []).append(i)
        return {l: tuple(idx) for l, idx in index.items()}

    @cached_property
    def requirers(self) -> Dict[int, Tuple[int, ...]]:
        """Literal id to the indices of compiled actions requiring it."""
        index: Dict[int, List[int]] = {}
        for i, ca in enumerate(self.compiled):
            for l in ca.pre:
                index.setdefault(l, []).append(i)
        return {l: tuple(idx) for l, idx in index.items()}

    def is_valid_literal(self, literal: Literal) -> bool:
        signature = self.predicates.get(literal.predicate)
        if signature is None or len(signature) != len(literal.args):
            return False
        cats = self.categories
        return all(arg in cats.get(cat, ()) for arg, cat in zip(literal.args, signature))

    def restrict(self, names: Iterable[str]) -> "Domain":
        """Same objects and predicates, grounded actions limited to names (order kept)."""
        keep = set(names)
        return Domain(
            objects=self.objects,
            predicates=self.predicates,
            schemas=self.schemas,
            actions=tuple(a for a in self.actions if a.name in keep),
            name=self.name,
        )


@dataclass(frozen=True, eq=False)
class PlanningProblem:
    domain: Domain
    s0: State
    goal: Condition
    label: str = field(default="task")

    def __post_init__(self):
        for part, c in (("s0", self.s0), ("goal", self.goal)):
            invalid = [l for l in c if not self.domain.is_valid_literal(l)]
            if invalid:
                raise DomainError(f"{self.label}: {part} has literals not valid in {self.domain.name}: {canonical(invalid)}")

    def with_actions(self, names: Iterable[str]) -> "PlanningProblem":
        return PlanningProblem(self.domain.restrict(names), self.s0, self.goal, self.label)


def holds(c: Condition, s: State) -> bool:
    return c <= s


def is_applicable(s: State, a: GroundedAction) -> bool:
    return a.pre <= s


def apply_action(s: State, a: GroundedAction, enforce: bool = False) -> State:
    """s' = s ∪ add(a) \\ del(a). With enforce, a violated precondition raises."""
    if enforce and not is_applicable(s, a):
        missing = canonical(a.pre - s)
        raise PreconditionViolated(f"{a.name} needs {missing}")
    return (s | a.add) - a.delete


def regress(c: Condition, a: GroundedAction) -> Condition:
    return a.pre | (c - a.add)


def is_relevant_consistent(c: Condition, a: GroundedAction, guard: str = "standard") -> bool:
    """
    Standard guard: a adds part of c and deletes none of it.
    The compat guard also admits actions that only share precondition literals with c.
    """
    if c & a.delete:
        return False
    if guard == "compat":
        return bool(c & ((a.pre | a.add) - a.delete))
    return bool(c & a.add)


def _substitute(template: Literal, binding: Dict[str, str]) -> Literal:
    return Literal(template.predicate, tuple(binding.get(arg, arg) for arg in template.args))


def _mutex_deletes(
    add: Condition,
    groups: Sequence[str],
    predicates: Dict[str, Tuple[str, ...]],
    categories: Dict[str, Tuple[str, ...]],
) -> Condition:
    extra = set()
    for group in groups:
        if not any(l.predicate == group for l in add):
            continue
        signature = predicates[group]
        for args in itertools.product(*(categories[cat] for cat in signature)):
            candidate = Literal(group, tuple(args))
            if candidate not in add:
                extra.add(candidate)
    return frozenset(extra)


def ground_schemas(
    objects: Dict[str, Tuple[str, ...]],
    predicates: Dict[str, Tuple[str, ...]],
    schemas: Sequence[ActionSchema],
) -> Tuple[GroundedAction, ...]:
    """
    Every category-valid grounding of every schema, in schema order then object
    declaration order. Parameters of one action bind distinct objects.
    """
    for obj in objects:
        check_symbol(obj, "Object")
    for pred in predicates:
        check_symbol(pred, "Predicate")
    for schema in schemas:
        check_symbol(schema.predicate, "Action", line=schema.line)
    declared = Domain(objects=objects, predicates=predicates, schemas=tuple(schemas), actions=())
    categories = declared.categories
    grounded: List[GroundedAction] = []
    seen = set()

    for schema in schemas:
        pools = [categories.get(cat, ()) for _, cat in schema.params]
        names = [name for name, _ in schema.params]
        for combo in itertools.product(*pools):
            if len(set(combo)) != len(combo):
                continue
            binding = dict(zip(names, combo))
            parts = {}
            for key in ("pre", "add", "delete"):
                literals = frozenset(_substitute(t, binding) for t in getattr(schema, key))
                for l in literals:
                    if not declared.is_valid_literal(l):
                        raise DomainError(
                            f"Action {schema.predicate} grounds to invalid literal {l}",
                            line=schema.line,
                        )
                parts[key] = literals
            delete = parts["delete"] | _mutex_deletes(parts["add"], schema.mutex, predicates, categories)
            action = GroundedAction(
                predicate=schema.predicate,
                args=tuple(combo),
                pre=parts["pre"],
                add=parts["add"],
                delete=delete,
                cost=schema.cost,
            )
            if action.name in seen:
                raise DomainError(f"Duplicate grounded action {action.name}", line=schema.line)
            seen.add(action.name)
            grounded.append(action)

    logger.debug(f"Grounded {len(grounded)} actions from {len(schemas)} schemas")
    return tuple(grounded)


def build_domain(
    objects: Dict[str, Tuple[str, ...]],
    predicates: Dict[str, Tuple[str, ...]],
    schemas: Sequence[ActionSchema],
    name: str = "domain",
) -> Domain:
    return Domain(
        objects=dict(objects),
        predicates=dict(predicates),
        schemas=tuple(schemas),
        actions=ground_schemas(objects, predicates, schemas),
        name=name,
    )
