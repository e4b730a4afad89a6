"""
File: domain_parser.py
Reads and writes the plain-text domain and task files.

Domain file:
    OBJECTS      name: CATEGORY, CATEGORY ...
    PREDICATES   Name(CATEGORY, ...)
    ACTIONS      Name(param: CATEGORY, ...)
                   pre: Lit(...), ...   add: ...   del: ...   cost: <number>   mutex: Pred
Task file:
    s0: Lit(...), ...
    goal: Lit(...) & Lit(...) | Lit(...)
Fields of an action appear in the order above; pre, add, del and mutex are optional,
cost defaults to 1. Zero-arity literals are written Name(). Object, predicate and action
names may not contain an underscore; categories may. '#' starts a comment.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple

from pyparsing import (
    Group,
    Keyword,
    Optional,
    ParseBaseException,
    Suppress,
    StringEnd,
    Word,
    ZeroOrMore,
    alphanums,
    alphas,
    delimited_list,
    lineno,
    pyparsing_common,
    python_style_comment,
)

from domain_model import (
    ALL_CATEGORY,
    ActionSchema,
    Condition,
    Domain,
    DomainError,
    Literal,
    PlanningProblem,
    State,
    build_domain,
    canonical,
    check_symbol,
    make_condition,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SECTIONS = ("OBJECTS", "PREDICATES", "ACTIONS")


class _ObjectDecl(NamedTuple):
    name: str
    categories: Tuple[str, ...]
    line: int


class _PredicateDecl(NamedTuple):
    name: str
    categories: Tuple[str, ...]
    line: int


class _ActionDecl(NamedTuple):
    name: str
    params: Tuple[Tuple[str, str], ...]
    pre: Tuple[Literal, ...]
    add: Tuple[Literal, ...]
    delete: Tuple[Literal, ...]
    cost: float
    mutex: Tuple[str, ...]
    line: int


@dataclass(frozen=True)
class Task:
    s0: State
    goals: Tuple[Condition, ...]

    @property
    def goal(self) -> Condition:
        return self.goals[0]

    def problem(self, domain: Domain, index: int = 0, label: str = "task") -> PlanningProblem:
        return PlanningProblem(domain=domain, s0=self.s0, goal=self.goals[index], label=label)


class DomainGrammar:
    def __init__(self):
        name = Word(alphas, alphanums + "_").add_condition(lambda t: t[0] not in SECTIONS)
        lpar, rpar, colon = Suppress("("), Suppress(")"), Suppress(":")

        literal = (name("predicate") + lpar + Group(Optional(delimited_list(name)))("args") + rpar).set_parse_action(
            lambda t: Literal(t["predicate"], tuple(t["args"]))
        )
        literal_list = Group(Optional(delimited_list(literal)))

        object_decl = (name("name") + colon + Group(delimited_list(name))("categories")).set_parse_action(
            lambda s, loc, t: _ObjectDecl(t["name"], tuple(t["categories"]), lineno(loc, s))
        )
        predicate_decl = (
            name("name") + lpar + Group(Optional(delimited_list(name)))("categories") + rpar
        ).set_parse_action(lambda s, loc, t: _PredicateDecl(t["name"], tuple(t["categories"]), lineno(loc, s)))

        param = Group(name("name") + colon + name("category"))
        action_decl = (
            name("name")
            + lpar
            + Group(Optional(delimited_list(param)))("params")
            + rpar
            + Optional(Suppress(Keyword("pre") + colon) + literal_list("pre"))
            + Optional(Suppress(Keyword("add") + colon) + literal_list("add"))
            + Optional(Suppress(Keyword("del") + colon) + literal_list("del"))
            + Optional(Suppress(Keyword("cost") + colon) + pyparsing_common.number("cost"))
            + Optional(Suppress(Keyword("mutex") + colon) + Group(delimited_list(name))("mutex"))
        ).set_parse_action(self._action)

        self.domain = (
            Suppress(Keyword("OBJECTS"))
            + Group(ZeroOrMore(object_decl))("objects")
            + Suppress(Keyword("PREDICATES"))
            + Group(ZeroOrMore(predicate_decl))("predicates")
            + Suppress(Keyword("ACTIONS"))
            + Group(ZeroOrMore(action_decl))("actions")
            + StringEnd()
        )
        self.domain.ignore(python_style_comment)

        conjunction = Group(delimited_list(literal, delim="&"))
        self.task = (
            Suppress(Keyword("s0") + colon)
            + literal_list("s0")
            + Suppress(Keyword("goal") + colon)
            + Group(delimited_list(conjunction, delim="|"))("goals")
            + StringEnd()
        )
        self.task.ignore(python_style_comment)

        self.literal = literal + StringEnd()

    @staticmethod
    def _action(s, loc, t):
        return _ActionDecl(
            name=t["name"],
            params=tuple((p["name"], p["category"]) for p in t["params"]),
            pre=tuple(t["pre"]) if "pre" in t else (),
            add=tuple(t["add"]) if "add" in t else (),
            delete=tuple(t["del"]) if "del" in t else (),
            cost=float(t["cost"]) if "cost" in t else 1.0,
            mutex=tuple(t["mutex"]) if "mutex" in t else (),
            line=lineno(loc, s),
        )


_GRAMMAR = DomainGrammar()


def _syntax_error(e: ParseBaseException) -> DomainError:
    return DomainError(f"Syntax error: {e.msg}", line=e.lineno, col=e.col)


def _check_literal_template(
    template: Literal,
    params: Dict[str, str],
    objects: Dict[str, Tuple[str, ...]],
    predicates: Dict[str, Tuple[str, ...]],
    decl: _ActionDecl,
) -> None:
    signature = predicates.get(template.predicate)
    if signature is None:
        raise DomainError(f"Action {decl.name} uses undeclared predicate {template.predicate}", line=decl.line)
    if len(signature) != len(template.args):
        raise DomainError(
            f"Action {decl.name}: {template.predicate} takes {len(signature)} arguments, got {len(template.args)}",
            line=decl.line,
        )
    for arg in template.args:
        if arg not in params and arg not in objects:
            raise DomainError(f"Action {decl.name}: unknown parameter or object {arg}", line=decl.line)


def parse_domain(text: str, name: str = "domain") -> Domain:
    """Parses a domain document and grounds every action schema over its objects."""
    try:
        parsed = _GRAMMAR.domain.parse_string(text, parse_all=True)
    except ParseBaseException as e:
        raise _syntax_error(e) from e

    objects: Dict[str, Tuple[str, ...]] = {}
    for decl in parsed["objects"]:
        if decl.name in objects:
            raise DomainError(f"Duplicate object {decl.name}", line=decl.line)
        check_symbol(decl.name, "Object", line=decl.line)
        objects[decl.name] = decl.categories

    predicates: Dict[str, Tuple[str, ...]] = {}
    for decl in parsed["predicates"]:
        if decl.name in predicates:
            raise DomainError(f"Duplicate predicate {decl.name}", line=decl.line)
        check_symbol(decl.name, "Predicate", line=decl.line)
        predicates[decl.name] = decl.categories

    declared = {ALL_CATEGORY}
    for cats in list(objects.values()) + list(predicates.values()):
        declared.update(cats)

    schemas: List[ActionSchema] = []
    seen = set()
    for decl in parsed["actions"]:
        if decl.name in seen:
            raise DomainError(f"Duplicate action {decl.name}", line=decl.line)
        seen.add(decl.name)
        check_symbol(decl.name, "Action", line=decl.line)
        if decl.cost <= 0:
            raise DomainError(f"Action {decl.name} has non-positive cost {decl.cost:g}", line=decl.line)
        params = dict(decl.params)
        if len(params) != len(decl.params):
            raise DomainError(f"Action {decl.name} repeats a parameter name", line=decl.line)
        for pname, cat in decl.params:
            if cat not in declared:
                raise DomainError(f"Action {decl.name}: unknown category {cat} for {pname}", line=decl.line)
        for template in decl.pre + decl.add + decl.delete:
            _check_literal_template(template, params, objects, predicates, decl)
        for group in decl.mutex:
            if group not in predicates:
                raise DomainError(f"Action {decl.name}: mutex group {group} is not a predicate", line=decl.line)
        schemas.append(
            ActionSchema(
                predicate=decl.name,
                params=decl.params,
                pre=decl.pre,
                add=decl.add,
                delete=decl.delete,
                cost=decl.cost,
                mutex=decl.mutex,
                line=decl.line,
            )
        )

    domain = build_domain(objects, predicates, schemas, name=name)
    logger.info(f"Parsed domain {name}: {len(objects)} objects, {len(schemas)} schemas, {len(domain.actions)} actions")
    return domain


def parse_literal(text: str) -> Literal:
    try:
        return _GRAMMAR.literal.parse_string(text.strip(), parse_all=True)[0]
    except ParseBaseException as e:
        raise _syntax_error(e) from e


def parse_task(text: str, domain: Domain) -> Task:
    """Parses a task document; every literal must be valid in the domain."""
    try:
        parsed = _GRAMMAR.task.parse_string(text, parse_all=True)
    except ParseBaseException as e:
        raise _syntax_error(e) from e

    s0 = make_condition(parsed["s0"])
    goals = tuple(make_condition(conj) for conj in parsed["goals"])
    for l in set(s0).union(*goals):
        if not domain.is_valid_literal(l):
            raise DomainError(f"Literal {l} is not valid in domain {domain.name}")
    return Task(s0=s0, goals=goals)


def load_domain(path: str) -> Domain:
    with open(path, "r", encoding="utf-8") as file:
        text = file.read()
    stem = path.replace("\\", "/").rsplit("/", 1)[-1].split(".")[0]
    return parse_domain(text, name=stem)


def load_task(path: str, domain: Domain) -> Task:
    with open(path, "r", encoding="utf-8") as file:
        return parse_task(file.read(), domain)


def serialize_condition(c: Condition) -> str:
    return ", ".join(canonical(c))


def serialize_task(task: Task) -> str:
    goals = " | ".join(" & ".join(canonical(g)) for g in task.goals)
    return f"s0: {serialize_condition(task.s0)}\ngoal: {goals}\n"


def _template_list(templates: Tuple[Literal, ...]) -> str:
    return ", ".join(str(t) for t in templates)


def _format_cost(cost: float) -> str:
    text = f"{cost:g}"
    return text if float(text) == cost else repr(cost)


def serialize_domain(domain: Domain) -> str:
    """Writes the domain back in the file format; parse(serialize(d)) grounds identically."""
    lines = ["OBJECTS"]
    for obj, cats in domain.objects.items():
        lines.append(f"  {obj}: {', '.join(cats)}")
    lines.append("PREDICATES")
    for pred, cats in domain.predicates.items():
        lines.append(f"  {pred}({', '.join(cats)})")
    lines.append("ACTIONS")
    for schema in domain.schemas:
        params = ", ".join(f"{p}: {c}" for p, c in schema.params)
        lines.append(f"  {schema.predicate}({params})")
        lines.append(f"    pre: {_template_list(schema.pre)}".rstrip())
        lines.append(f"    add: {_template_list(schema.add)}".rstrip())
        lines.append(f"    del: {_template_list(schema.delete)}".rstrip())
        lines.append(f"    cost: {_format_cost(schema.cost)}")
        if schema.mutex:
            lines.append(f"    mutex: {', '.join(schema.mutex)}")
    return "\n".join(lines) + "\n"
