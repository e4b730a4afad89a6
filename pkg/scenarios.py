"""
File: scenarios.py
Built-in planning scenarios:
  - generated household domains in three sizes, with seeded initial states
  - chain domains with one optimal action sequence plus unreachable distractors
  - a small delivery domain where satisficing HBTP returns a costlier tree than
    optimal-alpha HBTP
"""

import random
from typing import Dict, List, Tuple

from domain_model import (
    ActionSchema,
    Domain,
    PlanningProblem,
    State,
    build_domain,
    lit,
    make_action,
    make_condition,
)

GRABBABLE_POOL = (
    "apple", "banana", "cup", "plate", "book", "remote", "milk", "bread",
    "bottle", "mug", "pear", "peach", "towel", "toy", "phone", "pen",
    "sponge", "soap", "cereal", "juice", "cheese", "lemon", "carrot", "spoon",
    "fork", "bowl", "pillow", "magazine", "chips", "keys", "wallet", "glasses",
)
SURFACE_POOL = (
    "kitchentable", "desk", "sofa", "bed", "counter", "shelf", "coffeetable", "bench", "nightstand", "tvstand",
)
CONTAINER_POOL = ("fridge", "microwave", "cabinet", "drawer", "dishwasher", "box", "wardrobe", "oven")
SWITCHABLE_POOL = ("tv", "lamp", "computer", "candle", "stove", "radio", "fan", "coffeemaker")
EXTRA_CLEANABLES = ("window", "mirror")
CUTTABLE_FOODS = frozenset({"apple", "banana", "bread", "pear", "peach", "cheese", "lemon", "carrot"})
TOOLS = ("rag", "knife")

# grabbables, surfaces, containers, switchables, extra cleanables
SIZES: Dict[str, Tuple[int, int, int, int, int]] = {
    "small": (4, 2, 1, 2, 0),
    "medium": (12, 5, 3, 4, 1),
    "large": (32, 10, 8, 8, 2),
}

COSTS = {
    "Walk": 15.0,
    "RightGrab": 10.0,
    "RightPut": 10.0,
    "RightPutIn": 12.0,
    "Open": 5.0,
    "Close": 5.0,
    "SwitchOn": 8.0,
    "SwitchOff": 8.0,
    "Wipe": 10.0,
    "Cut": 10.0,
}

HOUSEHOLD_GOAL_PREDICATES = ("IsOn", "IsIn", "IsSwitchedOn", "IsOpen")
HOUSEHOLD_TOOL_PREDICATES = ("IsClean", "IsCut")


def _household_objects(size: str) -> Dict[str, Tuple[str, ...]]:
    if size not in SIZES:
        raise ValueError(f"Unknown scenario size {size}; expected one of {', '.join(SIZES)}")
    n_grab, n_surf, n_cont, n_switch, n_extra = SIZES[size]
    surfaces = SURFACE_POOL[:n_surf]
    objects: Dict[str, Tuple[str, ...]] = {}
    for name in GRABBABLE_POOL[:n_grab]:
        objects[name] = ("GRABBABLE", "CUTTABLE") if name in CUTTABLE_FOODS else ("GRABBABLE",)
    for name in TOOLS:
        objects[name] = ("GRABBABLE", "TOOL")
    for name in surfaces:
        objects[name] = ("SURFACE", "CLEANABLE")
    for name in CONTAINER_POOL[:n_cont]:
        objects[name] = ("CONTAINER",)
    for name in SWITCHABLE_POOL[:n_switch]:
        objects[name] = ("SWITCHABLE",)
    for name in EXTRA_CLEANABLES[:n_extra]:
        objects[name] = ("CLEANABLE",)
    return objects


def household_domain(size: str = "small") -> Domain:
    objects = _household_objects(size)
    surfaces = [o for o, cats in objects.items() if "SURFACE" in cats]
    containers = [o for o, cats in objects.items() if "CONTAINER" in cats]
    predicates = {
        "IsNear": ("ALL",),
        "IsHoldingRight": ("GRABBABLE",),
        "IsRightHandEmpty": (),
        "IsOn": ("GRABBABLE", "SURFACE"),
        "IsIn": ("GRABBABLE", "CONTAINER"),
        "IsOpen": ("CONTAINER",),
        "IsClose": ("CONTAINER",),
        "IsSwitchedOn": ("SWITCHABLE",),
        "IsSwitchedOff": ("SWITCHABLE",),
        "IsClean": ("CLEANABLE",),
        "IsCut": ("CUTTABLE",),
    }
    hand_empty = lit("IsRightHandEmpty")
    placed = tuple(lit("IsOn", "x", s) for s in surfaces) + tuple(lit("IsIn", "x", c) for c in containers)
    schemas = (
        ActionSchema("Walk", (("x", "ALL"),), add=(lit("IsNear", "x"),), cost=COSTS["Walk"], mutex=("IsNear",)),
        ActionSchema(
            "RightGrab",
            (("x", "GRABBABLE"),),
            pre=(lit("IsNear", "x"), hand_empty),
            add=(lit("IsHoldingRight", "x"),),
            delete=(hand_empty,) + placed,
            cost=COSTS["RightGrab"],
        ),
        ActionSchema(
            "RightPut",
            (("x", "GRABBABLE"), ("y", "SURFACE")),
            pre=(lit("IsHoldingRight", "x"), lit("IsNear", "y")),
            add=(lit("IsOn", "x", "y"), hand_empty),
            delete=(lit("IsHoldingRight", "x"),),
            cost=COSTS["RightPut"],
        ),
        ActionSchema(
            "RightPutIn",
            (("x", "GRABBABLE"), ("y", "CONTAINER")),
            pre=(lit("IsHoldingRight", "x"), lit("IsNear", "y"), lit("IsOpen", "y")),
            add=(lit("IsIn", "x", "y"), hand_empty),
            delete=(lit("IsHoldingRight", "x"),),
            cost=COSTS["RightPutIn"],
        ),
        ActionSchema(
            "Open",
            (("x", "CONTAINER"),),
            pre=(lit("IsNear", "x"), lit("IsClose", "x"), hand_empty),
            add=(lit("IsOpen", "x"),),
            delete=(lit("IsClose", "x"),),
            cost=COSTS["Open"],
        ),
        ActionSchema(
            "Close",
            (("x", "CONTAINER"),),
            pre=(lit("IsNear", "x"), lit("IsOpen", "x"), hand_empty),
            add=(lit("IsClose", "x"),),
            delete=(lit("IsOpen", "x"),),
            cost=COSTS["Close"],
        ),
        ActionSchema(
            "SwitchOn",
            (("x", "SWITCHABLE"),),
            pre=(lit("IsNear", "x"), lit("IsSwitchedOff", "x"), hand_empty),
            add=(lit("IsSwitchedOn", "x"),),
            delete=(lit("IsSwitchedOff", "x"),),
            cost=COSTS["SwitchOn"],
        ),
        ActionSchema(
            "SwitchOff",
            (("x", "SWITCHABLE"),),
            pre=(lit("IsNear", "x"), lit("IsSwitchedOn", "x"), hand_empty),
            add=(lit("IsSwitchedOff", "x"),),
            delete=(lit("IsSwitchedOn", "x"),),
            cost=COSTS["SwitchOff"],
        ),
        ActionSchema(
            "Wipe",
            (("x", "CLEANABLE"),),
            pre=(lit("IsNear", "x"), lit("IsHoldingRight", "rag")),
            add=(lit("IsClean", "x"),),
            cost=COSTS["Wipe"],
        ),
        ActionSchema(
            "Cut",
            (("x", "CUTTABLE"),),
            pre=(lit("IsNear", "x"), lit("IsHoldingRight", "knife")),
            add=(lit("IsCut", "x"),),
            cost=COSTS["Cut"],
        ),
    )
    return build_domain(objects, predicates, schemas, name=f"household-{size}")


def household_state(domain: Domain, seed: int = 0) -> State:
    """Every grabbable on a surface, containers closed, devices off, hand empty, robot at the first surface."""
    rng = random.Random(seed)
    cats = domain.categories
    surfaces = cats["SURFACE"]
    literals = [lit("IsRightHandEmpty"), lit("IsNear", surfaces[0])]
    for obj in cats["GRABBABLE"]:
        literals.append(lit("IsOn", obj, rng.choice(surfaces)))
    literals.extend(lit("IsClose", c) for c in cats.get("CONTAINER", ()))
    literals.extend(lit("IsSwitchedOff", w) for w in cats.get("SWITCHABLE", ()))
    return make_condition(literals)


def chain_problem(n: int, distractors: bool = True) -> PlanningProblem:
    """
    Nodes n0..n<n>; Step_n<i> moves from n<i-1> to n<i>. Each Shortcut_n<i> also
    reaches n<i> but needs an unlocked gate that nothing can unlock.
    """
    if n < 1:
        raise ValueError("chain length must be >= 1")
    nodes = [f"n{i}" for i in range(n + 1)]
    objects: Dict[str, Tuple[str, ...]] = {node: ("NODE",) for node in nodes}
    objects["gate"] = ("GATE",)
    predicates = {"At": ("NODE",), "Unlocked": ("GATE",)}
    actions: List = []
    for i in range(1, n + 1):
        actions.append(make_action(f"Step_{nodes[i]}", pre=[lit("At", nodes[i - 1])], add=[lit("At", nodes[i])]))
        if distractors:
            actions.append(
                make_action(f"Shortcut_{nodes[i]}", pre=[lit("Unlocked", "gate")], add=[lit("At", nodes[i])])
            )
    domain = Domain(objects=objects, predicates=predicates, schemas=(), actions=tuple(actions), name=f"chain-{n}")
    return PlanningProblem(
        domain=domain,
        s0=make_condition([lit("At", "n0")]),
        goal=make_condition([lit("At", nodes[-1])]),
        label=f"chain-{n}",
    )


def witness_problem() -> Tuple[PlanningProblem, Tuple[str, ...]]:
    """
    Drive and Cycle both deliver a loaded parcel; Drive costs 5, Cycle 1. With
    both credited by the heuristic path, satisficing search reaches Loaded(parcel)
    through Drive first and discards the cheaper duplicate, while optimal-alpha
    search keeps the Cycle route.
    """
    objects = {"parcel": ("PARCEL",)}
    predicates = {"AtDepot": ("PARCEL",), "Loaded": ("PARCEL",), "Delivered": ("PARCEL",)}
    schemas = (
        ActionSchema("Drive", (("x", "PARCEL"),), pre=(lit("Loaded", "x"),), add=(lit("Delivered", "x"),), cost=5.0),
        ActionSchema("Cycle", (("x", "PARCEL"),), pre=(lit("Loaded", "x"),), add=(lit("Delivered", "x"),), cost=1.0),
        ActionSchema("Load", (("x", "PARCEL"),), pre=(lit("AtDepot", "x"),), add=(lit("Loaded", "x"),), cost=1.0),
    )
    domain = build_domain(objects, predicates, schemas, name="witness")
    problem = PlanningProblem(
        domain=domain,
        s0=make_condition([lit("AtDepot", "parcel")]),
        goal=make_condition([lit("Delivered", "parcel")]),
        label="witness",
    )
    return problem, ("Load_parcel", "Drive_parcel", "Cycle_parcel")


def pruning_witness_problem() -> Tuple[PlanningProblem, Tuple[str, ...]]:
    """
    Two ways to get Done: Fetch, Fast, Finish (cost 3) and Fetch, MakeFrame,
    Fetch, Assemble (cost 4). Satisficing search expands {Part, Supply} on the
    long route first, so the regression of Fast, {Part, Supply, Tool}, is
    discarded as a superset of it and the cost-3 route is never completed.
    """
    supply, tool, part, frame, fitted, done = (
        lit("Supply"), lit("Tool"), lit("Part"), lit("Frame"), lit("Fitted"), lit("Done"),
    )
    predicates = {p: () for p in ("Supply", "Tool", "Part", "Frame", "Fitted", "Done")}
    actions = (
        make_action("Fetch", pre=[supply], add=[part]),
        make_action("MakeFrame", pre=[part], add=[frame], delete=[part]),
        make_action("Assemble", pre=[part, frame], add=[done]),
        make_action("Finish", pre=[fitted, tool, supply], add=[done]),
        make_action("Fast", pre=[part, supply, tool], add=[fitted]),
    )
    domain = Domain(objects={}, predicates=predicates, schemas=(), actions=actions, name="pruning-witness")
    problem = PlanningProblem(
        domain=domain,
        s0=make_condition([supply, tool]),
        goal=make_condition([done]),
        label="pruning-witness",
    )
    return problem, ("Assemble", "MakeFrame", "Fetch", "Finish", "Fast")
