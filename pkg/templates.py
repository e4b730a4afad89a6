"""
File: templates.py
Text templates for the reasoning prompt: system instructions, few-shot
demonstrations, and the blacklist and feedback sections added on retries.
"""

from typing import NamedTuple, Tuple


class Demonstration(NamedTuple):
    goals: str
    path: Tuple[str, ...]
    predicates: Tuple[str, ...]
    objects: Tuple[str, ...]


DEFAULT_DEMOS = (
    Demonstration(
        goals="IsSwitchedOn_candle",
        path=("Walk_candle", "SwitchOn_candle"),
        predicates=("Walk", "SwitchOn"),
        objects=("candle",),
    ),
    Demonstration(
        goals="IsOn_apple_kitchentable",
        path=("Walk_apple", "RightGrab_apple", "Walk_kitchentable", "RightPut_apple_kitchentable"),
        predicates=("Walk", "RightGrab", "RightPut"),
        objects=("apple", "kitchentable"),
    ),
    Demonstration(
        goals="IsClean_kitchentable & IsSwitchedOn_tv",
        path=("Walk_rag", "RightGrab_rag", "Walk_kitchentable", "Wipe_kitchentable", "Walk_tv", "SwitchOn_tv"),
        predicates=("Walk", "RightGrab", "Wipe", "SwitchOn"),
        objects=("rag", "kitchentable", "tv"),
    ),
)

PROMPT_TEMPLATES = {
    "system": """[Condition Predicates] lists every condition predicate with its parameter categories.
[Action Predicates] lists every action predicate with its parameter categories and its cost in parentheses.
[Objects] lists the objects of each category; <ALL> is the union of the categories.
[Few-shot Demonstrations] maps goals to a heuristic path, the relevant action predicates and the relevant objects.
1. Read the goal at the end of this prompt. It is a conjunction of condition literals joined by &.
2. Give the cheapest action sequence reaching the goal. Begin with 'Heuristic Path:' and list the actions separated by commas, writing each action as Predicate_object or Predicate_object_object.
3. Begin the next line with 'Relevant Action Predicates:' and list the action predicates the goal needs.
4. Begin the next line with 'Relevant Objects:' and list the objects the goal needs.
5. Use only names from the lists above. Replace anything missing with the closest listed name.
6. Follow the demonstrations exactly and add no explanations, headings or blank lines.""",

    "demonstration": """Goals: {goals}
Heuristic Path: {path}
Relevant Action Predicates: {predicates}
Relevant Objects: {objects}
""",

    "blacklist": """[Blacklist]
These earlier outputs were rejected. Do not repeat them:
{items}

""",

    "feedback": """[Feedback]
Planning failed in the pruned action space ({reason}).
Longest explored paths:
{paths}
Action predicates not considered yet: {predicates}
Objects not considered yet: {objects}
Add whatever is missing to Relevant Action Predicates and Relevant Objects, keeping the same format.

""",
}
