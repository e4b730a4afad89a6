"""
File: heuristics.py
Heuristic-path bookkeeping: the action indicator, the optimal (h^alpha) and
satisficing (h^inf) path costs, and the lower bound on alpha.
"""

from collections import Counter
from typing import Mapping, Sequence

DEFAULT_ALPHA = 1e6

HeuristicPath = Sequence[str]
ActionIndicator = Counter


class InvalidAlpha(ValueError):
    pass


def indicator_of(path: HeuristicPath) -> ActionIndicator:
    """Occurrence count of every action name in the path; missing names count 0."""
    return Counter(path)


def path_cost(path: HeuristicPath, costs: Mapping[str, float]) -> float:
    return sum(costs[a] for a in path)


def path_h_alpha(p: HeuristicPath, p_hat: HeuristicPath, alpha: float, costs: Mapping[str, float]) -> float:
    """
    Matched-occurrence form: each occurrence of a in p pays D(a)/alpha while
    credits from p_hat remain and D(a) afterwards. This is what the planner's
    per-action rule accumulates along a search path.
    """
    if alpha < 1:
        raise InvalidAlpha(f"alpha must be >= 1, got {alpha}")
    ip, ih = indicator_of(p), indicator_of(p_hat)
    total = 0.0
    for a, n in ip.items():
        matched = min(n, ih[a])
        total += (n - matched) * costs[a] + matched * costs[a] / alpha
    return total


def path_h_alpha_literal(p: HeuristicPath, p_hat: HeuristicPath, alpha: float, costs: Mapping[str, float]) -> float:
    """Main-text form, whose second term charges unused credits of actions in p."""
    if alpha < 1:
        raise InvalidAlpha(f"alpha must be >= 1, got {alpha}")
    ip, ih = indicator_of(p), indicator_of(p_hat)
    over = sum(max(0, n - ih[a]) * costs[a] for a, n in ip.items())
    unused = sum(max(0, ih[a] - n) * costs[a] for a, n in ip.items())
    return over + unused / alpha


def path_h_inf(p: HeuristicPath, p_hat: HeuristicPath, costs: Mapping[str, float]) -> float:
    ip, ih = indicator_of(p), indicator_of(p_hat)
    return float(sum(max(0, n - ih[a]) * costs[a] for a, n in ip.items()))


def alpha_lower_bound(p_hat: HeuristicPath, costs: Mapping[str, float]) -> float:
    """D(p_hat) / min cost. Choose alpha strictly above this."""
    if not p_hat or not costs:
        return 0.0
    return path_cost(p_hat, costs) / min(costs.values())
