import random

import pytest

from heuristics import (
    InvalidAlpha,
    alpha_lower_bound,
    indicator_of,
    path_cost,
    path_h_alpha,
    path_h_alpha_literal,
    path_h_inf,
)

COSTS = {"Walk_a": 15.0, "Grab_a": 10.0, "Put_a_t": 10.0, "Walk_t": 15.0}


def test_indicator_counts_occurrences():
    ind = indicator_of(["Walk_a", "Walk_a", "Grab_a"])
    assert ind["Walk_a"] == 2
    assert ind["Grab_a"] == 1
    assert ind["Put_a_t"] == 0


def test_h_alpha_credits_matched_occurrences():
    p = ["Walk_a", "Grab_a", "Walk_t", "Put_a_t"]
    assert path_h_alpha(p, p, 10.0, COSTS) == pytest.approx(path_cost(p, COSTS) / 10.0)
    assert path_h_alpha(p, [], 10.0, COSTS) == pytest.approx(50.0)
    # one Walk_a credited, the second paid in full
    assert path_h_alpha(["Walk_a", "Walk_a"], ["Walk_a"], 5.0, COSTS) == pytest.approx(15.0 + 3.0)


def test_h_alpha_orders_paths_like_true_cost_for_large_alpha():
    p_hat = ["Walk_a", "Grab_a"]
    cheap = ["Walk_a", "Grab_a"]
    costly = ["Walk_a", "Grab_a", "Walk_t"]
    alpha = alpha_lower_bound(p_hat, COSTS) + 1
    assert path_h_alpha(cheap, p_hat, alpha, COSTS) < path_h_alpha(costly, p_hat, alpha, COSTS)


def test_literal_form_charges_unused_credits():
    assert path_h_alpha_literal(["Walk_a"], ["Walk_a", "Walk_a"], 5.0, COSTS) == pytest.approx(3.0)
    assert path_h_alpha_literal(["Walk_a", "Walk_a"], ["Walk_a"], 5.0, COSTS) == pytest.approx(15.0)


def test_h_inf_ignores_credited_actions():
    assert path_h_inf(["Walk_a", "Grab_a"], ["Walk_a"], COSTS) == 10.0
    assert path_h_inf([], ["Walk_a"], COSTS) == 0.0


def test_alpha_must_be_at_least_one():
    with pytest.raises(InvalidAlpha):
        path_h_alpha(["Walk_a"], [], 0.5, COSTS)


def test_alpha_lower_bound():
    assert alpha_lower_bound(["Walk_a", "Grab_a"], COSTS) == pytest.approx(2.5)
    assert alpha_lower_bound([], COSTS) == 0.0


@pytest.mark.parametrize(
    "p,p_hat,cost,expected",
    [
        (["a1"], ["a1"], 1.0, 0.01),
        (["a2"], ["a1"], 1.0, 1.0),
        (["a1", "a1"], ["a1"], 2.0, 2.02),
    ],
)
def test_h_alpha_small_cases(p, p_hat, cost, expected):
    costs = {"a1": cost, "a2": 1.0}
    assert path_h_alpha(p, p_hat, 100.0, costs) == pytest.approx(expected)


def test_h_inf_is_the_large_alpha_limit():
    rng = random.Random(8)
    costs = {f"a{i}": float(rng.randint(1, 20)) for i in range(5)}
    names = list(costs)
    for _ in range(200):
        p = rng.choices(names, k=rng.randint(0, 8))
        p_hat = rng.choices(names, k=rng.randint(0, 8))
        assert path_h_alpha(p, p_hat, 1e9, costs) == pytest.approx(path_h_inf(p, p_hat, costs), abs=1e-6)
        assert path_h_alpha(p, p_hat, 1e9, costs) >= path_h_inf(p, p_hat, costs)
