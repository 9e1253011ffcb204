import numpy as np
import pytest

from kutato import networks
from kutato.inference import (ResourceError, ancestral_closure, brute_force_joint, marginal_over,
                              min_degree_order)
from kutato.model import BeliefNetwork

from conftest import small_random_net


def test_root_marginal_equals_prior(chain):
    assert marginal_over(chain, [0]).probabilities == pytest.approx([0.7, 0.3])


def test_child_marginal_total_probability(chain):
    m = marginal_over(chain, [1])
    assert m.probabilities[1] == pytest.approx(0.3 * 0.9 + 0.7 * 0.2)


def _sum_rule(joint, scope):
    t = joint.tensor()
    rest = tuple(ax for ax in range(t.ndim) if ax not in scope)
    m = t.sum(axis=rest)
    # sum leaves remaining axes in ascending order; permute to the scope order
    return np.transpose(m, np.argsort(np.argsort(scope))).reshape(-1)


@pytest.mark.parametrize("seed", range(40))
def test_marginal_matches_brute_force(seed):
    net = small_random_net(seed, n_max=10)
    joint = brute_force_joint(net)
    rng = np.random.default_rng(seed + 1000)
    for _ in range(3):
        k = int(rng.integers(1, min(4, len(net)) + 1))
        scope = [int(v) for v in rng.choice(len(net), size=k, replace=False)]
        got = marginal_over(net, scope).probabilities
        assert got == pytest.approx(_sum_rule(joint, scope), abs=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_full_scope_equals_joint(seed):
    net = small_random_net(seed, n_max=7)
    full = marginal_over(net, range(len(net))).probabilities
    assert full == pytest.approx(brute_force_joint(net).probabilities, abs=1e-9)


@pytest.mark.parametrize("seed", range(15))
def test_marginal_invariant_to_elimination_order(seed):
    net = small_random_net(seed, n_min=5, n_max=10)
    rng = np.random.default_rng(seed)
    scope = [len(net) - 1]
    base = marginal_over(net, scope).probabilities
    to_eliminate = sorted(ancestral_closure(net, scope) - set(scope))
    for _ in range(5):
        order = list(rng.permutation(to_eliminate)) if to_eliminate else []
        got = marginal_over(net, scope, elimination_order=order).probabilities
        assert got == pytest.approx(base, abs=1e-9)


def test_min_degree_order_is_deterministic_and_complete():
    net = networks.alarm_scale()
    scope = net.parents[-1] or (len(net) - 1,)
    order = min_degree_order(net, scope)
    assert order == min_degree_order(net, scope)
    assert sorted(order) == sorted(ancestral_closure(net, scope) - set(scope))


def test_cell_budget_raises_resource_error():
    net = networks.independent_coins(6)
    with pytest.raises(ResourceError, match="64 cells"):
        brute_force_joint(net, cell_budget=32)
    dense = small_random_net(3, n_min=8, n_max=8, arc_prob=1.0, max_parents=7)
    with pytest.raises(ResourceError, match="cells"):
        marginal_over(dense, [len(dense) - 1], cell_budget=8)


def test_brute_force_joint_sizes():
    assert brute_force_joint(networks.mcbn1_analog()).probabilities.size == 32
    assert brute_force_joint(networks.fair_coin()).probabilities == pytest.approx([0.5, 0.5])


@pytest.mark.parametrize("seed", range(10))
def test_brute_force_joint_entries_match_product_rule(seed):
    from kutato.model import all_assignments, joint_probability

    net = small_random_net(seed, n_max=6)
    joint = brute_force_joint(net).probabilities
    expected = [joint_probability(net, a) for a in all_assignments(net.arities)]
    assert joint == pytest.approx(expected, abs=1e-15)
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)


def test_scope_validation(chain):
    with pytest.raises(ValueError):
        marginal_over(chain, [])
    with pytest.raises(ValueError):
        marginal_over(chain, [0, 0])
    with pytest.raises(ValueError):
        marginal_over(chain, [1], elimination_order=[])


def test_marginal_of_barren_free_query_ignores_descendants():
    # descendants of the scope must not be needed: give B a huge CPT and query A only
    v = [networks.binary("A"), networks.binary("B")]
    net = BeliefNetwork.from_names("n", v, {"B": ["A"]},
                                   {"A": [[0.25, 0.75]], "B": [[0.5, 0.5], [0.5, 0.5]]})
    assert marginal_over(net, [0], cell_budget=2).probabilities == pytest.approx([0.25, 0.75])
