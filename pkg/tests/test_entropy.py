import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kutato import networks
from kutato.entropy import (brute_force_entropy, empirical_network_entropy, kl_divergence,
                            network_entropy)
from kutato.inference import MarginalTable
from kutato.model import BeliefNetwork, CaseDatabase, Variable
from kutato.sampling import SampleSpec, logic_sample

from conftest import small_random_net


def _oracle_joint_entropy(net):
    """-sum p ln p over the full joint, enumerated with plain Python."""
    import itertools

    from kutato.model import joint_probability

    h = 0.0
    for a in itertools.product(*(range(k) for k in net.arities)):
        p = joint_probability(net, a)
        if p > 0:
            h -= p * math.log(p)
    return h


def test_fair_coin():
    assert network_entropy(networks.fair_coin()).total == pytest.approx(math.log(2), abs=1e-12)


def test_deterministic_network_is_zero():
    v = [networks.binary("A"), networks.binary("B")]
    net = BeliefNetwork.from_names("d", v, {"B": ["A"]},
                                   {"A": [[1.0, 0.0]], "B": [[0.0, 1.0], [1.0, 0.0]]})
    assert network_entropy(net).total == 0.0


def test_chain_against_enumeration_oracle(chain):
    expected = _oracle_joint_entropy(chain)
    assert expected == pytest.approx(1.0587, abs=5e-5)
    report = network_entropy(chain)
    assert report.total == pytest.approx(expected, abs=1e-12)
    assert sum(report.per_node) == pytest.approx(report.total, abs=1e-12)


def test_independent_coins_additive():
    for n in (1, 3, 5):
        assert brute_force_entropy(networks.independent_coins(n)) == pytest.approx(n * math.log(2))


def test_uniform_32_cells():
    assert brute_force_entropy(networks.independent_coins(5)) == pytest.approx(math.log(32))


@pytest.mark.parametrize("seed", range(25))
def test_decomposition_matches_brute_force(seed):
    net = small_random_net(seed, n_max=9)
    report = network_entropy(net)
    assert report.total == pytest.approx(brute_force_entropy(net), abs=1e-9)
    assert all(h >= 0 for h in report.per_node)
    assert report.total <= sum(math.log(k) for k in net.arities) + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_brute_force_matches_python_enumeration(seed):
    net = small_random_net(seed, n_max=6)
    assert brute_force_entropy(net) == pytest.approx(_oracle_joint_entropy(net), abs=1e-10)


def test_constant_variable_contributes_zero():
    v = [Variable("K", ("k",)), networks.binary("B")]
    net = BeliefNetwork.from_names("k", v, {"B": ["K"]}, {"K": [[1.0]], "B": [[0.5, 0.5]]})
    assert network_entropy(net).per_node[0] == 0.0


# --- empirical ---------------------------------------------------------------

def _identical_rows_db():
    v = [networks.binary("A"), networks.binary("B")]
    return CaseDatabase(v, [[1, 0]] * 10)


def test_empirical_point_mass_ml_is_zero():
    db = _identical_rows_db()
    s = BeliefNetwork("s", db.variables, [(), (0,)])
    assert empirical_network_entropy(s, db, "ml").total == 0.0


def test_empirical_point_mass_dirichlet_positive():
    db = _identical_rows_db()
    s = BeliefNetwork("s", db.variables, [(), (0,)])
    assert empirical_network_entropy(s, db, "dirichlet").total > 0


def test_empirical_arc_free_ml_is_sum_of_marginal_entropies():
    net = networks.four_node_net()
    db = logic_sample(net, SampleSpec(500, 3))
    expected = 0.0
    for j in range(len(net)):
        tally = Counter(int(x) for x in db.data[:, j])
        n = sum(tally.values())
        expected -= sum(c / n * math.log(c / n) for c in tally.values())
    s = BeliefNetwork("s", net.variables, [()] * len(net))
    assert empirical_network_entropy(s, db, "ml").total == pytest.approx(expected, abs=1e-12)


def test_empirical_missing_family_raises():
    v = [networks.binary("A"), networks.binary("B")]
    db = CaseDatabase(v, [[0, -1], [1, -1]])
    s = BeliefNetwork("s", v, [(), ()])
    with pytest.raises(ValueError, match="B"):
        empirical_network_entropy(s, db, "ml")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_ml_adding_arc_never_raises_entropy(seed):
    rng = np.random.default_rng(seed)
    net = small_random_net(seed, n_max=6)
    db = logic_sample(net, SampleSpec(int(rng.integers(1, 80)), seed))
    n = len(net)
    parents = [tuple(int(p) for p in range(c) if rng.random() < 0.3) for c in range(n)]
    base = BeliefNetwork("s", net.variables, parents)
    child = int(rng.integers(1, n))
    free = [p for p in range(child) if p not in parents[child]]
    if not free:
        return
    more = list(parents)
    more[child] = parents[child] + (int(rng.choice(free)),)
    h0 = empirical_network_entropy(base, db, "ml").total
    h1 = empirical_network_entropy(BeliefNetwork("s", net.variables, more), db, "ml").total
    assert h0 - h1 >= -1e-12


def test_dirichlet_entropy_rises_with_unsupported_configurations():
    """Sparse support for a new parent's configurations makes smoothed entropy go up."""
    a = Variable("A", tuple(f"a{i}" for i in range(5)))  # a4 never observed
    b = networks.binary("B")
    rows = [(0, 0), (0, 0), (1, 0), (1, 1), (2, 0), (2, 0), (3, 0), (3, 0), (0, 0), (1, 0)]
    db = CaseDatabase([a, b], rows)
    without = BeliefNetwork("s", [a, b], [(), ()])
    with_arc = BeliefNetwork("s", [a, b], [(), (0,)])
    dh = (empirical_network_entropy(without, db, "dirichlet").total
          - empirical_network_entropy(with_arc, db, "dirichlet").total)
    assert dh < 0
    dh_ml = (empirical_network_entropy(without, db, "ml").total
             - empirical_network_entropy(with_arc, db, "ml").total)
    assert dh_ml > 0


# --- KL ----------------------------------------------------------------------

def test_kl_identical_is_zero():
    p = np.array([0.1, 0.2, 0.7])
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)


def test_kl_direct_evaluation():
    expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert expected == pytest.approx(0.13081, abs=1e-5)
    assert kl_divergence([0.75, 0.25], [0.5, 0.5]) == pytest.approx(expected, abs=1e-12)


def test_kl_point_mass():
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(math.log(2))


def test_kl_infinite_signal():
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf


def test_kl_scope_mismatch():
    p = MarginalTable((0,), (2,), np.array([0.5, 0.5]))
    q = MarginalTable((1,), (2,), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        kl_divergence(p, q)


@settings(max_examples=200)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=8), st.data())
def test_kl_nonnegative(pw, data):
    qw = data.draw(st.lists(st.floats(1e-3, 1), min_size=len(pw), max_size=len(pw)))
    p = np.array(pw)
    if p.sum() == 0:
        return
    p, q = p / p.sum(), np.array(qw) / sum(qw)
    assert kl_divergence(p, q) >= -1e-12
    assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-12)
