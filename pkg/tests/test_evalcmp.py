import math

import numpy as np
import pytest

from kutato import networks
from kutato.estimation import fit_parameters
from kutato.evalcmp import cpt_max_abs_error, distribution_kl, structural_diff
from kutato.learner import LearnConfig, kutato_learn
from kutato.model import BeliefNetwork, Cpt, NetworkError, Variable
from kutato.networks import exact_joint_database
from kutato.sampling import SampleSpec, logic_sample


def _with_arcs(net, arcs):
    parents = [[] for _ in net.variables]
    for a, b in arcs:
        parents[net.index_of(b)].append(net.index_of(a))
    return BeliefNetwork(net.name, net.variables, [sorted(p) for p in parents])


def test_identical_networks(mcbn1):
    d = structural_diff(mcbn1, mcbn1)
    assert d.empty and d.counts() == (0, 0, 0)


def test_reversed_arc():
    chain = networks.two_node_chain()
    flipped = _with_arcs(chain, [("B", "A")])
    d = structural_diff(flipped, chain)
    assert d.reversed == (("A", "B"),)
    assert d.missing == () and d.extra == ()


def test_alarm_scale_two_missing_two_extra():
    ref = networks.alarm_scale()
    arcs = ref.arc_names()
    assert len(arcs) == 46
    kept = arcs[2:]
    existing = set(arcs)
    additions = []
    for j in range(len(ref) - 1, 0, -1):
        for i in range(j):
            a, b = ref.names[i], ref.names[j]
            if (a, b) not in existing and (b, a) not in existing and len(additions) < 2:
                additions.append((a, b))
    learned = _with_arcs(ref, kept + additions)
    d = structural_diff(learned, ref)
    assert d.counts() == (2, 2, 0)
    assert set(d.missing) == set(arcs[:2]) and set(d.extra) == set(additions)


def test_diff_argument_swap_symmetry(mcbn1):
    other = _with_arcs(mcbn1, [("A", "B"), ("C", "A"), ("B", "E"), ("C", "D")])
    fwd, back = structural_diff(other, mcbn1), structural_diff(mcbn1, other)
    assert set(fwd.missing) == set(back.extra)
    assert set(fwd.extra) == set(back.missing)
    assert {frozenset(a) for a in fwd.reversed} == {frozenset(a) for a in back.reversed}
    pairs = [{frozenset(a) for a in s} for s in (fwd.missing, fwd.extra, fwd.reversed)]
    assert not (pairs[0] & pairs[1] or pairs[0] & pairs[2] or pairs[1] & pairs[2])


def test_variable_mismatch_raises(mcbn1):
    with pytest.raises(NetworkError):
        structural_diff(networks.two_node_chain(), mcbn1)


def test_cpt_error_self_zero_and_perturbation(mcbn1):
    assert cpt_max_abs_error(mcbn1, mcbn1) == 0.0
    cpts = list(mcbn1.cpts)
    rows = cpts[3].rows.copy()
    rows[2] = [rows[2, 0] + 0.03, rows[2, 1] - 0.03]
    cpts[3] = Cpt(rows)
    assert cpt_max_abs_error(mcbn1.with_cpts(cpts), mcbn1) >= 0.03 - 1e-12


def test_cpt_error_label_and_parent_order_alignment(chain):
    # same distribution written with reversed value labels
    v = [Variable("A", ("t", "f")), Variable("B", ("t", "f"))]
    relabeled = BeliefNetwork.from_names(
        "r", v, {"B": ["A"]}, {"A": [[0.3, 0.7]], "B": [[0.9, 0.1], [0.2, 0.8]]})
    assert cpt_max_abs_error(relabeled, chain) == pytest.approx(0.0, abs=1e-15)
    assert distribution_kl(relabeled, chain) == pytest.approx(0.0, abs=1e-12)


def test_cpt_error_requires_matching_parents(mcbn1):
    with pytest.raises(NetworkError, match="parent"):
        cpt_max_abs_error(fit_parameters(_with_arcs(mcbn1, []),
                                         exact_joint_database(mcbn1, 10)), mcbn1)


def test_sampled_learning_cpt_error(mcbn1):
    db = logic_sample(mcbn1, SampleSpec(1000, 1990))
    net, _ = kutato_learn(db, LearnConfig(order=list("ABCDE")))
    assert cpt_max_abs_error(net, mcbn1) <= 0.05


def test_kl_identical_zero(mcbn1):
    assert distribution_kl(mcbn1, mcbn1) == pytest.approx(0.0, abs=1e-12)


def test_kl_coins_against_copy_chain():
    ref = networks.copy_chain()
    coins = fit_parameters(_with_arcs(ref, []), exact_joint_database(ref, 1000), "dirichlet")
    assert coins.cpts[0].rows[0] == pytest.approx([0.5, 0.5])
    # oracle: reference mass 1/2 on each of two cells, learned mass 1/4 everywhere
    assert distribution_kl(coins, ref) == pytest.approx(2 * 0.5 * math.log(0.5 / 0.25), abs=1e-12)


def test_kl_decreases_with_sample_size(mcbn1):
    kls = []
    for n in (100, 1000, 10_000):
        db = logic_sample(mcbn1, SampleSpec(n, 1990))
        net, _ = kutato_learn(db, LearnConfig(order=list("ABCDE")))
        kls.append(distribution_kl(net, mcbn1))
    assert kls[0] > kls[1] > kls[2] >= 0


def test_kl_zero_iff_equal_joints(mcbn1):
    cpts = list(mcbn1.cpts)
    cpts[0] = Cpt(np.array([[0.41, 0.59]]))
    assert distribution_kl(mcbn1.with_cpts(cpts), mcbn1) > 0
