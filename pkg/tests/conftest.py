import numpy as np
import pytest

from kutato import networks


def small_random_net(seed, n_min=3, n_max=8, arity_range=(2, 4), arc_prob=0.35, max_parents=3):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_min, n_max + 1))
    return networks.random_network(rng, n, arity_range=arity_range, arc_prob=arc_prob,
                                   max_parents=max_parents)


@pytest.fixture
def chain():
    return networks.two_node_chain()


@pytest.fixture
def mcbn1():
    return networks.mcbn1_analog()
