"""Small reference networks and seeded random network generators.

``python -m kutato.networks DIR`` writes the bundled reference networks as
``.bn`` files into DIR.
"""

from __future__ import annotations

import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .inference import DEFAULT_CELL_BUDGET, brute_force_joint
from .model import BeliefNetwork, CaseDatabase, Cpt, Variable, all_assignments, config_count

BINARY = ("f", "t")


def binary(name: str) -> Variable:
    return Variable(name, BINARY)


def fair_coin() -> BeliefNetwork:
    return BeliefNetwork.from_names("coin", [binary("X")], {}, {"X": [[0.5, 0.5]]})


def two_node_chain() -> BeliefNetwork:
    """A -> B with P(A=t)=0.3, P(B=t|A=t)=0.9, P(B=t|A=f)=0.2."""
    return BeliefNetwork.from_names(
        "chain", [binary("A"), binary("B")], {"B": ["A"]},
        {"A": [[0.7, 0.3]], "B": [[0.8, 0.2], [0.1, 0.9]]})


def copy_chain() -> BeliefNetwork:
    """A -> B where B always equals A; A is a fair coin."""
    return BeliefNetwork.from_names(
        "copy", [binary("A"), binary("B")], {"B": ["A"]},
        {"A": [[0.5, 0.5]], "B": [[1.0, 0.0], [0.0, 1.0]]})


def independent_coins(n: int) -> BeliefNetwork:
    variables = [binary(f"X{i}") for i in range(n)]
    return BeliefNetwork.from_names(
        "coins", variables, {}, {v.name: [[0.5, 0.5]] for v in variables})


def mcbn1_analog() -> BeliefNetwork:
    """Five binary nodes, five arcs: A->B, A->C, B->D, C->D, C->E.

    Every CPT entry lies in [0.1, 0.9].
    """
    return BeliefNetwork.from_names(
        "mcbn1_analog", [binary(n) for n in "ABCDE"],
        {"B": ["A"], "C": ["A"], "D": ["B", "C"], "E": ["C"]},
        {
            "A": [[0.4, 0.6]],
            "B": [[0.8, 0.2], [0.2, 0.8]],
            "C": [[0.8, 0.2], [0.2, 0.8]],
            "D": [[0.9, 0.1], [0.2, 0.8], [0.3, 0.7], [0.1, 0.9]],
            "E": [[0.9, 0.1], [0.2, 0.8]],
        })


def four_node_net() -> BeliefNetwork:
    """Diamond A->B, A->C, B->D, C->D with mixed arities (36 joint cells)."""
    return BeliefNetwork.from_names(
        "four", [Variable("A", ("a0", "a1", "a2")), binary("B"), binary("C"),
                 Variable("D", ("d0", "d1", "d2"))],
        {"B": ["A"], "C": ["A"], "D": ["B", "C"]},
        {
            "A": [[0.5, 0.3, 0.2]],
            "B": [[0.7, 0.3], [0.4, 0.6], [0.1, 0.9]],
            "C": [[0.2, 0.8], [0.5, 0.5], [0.85, 0.15]],
            "D": [[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.1, 0.2, 0.7], [0.3, 0.3, 0.4]],
        })


def _labels(name: str, arity: int) -> tuple[str, ...]:
    return BINARY if arity == 2 else tuple(f"{name.lower()}{k}" for k in range(arity))


def _dirichlet_rows(rng: np.random.Generator, configs: int, arity: int,
                    concentration: float) -> np.ndarray:
    return rng.dirichlet(np.full(arity, concentration), size=configs)


def _peaked_rows(rng: np.random.Generator, configs: int, arity: int,
                 floor: float = 0.1) -> np.ndarray:
    """Sparse-Dirichlet rows lifted so every entry is at least ``floor``."""
    spread = rng.dirichlet(np.full(arity, 0.5), size=configs)
    return floor + (1.0 - floor * arity) * spread


def random_network(rng: np.random.Generator, n_vars: int, n_arcs: int | None = None,
                   arity_range: tuple[int, int] = (2, 4), max_parents: int = 3,
                   arc_prob: float = 0.3, cpt: str = "dirichlet", concentration: float = 1.0,
                   name: str = "random") -> BeliefNetwork:
    """Random DAG whose canonical order is topological.

    With ``n_arcs`` the arc count is exact; otherwise each forward pair is an
    arc with probability ``arc_prob`` until the node's parent cap is hit.
    ``cpt`` is ``"dirichlet"`` (symmetric, given concentration) or
    ``"peaked"`` (sparse Dirichlet rows lifted so every entry is >= 0.1).
    """
    arities = rng.integers(arity_range[0], arity_range[1] + 1, size=n_vars)
    variables = [Variable(f"V{i}", _labels(f"V{i}", int(a))) for i, a in enumerate(arities)]
    parents: list[list[int]] = [[] for _ in range(n_vars)]
    if n_arcs is None:
        for j in range(1, n_vars):
            for i in rng.permutation(j):
                if len(parents[j]) < max_parents and rng.random() < arc_prob:
                    parents[j].append(int(i))
    else:
        pairs = [(i, j) for j in range(n_vars) for i in range(j)]
        if n_arcs > len(pairs):
            raise ValueError("too many arcs requested")
        placed = 0
        for k in rng.permutation(len(pairs)):
            i, j = pairs[k]
            if len(parents[j]) < max_parents:
                parents[j].append(i)
                placed += 1
                if placed == n_arcs:
                    break
        if placed < n_arcs:
            raise ValueError("parent cap leaves room for fewer arcs than requested")
    parents = [sorted(ps) for ps in parents]
    cpts = []
    for j in range(n_vars):
        configs = config_count(int(arities[p]) for p in parents[j])
        if cpt == "peaked":
            rows = _peaked_rows(rng, configs, int(arities[j]))
        else:
            rows = _dirichlet_rows(rng, configs, int(arities[j]), concentration)
        cpts.append(Cpt(rows))
    return BeliefNetwork(name, variables, parents, cpts).checked()


def alarm_scale(seed: int = 1990) -> BeliefNetwork:
    """37 nodes, 46 arcs, arities 2-4, at most 3 parents per node."""
    rng = np.random.default_rng(seed)
    return random_network(rng, 37, n_arcs=46, arity_range=(2, 4), max_parents=3,
                          name="alarm_scale")


def twelve_node(seed: int = 12) -> BeliefNetwork:
    """12 nodes, 14 arcs, arities 2-3, at most 3 parents, peaked CPTs."""
    rng = np.random.default_rng(seed)
    return random_network(rng, 12, n_arcs=14, arity_range=(2, 3), max_parents=3,
                          cpt="peaked", name="twelve_node")


def exact_joint_database(net: BeliefNetwork, n_cases: float = 1.0,
                         cell_budget: int = DEFAULT_CELL_BUDGET) -> CaseDatabase:
    """The network's exact joint as weighted rows summing to ``n_cases``.

    Zero-probability assignments are dropped.
    """
    probs = brute_force_joint(net, cell_budget).probabilities
    rows = np.array(list(all_assignments(net.arities)), dtype=np.int64).reshape(-1, len(net))
    keep = probs > 0
    return CaseDatabase(net.variables, rows[keep], probs[keep] * n_cases)


REFERENCE_NETWORKS = {
    "coin": fair_coin,
    "chain": two_node_chain,
    "mcbn1_analog": mcbn1_analog,
    "four_node": four_node_net,
    "twelve_node": twelve_node,
    "alarm_scale": alarm_scale,
}


def main(argv: Sequence[str] | None = None) -> int:
    from .io import write_network

    argv = sys.argv[1:] if argv is None else argv
    out = Path(argv[0] if argv else ".")
    out.mkdir(parents=True, exist_ok=True)
    for key, build in REFERENCE_NETWORKS.items():
        write_network(build(), out / f"{key}.bn")
        print(out / f"{key}.bn")
    return 0


if __name__ == "__main__":
    sys.exit(main())
