"""Learned-versus-reference comparison: arcs, CPT error, and KL divergence.

Networks are matched by variable name and value label, so a learned
network whose vocabularies were collected from data (and may list labels
in a different order) compares cleanly against its generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import kl_divergence
from .inference import DEFAULT_CELL_BUDGET, brute_force_joint
from .model import BeliefNetwork, NetworkError, all_assignments, encode_config

Arc = tuple[str, str]


@dataclass(frozen=True)
class StructuralDiff:
    missing: tuple[Arc, ...]
    extra: tuple[Arc, ...]
    reversed: tuple[Arc, ...]  # as oriented in the reference

    def counts(self) -> tuple[int, int, int]:
        return len(self.missing), len(self.extra), len(self.reversed)

    @property
    def empty(self) -> bool:
        return not (self.missing or self.extra or self.reversed)


def _require_same_variables(a: BeliefNetwork, b: BeliefNetwork) -> None:
    if set(a.names) != set(b.names):
        only_a = sorted(set(a.names) - set(b.names))
        only_b = sorted(set(b.names) - set(a.names))
        raise NetworkError(f"variable sets differ: only in first {only_a}, only in second {only_b}")


def structural_diff(learned: BeliefNetwork, reference: BeliefNetwork) -> StructuralDiff:
    _require_same_variables(learned, reference)
    rank = {n: i for i, n in enumerate(reference.names)}
    ref = set(reference.arc_names())
    got = set(learned.arc_names())
    rev = {(a, b) for a, b in ref if (b, a) in got and (a, b) not in got}
    missing = {arc for arc in ref - got if arc not in rev}
    extra = {(a, b) for a, b in got - ref if (b, a) not in rev}

    def key(arc):
        return rank[arc[0]], rank[arc[1]]

    return StructuralDiff(tuple(sorted(missing, key=key)), tuple(sorted(extra, key=key)),
                          tuple(sorted(rev, key=key)))


def cpt_max_abs_error(learned: BeliefNetwork, reference: BeliefNetwork) -> float:
    """Largest |p_learned - p_reference| over every node, configuration and value."""
    _require_same_variables(learned, reference)
    worst = 0.0
    for i, var in enumerate(reference.variables):
        j = learned.index_of(var.name)
        lvar = learned.variables[j]
        if set(lvar.values) != set(var.values):
            raise NetworkError(f"{var.name}: value labels differ")
        ref_parents = [reference.variables[p].name for p in reference.parents[i]]
        got_parents = [learned.variables[p].name for p in learned.parents[j]]
        if set(ref_parents) != set(got_parents):
            raise NetworkError(f"{var.name}: parent sets differ; compare structures first")
        ref_pvars = [reference.variables[p] for p in reference.parents[i]]
        got_pvars = [learned.variables[p] for p in learned.parents[j]]
        value_map = [lvar.index(label) for label in var.values]
        for config in all_assignments([v.arity for v in ref_pvars]):
            labels = {v.name: v.values[c] for v, c in zip(ref_pvars, config)}
            lconfig = [v.index(labels[v.name]) for v in got_pvars]
            ref_row = reference.cpts[i].rows[encode_config(config, [v.arity for v in ref_pvars])]
            got_row = learned.cpts[j].rows[encode_config(lconfig, [v.arity for v in got_pvars])]
            worst = max(worst, float(np.max(np.abs(got_row[value_map] - ref_row))))
    return worst


def aligned_joint(net: BeliefNetwork, like: BeliefNetwork, cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """Joint of ``net`` with axes and value indices laid out as in ``like``."""
    _require_same_variables(net, like)
    joint = brute_force_joint(net, cell_budget).tensor()
    axes = [net.index_of(n) for n in like.names]
    joint = np.transpose(joint, axes)
    for ax, var in enumerate(like.variables):
        mine = net.variables[net.index_of(var.name)]
        if set(mine.values) != set(var.values):
            raise NetworkError(f"{var.name}: value labels differ")
        perm = [mine.index(label) for label in var.values]
        joint = np.take(joint, perm, axis=ax)
    return joint


def distribution_kl(learned: BeliefNetwork, reference: BeliefNetwork,
                    cell_budget: int = DEFAULT_CELL_BUDGET) -> float:
    """KL divergence of the learned joint from the reference joint, D(reference || learned)."""
    p = brute_force_joint(reference, cell_budget).probabilities
    q = aligned_joint(learned, reference, cell_budget).reshape(-1)
    return kl_divergence(p, q)
