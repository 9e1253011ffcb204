"""Network entropy (exact and empirical) and the KL closeness metric.

Everything is in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import Estimator, FamilyCounts, aligned_database, conditional_rows, count_family
from .inference import DEFAULT_CELL_BUDGET, MarginalTable, brute_force_joint, marginal_over
from .model import BeliefNetwork, CaseDatabase


@dataclass(frozen=True)
class EntropyReport:
    total: float
    per_node: tuple[float, ...]


def row_entropies(rows: np.ndarray) -> np.ndarray:
    """``-sum p ln p`` along the last axis, with ``0 ln 0 = 0``."""
    rows = np.asarray(rows, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(rows > 0, rows * np.log(rows), 0.0)
    return -terms.sum(axis=-1)


def network_entropy(net: BeliefNetwork, cell_budget: int = DEFAULT_CELL_BUDGET) -> EntropyReport:
    """Exact entropy of the network's joint distribution.

    Each node contributes the entropy of its CPT rows weighted by the prior
    probability of the matching parent configuration, so only the small
    parent marginals are ever materialised.
    """
    per_node = []
    for i, cpt in enumerate(net.cpts):
        h_rows = row_entropies(cpt.rows)
        if net.parents[i]:
            weights = marginal_over(net, net.parents[i], cell_budget=cell_budget).probabilities
        else:
            weights = np.ones(1)
        per_node.append(max(float(np.dot(weights, h_rows)), 0.0))
    return EntropyReport(math.fsum(per_node), tuple(per_node))


def brute_force_entropy(net: BeliefNetwork, cell_budget: int = DEFAULT_CELL_BUDGET) -> float:
    return float(row_entropies(brute_force_joint(net, cell_budget).probabilities))


def family_entropy(counts: np.ndarray, mode: Estimator | str) -> float:
    """Empirical conditional entropy of a child given its parents.

    Configurations are weighted by their share of the family's complete
    rows; unseen configurations get weight zero.
    """
    totals = counts.sum(axis=1)
    n = totals.sum()
    if n <= 0:
        raise ValueError("family has no complete rows")
    h_rows = row_entropies(conditional_rows(counts, mode))
    return float(np.dot(totals, h_rows) / n)


def empirical_network_entropy(structure: BeliefNetwork, db: CaseDatabase,
                              mode: Estimator | str = Estimator.DIRICHLET) -> EntropyReport:
    db = aligned_database(structure, db)
    per_node = []
    for i in range(len(structure)):
        fam: FamilyCounts = count_family(db, i, structure.parents[i])
        if fam.total <= 0:
            names = [structure.variables[p].name for p in structure.parents[i]]
            raise ValueError(
                f"family {structure.variables[i].name} | {', '.join(names) or '(none)'} "
                "has no complete rows")
        per_node.append(family_entropy(fam.counts, mode))
    return EntropyReport(math.fsum(per_node), tuple(per_node))


def kl_divergence(p: MarginalTable | np.ndarray, q: MarginalTable | np.ndarray) -> float:
    """``sum p ln(p/q)``; returns ``math.inf`` when q vanishes where p does not."""
    if isinstance(p, MarginalTable) and isinstance(q, MarginalTable):
        if p.scope != q.scope or p.arities != q.arities:
            raise ValueError("tables must share a scope")
    p = np.asarray(getattr(p, "probabilities", p), dtype=float).reshape(-1)
    q = np.asarray(getattr(q, "probabilities", q), dtype=float).reshape(-1)
    if p.shape != q.shape:
        raise ValueError("tables must have equal size")
    support = p > 0
    if np.any(q[support] <= 0):
        return math.inf
    return max(float(np.sum(p[support] * np.log(p[support] / q[support]))), 0.0)
