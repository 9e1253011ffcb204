"""Exact prior marginals by variable elimination, plus a brute-force joint oracle."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .model import BeliefNetwork, config_count

DEFAULT_CELL_BUDGET = 2 ** 24


class ResourceError(RuntimeError):
    """An intermediate table would exceed the configured cell budget."""


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Probabilities over the joint configurations of ``scope``.

    ``probabilities`` is flat, in mixed-radix order over ``scope`` (first
    listed variable most significant); ``tensor()`` gives the shaped view.
    """

    scope: tuple[int, ...]
    arities: tuple[int, ...]
    probabilities: np.ndarray

    def tensor(self) -> np.ndarray:
        return self.probabilities.reshape(self.arities)


# A factor is (scope, ndarray) with one array axis per scope variable.
Factor = tuple[tuple[int, ...], np.ndarray]


def _cpt_factor(net: BeliefNetwork, i: int) -> Factor:
    scope = net.parents[i] + (i,)
    return scope, net.cpts[i].tensor(net.parent_arities(i))


def _aligned(factor: Factor, scope: Sequence[int]) -> np.ndarray:
    """View of ``factor`` broadcastable against an array laid out over ``scope``."""
    fscope, arr = factor
    present = [v for v in scope if v in fscope]
    arr = np.transpose(arr, [fscope.index(v) for v in present])
    shape = [arr.shape[present.index(v)] if v in fscope else 1 for v in scope]
    return arr.reshape(shape)


def _multiply(factors: Sequence[Factor], arities: Sequence[int], budget: int) -> Factor:
    scope: list[int] = []
    for fscope, _ in factors:
        for v in fscope:
            if v not in scope:
                scope.append(v)
    scope.sort()
    cells = config_count(arities[v] for v in scope)
    if cells > budget:
        raise ResourceError(
            f"intermediate factor over {len(scope)} variables has {cells} cells "
            f"(budget {budget})")
    out = np.ones([arities[v] for v in scope])
    for f in factors:
        out = out * _aligned(f, scope)
    return tuple(scope), out


def ancestral_closure(net: BeliefNetwork, scope: Iterable[int]) -> set[int]:
    keep: set[int] = set()
    stack = list(scope)
    while stack:
        v = stack.pop()
        if v in keep:
            continue
        keep.add(v)
        stack.extend(net.parents[v])
    return keep


def min_degree_order(net: BeliefNetwork, scope: Iterable[int]) -> list[int]:
    """Elimination order for the non-scope ancestors of ``scope``.

    Greedy min-degree on the moral graph of the ancestral subnetwork, ties
    broken by canonical index; fill-in edges are added as nodes go.
    """
    scope = set(scope)
    keep = ancestral_closure(net, scope)
    adj: dict[int, set[int]] = {v: set() for v in keep}
    for c in keep:
        fam = list(net.parents[c]) + [c]
        for a in fam:
            for b in fam:
                if a != b:
                    adj[a].add(b)
    todo = sorted(keep - scope)
    order = []
    while todo:
        v = min(todo, key=lambda u: (len(adj[u]), u))
        nbrs = adj.pop(v)
        for a in nbrs:
            adj[a].discard(v)
            adj[a].update(nbrs - {a})
        todo.remove(v)
        order.append(v)
    return order


def marginal_over(net: BeliefNetwork, scope: Sequence[int],
                  elimination_order: Sequence[int] | None = None,
                  cell_budget: int = DEFAULT_CELL_BUDGET) -> MarginalTable:
    """Exact prior marginal of ``net`` over ``scope`` by variable elimination.

    Only ancestors of the scope take part: every other CPT sums to one.
    ``elimination_order`` may be forced (it must list exactly the non-scope
    ancestors); by default a min-degree order is used.
    """
    scope = tuple(int(v) for v in scope)
    if not scope:
        raise ValueError("scope must be non-empty")
    if len(set(scope)) != len(scope) or not all(0 <= v < len(net) for v in scope):
        raise ValueError(f"invalid scope {scope}")
    arities = net.arities
    keep = ancestral_closure(net, scope)
    if elimination_order is None:
        elimination_order = min_degree_order(net, scope)
    elif sorted(elimination_order) != sorted(keep - set(scope)):
        raise ValueError("elimination order must cover exactly the non-scope ancestors")

    factors = [_cpt_factor(net, i) for i in sorted(keep)]
    for v in elimination_order:
        touching = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        fscope, arr = _multiply(touching, arities, cell_budget)
        axis = fscope.index(v)
        factors.append((fscope[:axis] + fscope[axis + 1:], arr.sum(axis=axis)))

    fscope, arr = _multiply(factors, arities, cell_budget)
    # broadcasting leaves size-1 axes only for variables absent from every factor,
    # which cannot happen for scope members: each has its own CPT factor.
    arr = np.transpose(arr, [fscope.index(v) for v in scope])
    probs = np.ascontiguousarray(arr).reshape(-1)
    return MarginalTable(scope, tuple(arities[v] for v in scope), probs)


def brute_force_joint(net: BeliefNetwork, cell_budget: int = DEFAULT_CELL_BUDGET) -> MarginalTable:
    """Full joint table by direct multiplication of every CPT."""
    arities = net.arities
    size = config_count(arities)
    if size > cell_budget:
        raise ResourceError(f"joint table has {size} cells (budget {cell_budget})")
    everything = tuple(range(len(net)))
    joint = np.ones(arities)
    for i in everything:
        joint = joint * _aligned(_cpt_factor(net, i), everything)
    return MarginalTable(everything, arities, joint.reshape(-1))
