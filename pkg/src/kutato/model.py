"""Discrete belief networks, assignments and case databases.

All containers are frozen; numpy payloads are marked read-only on
construction so instances can be shared freely between workers.

CPT rows are addressed by a mixed-radix index over the parents' value
indices, first-listed parent most significant.  A CPT with parents of
arities ``(a1, a2)`` for a child of arity ``k`` therefore reshapes to a
``(a1, a2, k)`` tensor in C order.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
import heapq
from itertools import product

import numpy as np

MISSING = -1
ROW_SUM_TOL = 1e-6


class NetworkError(ValueError):
    """Raised for structurally invalid networks or databases."""


class CycleError(NetworkError):
    def __init__(self, cycle: Sequence[str]):
        self.cycle = tuple(cycle)
        super().__init__("cycle: " + " -> ".join(self.cycle + self.cycle[:1]))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Variable:
    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(str(v) for v in self.values))
        if not self.name:
            raise NetworkError("variable name must be non-empty")
        if not self.values:
            raise NetworkError(f"variable {self.name!r} has no values")
        if len(set(self.values)) != len(self.values):
            raise NetworkError(f"variable {self.name!r} has duplicate value labels")

    @property
    def arity(self) -> int:
        return len(self.values)

    def index(self, label: str) -> int:
        try:
            return self.values.index(label)
        except ValueError:
            raise NetworkError(f"variable {self.name!r} has no value {label!r}") from None


def config_count(arities: Iterable[int]) -> int:
    n = 1
    for a in arities:
        n *= int(a)
    return n


def encode_config(indices: Sequence[int], arities: Sequence[int]) -> int:
    """Mixed-radix index of a parent configuration (first parent most significant)."""
    code = 0
    for i, a in zip(indices, arities):
        code = code * a + i
    return code


def decode_config(code: int, arities: Sequence[int]) -> tuple[int, ...]:
    out = []
    for a in reversed(arities):
        code, r = divmod(code, a)
        out.append(r)
    return tuple(reversed(out))


def encode_rows(columns: np.ndarray, arities: Sequence[int]) -> np.ndarray:
    """Vectorised :func:`encode_config` over the rows of an ``(n, k)`` int array."""
    code = np.zeros(columns.shape[0], dtype=np.int64)
    for j, a in enumerate(arities):
        code = code * a + columns[:, j]
    return code


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability rows, one per parent configuration."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, copy=True)
        if rows.ndim != 2:
            raise NetworkError("cpt rows must be a 2-d array")
        object.__setattr__(self, "rows", _frozen(rows))

    @property
    def arity(self) -> int:
        return self.rows.shape[1]

    def normalized(self) -> "Cpt":
        rows = np.clip(self.rows, 0.0, None)
        sums = rows.sum(axis=1, keepdims=True)
        # rows already within rounding of 1 are kept, so text round trips are exact
        off = (sums > 0) & (np.abs(sums - 1.0) > 1e-12)
        return Cpt(rows / np.where(off, sums, 1.0))

    def tensor(self, parent_arities: Sequence[int]) -> np.ndarray:
        return self.rows.reshape(*parent_arities, self.arity)


@dataclass(frozen=True, eq=False)
class BeliefNetwork:
    """A DAG over discrete variables.

    ``cpts`` may be ``None`` for a bare structure (the input to parameter
    fitting and empirical entropy).  Construction does not validate; call
    :func:`validate_network` or :meth:`checked`.
    """

    name: str
    variables: tuple[Variable, ...]
    parents: tuple[tuple[int, ...], ...]
    cpts: tuple[Cpt, ...] | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "parents", tuple(tuple(int(p) for p in ps) for ps in self.parents))
        if self.cpts is not None:
            object.__setattr__(self, "cpts", tuple(c if isinstance(c, Cpt) else Cpt(c)
                                                   for c in self.cpts))
        object.__setattr__(self, "_index", {v.name: i for i, v in enumerate(self.variables)})

    @classmethod
    def from_names(cls, name, variables, parents: dict[str, Sequence[str]] | None = None,
                   cpts: dict[str, Sequence[Sequence[float]]] | None = None) -> "BeliefNetwork":
        """Build a network addressing parents and CPTs by variable name."""
        variables = tuple(variables)
        index = {v.name: i for i, v in enumerate(variables)}
        parents = parents or {}
        pidx = tuple(tuple(index[p] for p in parents.get(v.name, ())) for v in variables)
        cpt_objs = None
        if cpts is not None:
            cpt_objs = tuple(Cpt(np.asarray(cpts[v.name], dtype=float)) for v in variables)
        return cls(name, variables, pidx, cpt_objs)

    def __len__(self) -> int:
        return len(self.variables)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(v.arity for v in self.variables)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise NetworkError(f"unknown variable {name!r}") from None

    def parent_arities(self, i: int) -> tuple[int, ...]:
        return tuple(self.variables[p].arity for p in self.parents[i])

    def arcs(self) -> list[tuple[int, int]]:
        return sorted((p, c) for c, ps in enumerate(self.parents) for p in ps)

    def arc_names(self) -> list[tuple[str, str]]:
        return [(self.variables[p].name, self.variables[c].name) for p, c in self.arcs()]

    def structure(self) -> "BeliefNetwork":
        return BeliefNetwork(self.name, self.variables, self.parents, None)

    def with_cpts(self, cpts: Sequence[Cpt]) -> "BeliefNetwork":
        return BeliefNetwork(self.name, self.variables, self.parents, tuple(cpts))

    def checked(self) -> "BeliefNetwork":
        """Validate, then return a copy with every CPT row renormalised to sum 1."""
        report = validate_network(self)
        if report:
            raise NetworkError("; ".join(report))
        if self.cpts is None:
            return self
        return self.with_cpts([c.normalized() for c in self.cpts])

    def joint_size(self) -> int:
        return config_count(self.arities)


def _find_cycle(parents: Sequence[Sequence[int]]) -> list[int] | None:
    n = len(parents)
    state = [0] * n  # 0 new, 1 on stack, 2 done
    stack: list[int] = []

    def visit(v):
        state[v] = 1
        stack.append(v)
        for p in parents[v]:
            if not 0 <= p < n:
                continue
            if state[p] == 1:
                return stack[stack.index(p):]
            if state[p] == 0:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        state[v] = 2
        return None

    for v in range(n):
        if state[v] == 0:
            found = visit(v)
            if found:
                # stack holds child -> parent links; reverse to read along arcs
                return list(reversed(found))
    return None


def validate_network(net: BeliefNetwork) -> list[str]:
    """Return every invariant violation found in ``net``; empty means valid."""
    problems: list[str] = []
    n = len(net.variables)
    names = [v.name for v in net.variables]
    seen = set()
    for name in names:
        if name in seen:
            problems.append(f"duplicate variable name {name!r}")
        seen.add(name)
    if len(net.parents) != n:
        problems.append(f"parent lists: expected {n}, got {len(net.parents)}")
        return problems
    for i, ps in enumerate(net.parents):
        if len(set(ps)) != len(ps):
            problems.append(f"{names[i]}: duplicate parent")
        for p in ps:
            if p == i:
                problems.append(f"{names[i]}: self-parent")
            elif not 0 <= p < n:
                problems.append(f"{names[i]}: parent index {p} out of range")
    cycle = _find_cycle(net.parents)
    if cycle:
        problems.append("cycle: " + " -> ".join(names[i] for i in cycle))
    if net.cpts is None:
        return problems
    if len(net.cpts) != n:
        problems.append(f"cpts: expected {n}, got {len(net.cpts)}")
        return problems
    for i, cpt in enumerate(net.cpts):
        var = net.variables[i]
        pa = [net.variables[p].arity for p in net.parents[i] if 0 <= p < n]
        expected = (config_count(pa), var.arity)
        if cpt.rows.shape != expected:
            problems.append(f"{var.name}: cpt shape {cpt.rows.shape}, expected {expected}")
            continue
        for r, row in enumerate(cpt.rows):
            if np.any(row < 0) or np.any(row > 1) or not np.all(np.isfinite(row)):
                problems.append(f"{var.name}: row {r} has entry outside [0, 1]")
            s = float(row.sum())
            if abs(s - 1.0) > ROW_SUM_TOL:
                problems.append(f"{var.name}: row {r} row sum {s:.6f} != 1")
    return problems


def topological_order(net: BeliefNetwork) -> list[int]:
    """Parents before children; ties resolved by canonical variable order."""
    n = len(net.variables)
    cycle = _find_cycle(net.parents)
    if cycle:
        raise CycleError([net.variables[i].name for i in cycle])
    children: list[list[int]] = [[] for _ in range(n)]
    indeg = [len(ps) for ps in net.parents]
    for c, ps in enumerate(net.parents):
        for p in ps:
            children[p].append(c)
    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    return order


def joint_probability(net: BeliefNetwork, assignment: Sequence[int]) -> float:
    """Product over nodes of the CPT entry selected by ``assignment``."""
    p = 1.0
    for i, cpt in enumerate(net.cpts):
        ps = net.parents[i]
        row = encode_config([assignment[q] for q in ps], net.parent_arities(i))
        p *= float(cpt.rows[row, assignment[i]])
    return p


def all_assignments(arities: Sequence[int]):
    return product(*(range(a) for a in arities))


@dataclass(frozen=True, eq=False)
class CaseDatabase:
    """Rows of value indices (``MISSING`` for unknown) with per-row weights."""

    variables: tuple[Variable, ...]
    data: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        variables = tuple(self.variables)
        data = np.array(self.data, dtype=np.int64, copy=True).reshape(-1, len(variables))
        if self.weights is None:
            weights = np.ones(data.shape[0])
        else:
            weights = np.array(self.weights, dtype=float, copy=True).reshape(-1)
        if weights.shape[0] != data.shape[0]:
            raise NetworkError("one weight per row required")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise NetworkError("weights must be finite and nonnegative")
        for j, v in enumerate(variables):
            col = data[:, j]
            bad = (col != MISSING) & ((col < 0) | (col >= v.arity))
            if np.any(bad):
                r = int(np.flatnonzero(bad)[0])
                raise NetworkError(f"row {r}: value index {col[r]} out of range for {v.name!r}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "weights", _frozen(weights))

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_effective(self) -> float:
        return float(self.weights.sum())

    def column(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise NetworkError(f"database has no variable {name!r}") from None

    def permuted(self, perm: Sequence[int]) -> "CaseDatabase":
        perm = np.asarray(perm, dtype=np.int64)
        return CaseDatabase(self.variables, self.data[perm], self.weights[perm])

    def scaled(self, factor: float) -> "CaseDatabase":
        return CaseDatabase(self.variables, self.data, self.weights * factor)
