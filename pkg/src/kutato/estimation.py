"""Family counting and CPT estimation (Dirichlet-smoothed or maximum likelihood)."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import MISSING, BeliefNetwork, CaseDatabase, Cpt, NetworkError, config_count, encode_rows


class Estimator(str, Enum):
    DIRICHLET = "dirichlet"
    ML = "ml"


@dataclass(frozen=True, eq=False)
class FamilyCounts:
    """Weighted tallies of a child against its parents' configurations.

    ``counts[c, x]`` is the total weight of complete rows whose parent
    configuration has mixed-radix index ``c`` and whose child value is ``x``.
    """

    child: int
    parents: tuple[int, ...]
    counts: np.ndarray

    @property
    def config_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def arity(self) -> int:
        return self.counts.shape[1]


def count_family(db: CaseDatabase, child: int, parents: Sequence[int]) -> FamilyCounts:
    """Tally ``child`` against ``parents`` over rows where the whole family is observed."""
    parents = tuple(int(p) for p in parents)
    if child in parents:
        raise ValueError("child cannot be its own parent")
    cols = list(parents) + [child]
    arities = [db.variables[c].arity for c in cols]
    block = db.data[:, cols]
    complete = np.all(block != MISSING, axis=1)
    cells = encode_rows(block[complete], arities)
    n_cells = config_count(arities)
    flat = np.bincount(cells, weights=db.weights[complete], minlength=n_cells)
    return FamilyCounts(child, parents, flat.reshape(-1, arities[-1]))


def conditional_rows(counts: np.ndarray, mode: Estimator | str) -> np.ndarray:
    """Per-configuration conditional distributions from a ``(configs, arity)`` count array."""
    mode = Estimator(mode)
    arity = counts.shape[1]
    totals = counts.sum(axis=1, keepdims=True)
    if mode is Estimator.DIRICHLET:
        return (counts + 1.0) / (totals + arity)
    with np.errstate(invalid="ignore", divide="ignore"):
        rows = counts / totals
    return np.where(totals > 0, rows, 1.0 / arity)


def estimate_cpt(counts: FamilyCounts, mode: Estimator | str = Estimator.DIRICHLET) -> Cpt:
    rows = conditional_rows(counts.counts, mode)
    # exact unit row sums, as downstream sampling relies on them
    return Cpt(rows / rows.sum(axis=1, keepdims=True))


def check_vocabulary(structure: BeliefNetwork, db: CaseDatabase) -> list[int]:
    """Map each structure variable to its database column, checking value labels."""
    columns = []
    for var in structure.variables:
        col = db.column(var.name)
        theirs = db.variables[col].values
        if theirs != var.values:
            for label in theirs:
                if label not in var.values:
                    raise NetworkError(f"variable {var.name!r}: unexpected label {label!r}")
            for label in var.values:
                if label not in theirs:
                    raise NetworkError(f"variable {var.name!r}: label {label!r} absent from data")
            raise NetworkError(f"variable {var.name!r}: label order differs from data")
        columns.append(col)
    return columns


def aligned_database(structure: BeliefNetwork, db: CaseDatabase) -> CaseDatabase:
    """Database restricted and reordered to the structure's canonical variable order."""
    columns = check_vocabulary(structure, db)
    if columns == list(range(len(db.variables))):
        return db
    return CaseDatabase(structure.variables, db.data[:, columns], db.weights)


def fit_parameters(structure: BeliefNetwork, db: CaseDatabase,
                   mode: Estimator | str = Estimator.DIRICHLET) -> BeliefNetwork:
    """Fill every CPT of ``structure`` from ``db``; the arcs are left untouched."""
    db = aligned_database(structure, db)
    cpts = [estimate_cpt(count_family(db, i, structure.parents[i]), mode)
            for i in range(len(structure))]
    return structure.with_cpts(cpts)
