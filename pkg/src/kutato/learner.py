"""Greedy entropy-minimising structure learning with a chi-squared stopping test.

Starting from the arc-free network, every admissible absent arc is scored
each cycle by the entropy decrease ``delta_h`` it buys.  The statistic
``2 N delta_h`` is referred to a chi-squared distribution; the arc least
compatible with conditional independence is added while it is significant.
Only the head node's family term changes when an arc is added, so a
candidate is scored from one family tally.
"""

from __future__ import annotations

import math
import random
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .entropy import family_entropy
from .estimation import Estimator, aligned_database, count_family, fit_parameters
from .model import BeliefNetwork, CaseDatabase, Variable

DIRECTION_LEARNING = "learn-directions"

HALT_NOT_SIGNIFICANT = "no-significant-candidate"
HALT_MIN_DELTA = "min-delta"
HALT_MAX_PARENTS = "max-parents-exhausted"
HALT_NO_CANDIDATES = "no-candidates"


class ConfigError(ValueError):
    pass


# --- chi-squared upper tail -------------------------------------------------

_EPS = 1e-16
_TINY = 1e-300


def _gamma_series(a: float, x: float) -> float:
    """Regularised lower incomplete gamma P(a, x) by its power series."""
    term = total = 1.0 / a
    ap = a
    for _ in range(100_000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cont_frac(a: float, x: float) -> float:
    """Regularised upper incomplete gamma Q(a, x) by modified Lentz continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 100_000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi_squared_survival(x: float, df: int) -> float:
    """Upper-tail probability ``P(chi2_df >= x)``."""
    if df < 1:
        raise ValueError("df must be a positive integer")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    a, z = 0.5 * df, 0.5 * x
    if z < a + 1.0:
        return min(max(1.0 - _gamma_series(a, z), 0.0), 1.0)
    return min(max(_gamma_cont_frac(a, z), 0.0), 1.0)


def degrees_of_freedom(child_arity: int, new_parent_arity: int,
                       existing_parent_arities: Sequence[int] = ()) -> int:
    q = 1
    for a in existing_parent_arities:
        q *= a
    return max((child_arity - 1) * (new_parent_arity - 1) * q, 1)


# --- configuration and records ----------------------------------------------

@dataclass(frozen=True)
class LearnConfig:
    order: Sequence[str] | str = DIRECTION_LEARNING
    alpha: float = 0.05
    mode: Estimator | str = Estimator.DIRICHLET
    max_parents: int | None = None
    min_delta: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        object.__setattr__(self, "mode", Estimator(self.mode))
        if self.max_parents is not None and self.max_parents < 0:
            raise ConfigError("max_parents must be nonnegative")
        if self.order != DIRECTION_LEARNING:
            object.__setattr__(self, "order", tuple(self.order))

    @property
    def learns_directions(self) -> bool:
        return self.order == DIRECTION_LEARNING


@dataclass(frozen=True)
class CandidateEvaluation:
    src: int
    dst: int
    delta_h: float
    df: int
    statistic: float
    p_value: float
    n: float


@dataclass(frozen=True)
class TraceStep:
    step: int
    evaluation: CandidateEvaluation
    entropy_after: float


@dataclass
class LearnTrace:
    names: tuple[str, ...]
    initial_entropy: float
    steps: list[TraceStep] = field(default_factory=list)
    halt_reason: str = ""
    evaluations_per_cycle: list[int] = field(default_factory=list)


def random_order(names: Sequence[str], seed: int) -> list[str]:
    """A reproducible random total order, for when no expert order is available."""
    out = list(names)
    random.Random(seed).shuffle(out)
    return out


def resolve_order(names: Sequence[str], order: Sequence[str]) -> dict[int, int]:
    """Rank of each database column under ``order``; rejects anything but a permutation."""
    index = {n: i for i, n in enumerate(names)}
    unknown = [o for o in order if o not in index]
    if unknown:
        raise ConfigError(f"order names unknown variable(s): {', '.join(unknown)}")
    dupes = sorted({o for o in order if list(order).count(o) > 1})
    if dupes:
        raise ConfigError(f"order repeats variable(s): {', '.join(dupes)}")
    absent = [n for n in names if n not in set(order)]
    if absent:
        raise ConfigError(f"order omits variable(s): {', '.join(absent)}")
    return {index[o]: r for r, o in enumerate(order)}


# --- scoring ----------------------------------------------------------------

def _score(db: CaseDatabase, src: int, dst: int, parents: Sequence[int],
           mode: Estimator) -> CandidateEvaluation:
    arities = [v.arity for v in db.variables]
    fam = count_family(db, dst, tuple(parents) + (src,))
    n = fam.total
    df = degrees_of_freedom(arities[dst], arities[src], [arities[p] for p in parents])
    if n <= 0:
        return CandidateEvaluation(src, dst, 0.0, df, 0.0, 1.0, 0.0)
    enlarged = fam.counts
    # the new parent is least significant: fold it out over the same rows
    reduced = enlarged.reshape(-1, arities[src], arities[dst]).sum(axis=1)
    delta_h = family_entropy(reduced, mode) - family_entropy(enlarged, mode)
    statistic = 2.0 * n * delta_h
    p_value = chi_squared_survival(statistic, df) if statistic >= 0 else 1.0
    return CandidateEvaluation(src, dst, delta_h, df, statistic, p_value, n)


def evaluate_candidate(db: CaseDatabase, structure: BeliefNetwork, arc: tuple[int, int],
                       config: LearnConfig = LearnConfig()) -> CandidateEvaluation:
    """Score adding ``arc`` (indices into ``structure``) to ``structure``."""
    src, dst = arc
    if src in structure.parents[dst]:
        raise ValueError("arc already present")
    db = aligned_database(structure.structure(), db)
    return _score(db, src, dst, structure.parents[dst], Estimator(config.mode))


def _better(a: CandidateEvaluation, b: CandidateEvaluation) -> bool:
    """Lower p-value wins, then larger delta_h; near-equal values count as ties."""
    if not math.isclose(a.p_value, b.p_value, rel_tol=1e-9, abs_tol=1e-300):
        return a.p_value < b.p_value
    if not math.isclose(a.delta_h, b.delta_h, rel_tol=1e-9, abs_tol=1e-14):
        return a.delta_h > b.delta_h
    return False  # candidates arrive in canonical (src, dst) order


def _family_term(db: CaseDatabase, node: int, parents: Sequence[int], mode: Estimator) -> float:
    fam = count_family(db, node, parents)
    if fam.total <= 0:
        if mode is Estimator.DIRICHLET:
            return math.log(db.variables[node].arity)
        raise ValueError(f"family of {db.variables[node].name!r} has no complete rows")
    return family_entropy(fam.counts, mode)


def _reaches(parents: Sequence[Sequence[int]], start: int, goal: int) -> bool:
    """True when ``goal`` is an ancestor of (or equal to) ``start``."""
    stack, seen = [start], set()
    while stack:
        v = stack.pop()
        if v == goal:
            return True
        if v not in seen:
            seen.add(v)
            stack.extend(parents[v])
    return False


def kutato_learn(db: CaseDatabase, config: LearnConfig = LearnConfig(),
                 name: str = "learned") -> tuple[BeliefNetwork, LearnTrace]:
    """Learn structure and parameters from ``db``.

    Returns the network with every CPT fitted under ``config.mode`` and the
    trace of accepted arcs.  The result depends only on ``(db, config)``;
    ``config.workers`` changes speed, never output.
    """
    names = db.names
    n = len(names)
    mode = Estimator(config.mode)
    rank = None if config.learns_directions else resolve_order(names, config.order)
    parents: list[list[int]] = [[] for _ in range(n)]
    fam_h = [_family_term(db, i, (), mode) for i in range(n)]
    trace = LearnTrace(names, math.fsum(fam_h))
    pool = ThreadPoolExecutor(config.workers) if config.workers > 1 else None

    try:
        while True:
            uncapped, candidates = 0, []
            for src in range(n):
                for dst in range(n):
                    if src == dst or src in parents[dst]:
                        continue
                    if rank is not None:
                        if rank[src] > rank[dst]:
                            continue
                    elif _reaches(parents, src, dst):
                        continue
                    uncapped += 1
                    if config.max_parents is not None and len(parents[dst]) >= config.max_parents:
                        continue
                    candidates.append((src, dst))
            if not candidates:
                trace.halt_reason = HALT_MAX_PARENTS if uncapped else HALT_NO_CANDIDATES
                break

            def score(arc):
                return _score(db, arc[0], arc[1], parents[arc[1]], mode)

            evals = list(pool.map(score, candidates)) if pool else [score(c) for c in candidates]
            trace.evaluations_per_cycle.append(len(evals))
            best = evals[0]
            for ev in evals[1:]:
                if _better(ev, best):
                    best = ev
            if best.p_value > config.alpha:
                trace.halt_reason = HALT_NOT_SIGNIFICANT
                break
            if best.delta_h <= config.min_delta:
                trace.halt_reason = HALT_MIN_DELTA
                break
            parents[best.dst].append(best.src)
            fam_h[best.dst] = _family_term(db, best.dst, parents[best.dst], mode)
            trace.steps.append(TraceStep(len(trace.steps) + 1, best, math.fsum(fam_h)))
    finally:
        if pool:
            pool.shutdown()

    variables: tuple[Variable, ...] = db.variables
    structure = BeliefNetwork(name, variables, [sorted(ps) for ps in parents])
    return fit_parameters(structure, db, mode), trace


def trace_entropies(trace: LearnTrace) -> np.ndarray:
    return np.array([trace.initial_entropy] + [s.entropy_after for s in trace.steps])
