"""Inspection process, passage cutsets, and reduced-tree inspection.

The inspection process walks the tree generation by generation and keeps
the vertices whose states have avoided the absorbing set A since the root
(the root itself always passes).  Its survivor counts Z_n form a
nonhomogeneous Galton-Watson process with E Z_n = 2^n I_n, where I_n is the
single-path avoidance probability; under cutset recurrence the process is
subcritical and dies out.

Passage cutsets are built by iterating the inspection: the k-th cutset
collects, below each member of the (k-1)-th, the first vertices whose state
re-enters A.  All exploration shares the per-vertex stream keying of the
cascade core, so cutset structure and explosion probes can be computed on
the same realization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import rng
from .kernels import KernelSpec
from .stats import mean_se
from .vertex import MAX_GENERATION, Vertex

INSPECTION_VERTEX_BUDGET = 10**6


@dataclass(frozen=True)
class InspectionTrace:
    """Per-generation survivor counts of one inspection run."""
    generations: tuple[int, ...]  # Z_0 = 1, Z_1, ...
    stopped: bool
    stop_generation: Optional[int]


@dataclass(frozen=True)
class PassageCutset:
    """The k-th passage set: first re-entries into A below the previous one.

    Members form an antichain; on the explored realization every boundary
    path meets the completed set exactly once.  ``complete`` is False when
    the vertex budget cut the exploration short.
    """
    index: int
    members: frozenset[Vertex]
    complete: bool

    @property
    def cardinality(self) -> int:
        return len(self.members)

    @property
    def max_depth(self) -> int:
        return max((v.depth for v in self.members), default=0)


def run_inspection(kernel: KernelSpec, a: float, A: Callable[[float], bool],
                   gen_cap: int, seed: int, *, replica: int = 0,
                   vertex_budget: int = INSPECTION_VERTEX_BUDGET) -> InspectionTrace:
    """Survivor counts Z_0..Z_gen_cap of the inspection process.

    A child survives iff its state lies outside A; the root passes without
    inspection.  The trace is truncated at gen_cap when the process has not
    yet died out.
    """
    if gen_cap < 1:
        raise ValueError("gen_cap must be >= 1")
    kernel.validate_state(a)
    frontier = [(rng.root_key(seed, replica), a)]
    counts = [1]
    inspected = 0
    for gen in range(1, gen_cap + 1):
        nxt = []
        for key, x in frontier:
            c1, c2 = kernel.child_sampler(x, rng.StateStream(key))
            inspected += 2
            if not A(c1):
                nxt.append((rng.child_key(key, 1), c1))
            if not A(c2):
                nxt.append((rng.child_key(key, 2), c2))
        counts.append(len(nxt))
        frontier = nxt
        if not frontier:
            return InspectionTrace(tuple(counts), True, gen)
        if inspected > vertex_budget:
            raise RuntimeError(
                f"inspection exceeded its vertex budget ({vertex_budget}); "
                "the absorbing set looks supercritical")
    return InspectionTrace(tuple(counts), False, None)


def _first_passage(kernel, A, roots, budget):
    """First re-entries into A below each of the given subtree roots.

    ``roots`` are (vertex, key, state) triples whose own states are not
    inspected.  Returns (members, complete) where members carry the
    (vertex, key, state) of each cutset element.
    """
    members = []
    stack = list(roots)
    explored = 0
    while stack:
        v, key, x = stack.pop()
        explored += 1
        if explored > budget:
            return members, False
        if v.depth + 1 > MAX_GENERATION:
            raise RuntimeError("passage exploration reached the generation cap")
        c1, c2 = kernel.child_sampler(x, rng.StateStream(key))
        for branch, cx in ((1, c1), (2, c2)):
            cv = v.child(branch)
            ck = rng.child_key(key, branch)
            if A(cx):
                members.append((cv, ck, cx))
            else:
                stack.append((cv, ck, cx))
    return members, True


def passage_cutsets(kernel: KernelSpec, a: float, A: Callable[[float], bool],
                    k_max: int, vertex_cap: int, seed: int, *,
                    replica: int = 0) -> list[PassageCutset]:
    """Passage cutsets of orders 1..k_max by iterated inspection.

    Each member of the k-th cutset roots an independent inspection whose
    stopping vertices form the (k+1)-th.  If an exploration exceeds
    vertex_cap the current cutset is returned incomplete and iteration
    stops there.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if vertex_cap < 1:
        raise ValueError("vertex_cap must be >= 1")
    kernel.validate_state(a)
    out: list[PassageCutset] = []
    roots = [(Vertex.root(), rng.root_key(seed, replica), a)]
    for k in range(1, k_max + 1):
        members, complete = _first_passage(kernel, A, roots, vertex_cap)
        out.append(PassageCutset(
            index=k, members=frozenset(m[0] for m in members),
            complete=complete))
        if not complete:
            break
        roots = members
    return out


def uniform_offspring(lo: int, hi: int) -> Callable[[rng.StateStream], int]:
    """Offspring-count sampler uniform on {lo, ..., hi}."""
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    span = hi - lo + 1

    def sampler(stream: rng.StateStream) -> int:
        return lo + int(stream.next_u01() * span)

    return sampler


def admissible_epsilon_bound(nu: float) -> float:
    """Largest admissible inspection threshold, log(nu/(nu-1))."""
    if not nu > 1:
        raise ValueError("offspring mean bound must exceed 1")
    return math.log(nu / (nu - 1.0))


def reduced_tree_inspection(offspring_sampler: Callable[[rng.StateStream], int],
                            nu: float, epsilon: Optional[float], gen_cap: int,
                            seed: int, *, replica: int = 0,
                            vertex_budget: int = INSPECTION_VERTEX_BUDGET
                            ) -> InspectionTrace:
    """Inspection on a random tree with bounded conditional offspring means.

    A vertex survives iff its unit-exponential clock is at most epsilon;
    with delta = 1 - e^{-epsilon} the survivor counts satisfy
    E V_{n+1} <= (delta nu) E V_n, subcritical precisely on the admissible
    range 0 < epsilon < log(nu/(nu-1)).  epsilon defaults to half the
    admissible maximum.
    """
    bound = admissible_epsilon_bound(nu)
    if epsilon is None:
        epsilon = bound / 2.0
    if not 0.0 < epsilon < bound:
        raise ValueError(
            f"epsilon must lie in (0, {bound:.6g}) for nu={nu}, got {epsilon}")
    if gen_cap < 1:
        raise ValueError("gen_cap must be >= 1")
    frontier = [rng.root_key(seed, replica)]
    counts = [1]
    inspected = 0
    for gen in range(1, gen_cap + 1):
        nxt = []
        for key in frontier:
            k_v = offspring_sampler(rng.StateStream(key))
            for j in range(1, k_v + 1):
                ck = rng.kary_child_key(key, j)
                inspected += 1
                if rng.clock_of(ck) <= epsilon:
                    nxt.append(ck)
        counts.append(len(nxt))
        frontier = nxt
        if not frontier:
            return InspectionTrace(tuple(counts), True, gen)
        if inspected > vertex_budget:
            raise RuntimeError(
                f"reduced-tree inspection exceeded its budget ({vertex_budget})")
    return InspectionTrace(tuple(counts), False, None)


@dataclass(frozen=True)
class CutsetBoundRow:
    k: int
    mean_cardinality: float
    se: float
    bound: float
    satisfied: bool  # mean <= bound + 3 SE


@dataclass(frozen=True)
class CutsetBoundReport:
    mu: float
    replicas: int
    rows: tuple[CutsetBoundRow, ...]
    incomplete_replicas: int

    @property
    def all_satisfied(self) -> bool:
        return all(r.satisfied for r in self.rows)


def verify_cutset_cardinality_bound(kernel: KernelSpec, a: float,
                                    A: Callable[[float], bool],
                                    psi: Callable[[float], float], r: float,
                                    k: int, replicas: int, seed: int, *,
                                    M: float,
                                    vertex_cap: int = INSPECTION_VERTEX_BUDGET
                                    ) -> CutsetBoundReport:
    """Monte Carlo check of E[card of the k-th passage cutset] <= mu^k
    with mu = 2 + M * 2r/(r-2).

    M must bound psi on A union {a}; it is the analyst's input, not
    inferred.  Replicas whose exploration hit the vertex cap are excluded
    from the means and counted separately.
    """
    if r <= 2:
        raise ValueError("the bound needs r > 2")
    if M < psi(a):
        raise ValueError("M must dominate psi at the initial state")
    mu = 2.0 + M * 2.0 * r / (r - 2.0)
    cards = [[] for _ in range(k)]
    incomplete = 0
    for rep in range(replicas):
        sets = passage_cutsets(kernel, a, A, k, vertex_cap, seed, replica=rep)
        if len(sets) < k or not all(s.complete for s in sets):
            incomplete += 1
            continue
        for j in range(k):
            cards[j].append(sets[j].cardinality)
    rows = []
    for j in range(k):
        mean, se = mean_se(cards[j])
        bound = mu ** (j + 1)
        rows.append(CutsetBoundRow(
            k=j + 1, mean_cardinality=mean, se=se, bound=bound,
            satisfied=mean <= bound + 3.0 * se))
    return CutsetBoundReport(mu=mu, replicas=replicas, rows=tuple(rows),
                             incomplete_replicas=incomplete)
