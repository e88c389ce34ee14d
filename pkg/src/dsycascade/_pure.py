"""Pure-Python cascade engine.

Reference implementation of the three hot operations (horizon expansion,
minimal path sums by best-first search, greedy fastest path).  The compiled
engine in ``_engine.pyx`` implements the same algorithms with the same
arithmetic; both must produce bit-identical results from equal inputs, which
the backend test suite enforces.  This module also serves arbitrary Python
kernels that have no compiled dispatch entry.

Heap entries are ordered by (priority, insertion index), a total order, so
the pop sequence is implementation-independent.
"""

from __future__ import annotations

import math
from heapq import heappop, heappush

from .errors import GenerationCapError, NodeBudgetError, SamplingFailureError
from .rng import StateStream, child_key, clock_of
from .vertex import MAX_GENERATION

DEFAULT_NODE_BUDGET = 20_000_000


def horizon(kernel, a, t, vertex_cap, root_key, record_births=False,
            gen_cap=MAX_GENERATION):
    """Expand the cascade to time horizon t in death-time order.

    Returns (population, cap_hit, expansions, max_generation,
    birth_times, birth_generations); the birth lists are None unless
    requested.  A vertex whose death time reaches t is a leaf counted in
    the population; expansion stops early once the live population reaches
    vertex_cap.
    """
    lam = kernel.intensity
    live = 1
    survivors = 0
    expansions = 0
    max_gen = 0
    births_t = [0.0] if record_births else None
    births_g = [0] if record_births else None
    cap_hit = live >= vertex_cap
    if not cap_hit:
        heap = [(clock_of(root_key) / lam(a), 0, 0, a, root_key)]
        seq = 1
        while heap:
            death, _, g, x, key = heappop(heap)
            if death >= t:
                survivors += 1
                continue
            if g + 1 > gen_cap:
                raise GenerationCapError(
                    f"expansion reached generation cap {gen_cap}")
            try:
                c1, c2 = kernel.child_sampler(x, StateStream(key))
            except SamplingFailureError as exc:
                raise SamplingFailureError(
                    str(exc.args[0]) if exc.args else "sampler failed",
                    generation=g, key=key) from None
            for branch, cx in ((1, c1), (2, c2)):
                ck = child_key(key, branch)
                heappush(heap, (death + clock_of(ck) / lam(cx), seq, g + 1, cx, ck))
                seq += 1
            expansions += 1
            live += 1
            if g + 1 > max_gen:
                max_gen = g + 1
            if record_births:
                births_t.append(death)
                births_t.append(death)
                births_g.append(g + 1)
                births_g.append(g + 1)
            if live >= vertex_cap:
                cap_hit = True
                break
    population = live if cap_hit else survivors
    return population, cap_hit, expansions, max_gen, births_t, births_g


def zeta_curve(kernel, a, n_max, root_key, stop_gap=0, stop_tol=0.0,
               node_budget=DEFAULT_NODE_BUDGET):
    """Minimal path sums zeta_0..zeta_n by best-first (uniform-cost) search.

    Nodes are expanded in increasing partial-sum order, so the first node
    popped at a given depth carries that depth's exact minimum; only nodes
    with partial sum below the answer are ever expanded.  With stop_gap > 0
    the search ends at the first depth g where
    zeta_g - zeta_{g-stop_gap} < stop_tol.

    Returns (zetas, reached, stopped_early, pops).
    """
    lam = kernel.intensity
    zetas = [math.nan] * (n_max + 1)
    found = [False] * (n_max + 1)
    heap = [(clock_of(root_key) / lam(a), 0, 0, a, root_key)]
    seq = 1
    pops = 0
    while heap:
        s, _, g, x, key = heappop(heap)
        pops += 1
        if not found[g]:
            found[g] = True
            zetas[g] = s
            if g == n_max:
                return zetas, g, False, pops
            if (stop_gap and g >= stop_gap and found[g - stop_gap]
                    and s - zetas[g - stop_gap] < stop_tol):
                return zetas[:g + 1], g, True, pops
        if g == n_max:
            continue
        try:
            c1, c2 = kernel.child_sampler(x, StateStream(key))
        except SamplingFailureError as exc:
            raise SamplingFailureError(
                str(exc.args[0]) if exc.args else "sampler failed",
                generation=g, key=key) from None
        for branch, cx in ((1, c1), (2, c2)):
            ck = child_key(key, branch)
            heappush(heap, (s + clock_of(ck) / lam(cx), seq, g + 1, cx, ck))
            seq += 1
        if seq > node_budget:
            raise NodeBudgetError(
                f"best-first search exceeded its node budget ({node_budget})")
    raise AssertionError("unreachable: binary tree search ran out of nodes")


def greedy(kernel, a, term_cap, tail_tol, root_key):
    """Follow the path of stepwise maximal intensities and sum its
    holding times.

    Returns (partial_sum, terms_used, converged, kappa_hat, intensities,
    terms).  kappa_hat is the running mean of consecutive ratios of inverse
    intensities; the search declares convergence once the geometric tail
    estimate last_term * kappa_hat/(1 - kappa_hat) drops below tail_tol.
    """
    lam = kernel.intensity
    key = root_key
    x = a
    z = lam(a)
    term = clock_of(key) / z
    partial = term
    intensities = [z]
    terms = [term]
    ratio_sum = 0.0
    kappa_hat = math.nan
    converged = False
    for j in range(1, term_cap):
        c1, c2 = kernel.child_sampler(x, StateStream(key))
        l1 = lam(c1)
        l2 = lam(c2)
        if l1 >= l2:
            branch, x, z_new = 1, c1, l1
        else:
            branch, x, z_new = 2, c2, l2
        key = child_key(key, branch)
        term = clock_of(key) / z_new
        partial += term
        ratio_sum += z / z_new
        z = z_new
        intensities.append(z)
        terms.append(term)
        kappa_hat = ratio_sum / j
        if kappa_hat < 1.0 and term * kappa_hat / (1.0 - kappa_hat) < tail_tol:
            converged = True
            break
    return partial, len(terms), converged, kappa_hat, intensities, terms
