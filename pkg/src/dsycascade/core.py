"""Event-driven cascade sampling and the three explosion probes.

The probes are: the population seen at a fixed time horizon, the minimal
cumulative holding time over all depth-n paths, and the holding-time sum
along the greedy path of stepwise maximal intensities.  All three consume
the per-vertex keyed streams from :mod:`dsycascade.rng`, so on a fixed
(seed, replica) they observe the same realization of clocks and states,
whichever probe runs first and whichever backend executes it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend, rng
from .errors import DepthCapError
from .kernels import KernelSpec
from .vertex import MAX_GENERATION

ZETA_DEPTH_CAP = 25
DEFAULT_NODE_BUDGET = 20_000_000

EXPLOSION_LIKELY = "explosion-likely"
NON_EXPLOSION_LIKELY = "non-explosion-likely"


@dataclass(frozen=True)
class PopulationTrace:
    """Outcome of expanding a cascade to a fixed time horizon.

    ``population`` is the count of particles alive at the horizon, or the
    live count at the moment the vertex cap was hit.  ``verdict`` is a
    heuristic label, not a decision procedure: hitting the cap before the
    horizon suggests explosion, finishing the expansion suggests the
    opposite, and neither is proof.
    """
    horizon: float
    population: int
    vertex_cap_hit: bool
    births: Optional[np.ndarray]  # structured columns (birth_time, generation)
    expansions: int
    max_generation: int

    @property
    def verdict(self) -> str:
        return EXPLOSION_LIKELY if self.vertex_cap_hit else NON_EXPLOSION_LIKELY


@dataclass(frozen=True)
class GreedyPathSample:
    """Partial sum along the path with stepwise maximal intensities."""
    partial_sum: float
    terms_used: int
    converged: bool
    kappa_hat: float
    intensities: np.ndarray
    terms: np.ndarray

    def truncated_sum(self, depth: int) -> float:
        """Partial sum over the first depth+1 terms (a depth-n path bound)."""
        if depth + 1 > self.terms_used:
            raise ValueError("greedy path was not followed that deep")
        return float(self.terms[:depth + 1].sum())


@dataclass(frozen=True)
class ZetaCurve:
    """Minimal path sums per depth on one realization."""
    values: np.ndarray
    reached: int
    stopped_early: bool
    nodes: int

    def value_at(self, n: int) -> float:
        if n > self.reached:
            raise ValueError(f"curve only reaches depth {self.reached}")
        return float(self.values[n])

    def first_small_increment(self, gap: int, tol: float) -> Optional[int]:
        """Smallest n with zeta_n - zeta_{n-gap} < tol, if any."""
        for n in range(gap, self.reached + 1):
            if self.values[n] - self.values[n - gap] < tol:
                return n
        return None


def _resolve(kernel: KernelSpec, initial_state: float):
    kernel.validate_state(initial_state)
    which, engine = backend.engine_for(kernel)
    return which, engine


def simulate_to_horizon(kernel: KernelSpec, initial_state: float, t: float,
                        vertex_cap: int, seed: int, *, replica: int = 0,
                        record_births: bool = False,
                        gen_cap: int = MAX_GENERATION) -> PopulationTrace:
    """Expand the cascade in death-time order until the horizon t.

    A vertex whose death time reaches t is a leaf counted in the population.
    Deterministic given (seed, replica): vertices draw their clocks and
    child states from position-keyed streams.
    """
    if not t > 0:
        raise ValueError("horizon must be positive")
    if vertex_cap < 1:
        raise ValueError("vertex_cap must be >= 1")
    which, engine = _resolve(kernel, initial_state)
    key = rng.root_key(seed, replica)
    if which == "native":
        out = engine.horizon(kernel.engine_kind, kernel.engine_params,
                             initial_state, t, vertex_cap, key,
                             record_births, gen_cap)
    else:
        out = engine.horizon(kernel, initial_state, t, vertex_cap, key,
                             record_births, gen_cap)
    population, cap_hit, expansions, max_gen, births_t, births_g = out
    births = None
    if record_births:
        births = np.rec.fromarrays(
            [np.asarray(births_t, dtype=np.float64),
             np.asarray(births_g, dtype=np.int32)],
            names=("birth_time", "generation"))
    return PopulationTrace(
        horizon=t, population=population, vertex_cap_hit=cap_hit,
        births=births, expansions=expansions, max_generation=max_gen)


def zeta_curve(kernel: KernelSpec, initial_state: float, n_max: int, seed: int,
               *, replica: int = 0, stop_gap: int = 0, stop_tol: float = 0.0,
               node_budget: int = DEFAULT_NODE_BUDGET,
               enforce_depth_cap: bool = True) -> ZetaCurve:
    """Minimal path sums zeta_0..zeta_{n_max} on one realization.

    Computed by best-first expansion in partial-sum order, which visits only
    vertices whose sum lies below the answer; the values are exactly the
    full-expansion minima.  With stop_gap > 0 the curve is cut at the first
    depth n where zeta_n - zeta_{n-stop_gap} < stop_tol.
    """
    if n_max < 0:
        raise ValueError("depth must be nonnegative")
    if enforce_depth_cap and n_max > ZETA_DEPTH_CAP:
        raise DepthCapError(
            f"depth {n_max} exceeds the supported cap {ZETA_DEPTH_CAP}")
    which, engine = _resolve(kernel, initial_state)
    key = rng.root_key(seed, replica)
    if which == "native":
        zetas, reached, stopped, pops = engine.zeta_curve(
            kernel.engine_kind, kernel.engine_params, initial_state,
            n_max, stop_gap, stop_tol, node_budget, key)
    else:
        zetas, reached, stopped, pops = engine.zeta_curve(
            kernel, initial_state, n_max, key, stop_gap, stop_tol, node_budget)
    return ZetaCurve(values=np.asarray(zetas, dtype=np.float64),
                     reached=reached, stopped_early=stopped, nodes=pops)


def zeta_n(kernel: KernelSpec, initial_state: float, n: int, seed: int, *,
           replica: int = 0, node_budget: int = DEFAULT_NODE_BUDGET) -> float:
    """Minimum over all depth-n vertices of the cumulative holding times
    (n+1 terms including the root's).  Nondecreasing in n on a fixed
    (seed, replica).  Depths above 25 are refused."""
    curve = zeta_curve(kernel, initial_state, n, seed, replica=replica,
                       node_budget=node_budget)
    return curve.value_at(n)


def greedy_zeta(kernel: KernelSpec, initial_state: float, term_cap: int,
                tail_tol: float, seed: int, *, replica: int = 0) -> GreedyPathSample:
    """Sum holding times along the path that always follows the child of
    larger intensity.

    The sum is an upper bound for the explosion time on the same
    realization.  Convergence is declared when the geometric tail estimate
    (last term times kappa_hat/(1-kappa_hat), with kappa_hat the observed
    mean ratio of consecutive inverse intensities) falls below tail_tol.
    """
    if term_cap < 1:
        raise ValueError("term_cap must be >= 1")
    if not tail_tol > 0:
        raise ValueError("tail_tol must be positive")
    which, engine = _resolve(kernel, initial_state)
    key = rng.root_key(seed, replica)
    if which == "native":
        partial, used, converged, kappa_hat, intens, terms = engine.greedy(
            kernel.engine_kind, kernel.engine_params, initial_state,
            term_cap, tail_tol, key)
    else:
        partial, used, converged, kappa_hat, intens, terms = engine.greedy(
            kernel, initial_state, term_cap, tail_tol, key)
    return GreedyPathSample(
        partial_sum=partial, terms_used=used, converged=converged,
        kappa_hat=kappa_hat,
        intensities=np.asarray(intens, dtype=np.float64),
        terms=np.asarray(terms, dtype=np.float64))
