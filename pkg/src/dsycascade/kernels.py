"""Branching Markov kernel contracts.

A kernel specifies a state space, an intensity map and a two-child joint
sampler; optionally a path-marginal transition density p(x, y).  Along every
root-to-boundary path the states form a time-homogeneous Markov chain with
transition p, while the two children of a vertex follow the kernel's joint
law.  The single-path marginal sampler is exposed separately from the joint
sampler because path statistics (the avoidance probabilities I_n) depend on
the marginal only.

Kernels are immutable after construction and take an explicit stream handle,
so they can be shared freely between concurrently running replicas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import rng
from .stats import wilson_interval

# Native-engine dispatch ids.  A kernel without an id runs on the pure
# Python engine only.
ENGINE_ALPHA_RICCATI = 0
ENGINE_MEAN_FIELD_EXP = 1
ENGINE_GEOMETRIC_LIKE = 2
ENGINE_BIRTH_DEATH = 3
ENGINE_KPP = 4
ENGINE_BESSEL3 = 5
ENGINE_NSE_SELFSIMILAR = 6
ENGINE_COMPLEX_BURGERS = 7


@dataclass(frozen=True)
class KernelSpec:
    """A branching Markov kernel.

    ``child_sampler(x, stream)`` draws the joint pair (X_{v*1}, X_{v*2})
    given X_v = x; ``intensity`` is the positive rate map driving the
    exponential holding times.  ``density`` is the path-marginal transition
    density p(x, y) when one is available in closed form.

    ``independence_flag`` records whether the two child subtrees are built
    conditionally independently given the pair of child states;
    ``joint_homogeneity_flag`` records whether the joint child law depends
    on the parent only through its state.
    """

    state_kind: str  # "positive_real" | "positive_integer" | "real"
    intensity: Callable[[float], float]
    child_sampler: Callable[[float, rng.StateStream], tuple[float, float]]
    density: Optional[Callable[[float, float], float]] = None
    independence_flag: bool = True
    joint_homogeneity_flag: bool = True
    engine_kind: Optional[int] = None
    engine_params: tuple[float, ...] = ()

    def marginal_sampler(self, x: float, stream: rng.StateStream) -> float:
        """One step of the path-marginal chain (the first-child state)."""
        return self.child_sampler(x, stream)[0]

    def path_step(self, x: float, stream: rng.StateStream, branch: int = 1) -> float:
        """One step of the path chain along the given branch (1 or 2)."""
        pair = self.child_sampler(x, stream)
        return pair[branch - 1]

    def validate_state(self, x: float) -> None:
        if self.state_kind in ("positive_real", "positive_integer") and not x > 0:
            raise ValueError(f"state must be positive, got {x}")
        if self.state_kind == "positive_integer" and x != int(x):
            raise ValueError(f"state must be integral, got {x}")
        if not math.isfinite(x):
            raise ValueError("state must be finite")


def _selfsimilar_children(ratio_joint, intensity):
    def child_sampler(x, stream):
        r1, r2 = ratio_joint(stream)
        return x * r1, x * r2
    return child_sampler


@dataclass(frozen=True)
class SelfSimilarKernel(KernelSpec):
    """Kernel whose path chain is a multiplicative random walk.

    Children are (x*R1, x*R2) with the joint ratio law independent of x;
    both marginals of (R1, R2) equal the law sampled by ``ratio_sampler``,
    and successive ratios along any fixed path are i.i.d.
    """

    ratio_sampler: Callable[[rng.StateStream], float] = None
    joint_ratio_sampler: Callable[[rng.StateStream], tuple[float, float]] = None
    ratio_density: Optional[Callable[[float], float]] = None


def make_selfsimilar(intensity, joint_ratio_sampler, *, ratio_density=None,
                     independence_flag=True, engine_kind=None, engine_params=(),
                     state_kind="positive_real") -> SelfSimilarKernel:
    """Assemble a SelfSimilarKernel from its ratio law."""
    return SelfSimilarKernel(
        state_kind=state_kind,
        intensity=intensity,
        child_sampler=_selfsimilar_children(joint_ratio_sampler, intensity),
        density=None,
        independence_flag=independence_flag,
        joint_homogeneity_flag=True,
        engine_kind=engine_kind,
        engine_params=tuple(engine_params),
        ratio_sampler=lambda stream: joint_ratio_sampler(stream)[0],
        joint_ratio_sampler=joint_ratio_sampler,
        ratio_density=ratio_density,
    )


def sample_children(kernel: KernelSpec, x: float,
                    stream: rng.StateStream) -> tuple[float, float]:
    """Draw the joint child pair of a vertex in state x."""
    kernel.validate_state(x)
    return kernel.child_sampler(x, stream)


def below_threshold(c: float) -> Callable[[float], bool]:
    """The absorbing set A = (0, c] for scalar state spaces."""
    return lambda x: x <= c


def everything() -> Callable[[float], bool]:
    """The absorbing set A = entire state space."""
    return lambda x: True


PATH_ALL_ONES = "1"
PATH_ALTERNATING = "12"


@dataclass(frozen=True)
class AvoidanceRow:
    """Monte Carlo estimate of I_n(a, A) for one n."""
    n: int
    estimate: float
    wilson_low: float
    wilson_high: float
    bound: float
    consistent: bool  # Wilson lower bound does not exceed psi(a) * r**-n


@dataclass(frozen=True)
class AvoidanceReport:
    """Report of verify_E_condition.

    The cutset-recurrence condition quantifies over every initial state;
    a Monte Carlo run can only spot-check the states listed in
    ``checked_states``.
    """
    initial_state: float
    r: float
    psi_at_a: float
    n_max: int
    replicas: int
    rows: tuple[AvoidanceRow, ...]
    path_pattern: str
    checked_states: tuple[float, ...]

    @property
    def all_consistent(self) -> bool:
        return all(row.consistent for row in self.rows)


def estimate_avoidance(kernel: KernelSpec, a: float, A: Callable[[float], bool],
                       n_max: int, replicas: int, seed: int,
                       path_pattern: str = PATH_ALL_ONES) -> np.ndarray:
    """Survival counts of the path chain: out[n-1] = #replicas with
    X_1, ..., X_n all outside A, estimated along the given branch pattern.

    Walks the actual tree realization keyed by (seed, replica): at every
    vertex the joint pair is drawn and the branch prescribed by the pattern
    is followed, which is exactly the path-marginal chain.
    """
    counts = np.zeros(n_max, dtype=np.int64)
    pattern = [int(ch) for ch in path_pattern]
    for rep in range(replicas):
        key = rng.root_key(seed, rep)
        x = a
        for n in range(n_max):
            branch = pattern[n % len(pattern)]
            pair = kernel.child_sampler(x, rng.StateStream(key))
            x = pair[branch - 1]
            key = rng.child_key(key, branch)
            if A(x):
                break
            counts[n] += 1
    return counts


def verify_E_condition(kernel: KernelSpec, a: float, A: Callable[[float], bool],
                       psi: Callable[[float], float], r: float, n_max: int,
                       replicas: int, seed: int = 0,
                       path_pattern: str = PATH_ALL_ONES) -> AvoidanceReport:
    """Spot-check the cutset-recurrence bound I_n(a, A) <= psi(a) r**-n.

    Estimates I_n by Monte Carlo along a single path for n = 1..n_max and
    reports, with Wilson confidence intervals, whether each estimate is
    statistically consistent with the bound.
    """
    if r <= 2:
        raise ValueError("cutset recurrence requires r > 2")
    if n_max < 1 or replicas < 1:
        raise ValueError("n_max and replicas must be >= 1")
    kernel.validate_state(a)
    counts = estimate_avoidance(kernel, a, A, n_max, replicas, seed, path_pattern)
    psi_a = psi(a)
    rows = []
    for n in range(1, n_max + 1):
        k = int(counts[n - 1])
        lo, hi = wilson_interval(k, replicas)
        bound = psi_a * r ** (-n)
        rows.append(AvoidanceRow(
            n=n, estimate=k / replicas, wilson_low=lo, wilson_high=hi,
            bound=bound, consistent=lo <= bound,
        ))
    return AvoidanceReport(
        initial_state=a, r=r, psi_at_a=psi_a, n_max=n_max, replicas=replicas,
        rows=tuple(rows), path_pattern=path_pattern, checked_states=(a,),
    )
