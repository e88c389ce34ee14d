"""Counter-based random streams keyed by tree position.

Every vertex of the binary tree owns a 64-bit key derived from
(master seed, replica index, branch word).  The key determines both the
vertex's unit-exponential clock and the stream that drives its children's
state transitions, so a vertex draws exactly the same randomness no matter
in which order the tree is expanded.  That is what makes depth-monotonicity
of the minimal path sum and greedy-path domination testable on a shared
realization, and it makes replica-level parallelism bit-reproducible.

Clocks and state transitions are decoupled by distinct stream tags: the
clock of a vertex never changes when a kernel consumes a different number
of state draws.

The generator is the splitmix64 finalizer used in counter mode.  The pure
Python implementation here is the reference; the compiled engine inlines
the identical arithmetic and must match it bit for bit.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

# splitmix64 increment and finalizer multipliers
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB

# Stream/derivation tags (hex digits of pi; arbitrary distinct constants).
CLOCK_TAG = 0x243F6A8885A308D3
STATE_TAG = 0x13198A2E03707344
CHILD1_TAG = 0xA4093822299F31D0
CHILD2_TAG = 0x082EFA98EC4E6C89
KARY_TAG = 0x452821E638D01377
REPLICA_MUL = 0xD1342543DE82EF95
SEED_SALT = 0x5851F42D4C957F2D

_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit words."""
    z &= MASK64
    z ^= z >> 30
    z = (z * _MUL1) & MASK64
    z ^= z >> 27
    z = (z * _MUL2) & MASK64
    z ^= z >> 31
    return z


def root_key(seed: int, replica: int = 0) -> int:
    """Key of the root vertex for a given (master seed, replica index)."""
    k = mix64(((seed & MASK64) ^ SEED_SALT) + GOLDEN)
    return mix64(k ^ ((replica * REPLICA_MUL) & MASK64))


def child_key(key: int, branch: int) -> int:
    """Key of child 1 or 2 of the vertex owning ``key``."""
    if branch == 1:
        return mix64(key ^ CHILD1_TAG)
    if branch == 2:
        return mix64(key ^ CHILD2_TAG)
    raise ValueError(f"branch must be 1 or 2, got {branch}")


def kary_child_key(key: int, j: int) -> int:
    """Key of the j-th child (j >= 1) on a tree with arbitrary arity.

    Used by the reduced-tree inspection, where offspring counts exceed 2.
    """
    if j < 1:
        raise ValueError("child index must be >= 1")
    return mix64((key ^ KARY_TAG) + ((j * GOLDEN) & MASK64))


def u01(z: int) -> float:
    """Map a 64-bit word to the open interval (0, 1)."""
    return ((z >> 11) + 0.5) * _INV_2_53


def clock_of(key: int) -> float:
    """Unit-mean exponential clock of the vertex owning ``key``.

    Strictly positive: the underlying uniform never hits 0 or 1.
    """
    return -math.log(u01(mix64(key ^ CLOCK_TAG)))


class StateStream:
    """Counter-based uniform stream driving one vertex's state transitions.

    Draws are independent of the vertex clock (different tag) and of every
    other vertex's stream.  Kernels consume a deterministic, kernel-specific
    number of draws per call, which keeps realizations shareable between
    probes.
    """

    __slots__ = ("_base", "_i")

    def __init__(self, key: int):
        self._base = (key ^ STATE_TAG) & MASK64
        self._i = 0

    def next_u01(self) -> float:
        self._i += 1
        return u01(mix64((self._base + self._i * GOLDEN) & MASK64))

    def next_exp(self, rate: float = 1.0) -> float:
        return -math.log(self.next_u01()) / rate

    @property
    def draws(self) -> int:
        return self._i
