"""Addressing of binary-tree vertices.

A vertex is a finite word over {1, 2}; the empty word is the root.  Words
are packed one bit per generation step (0 for branch 1, 1 for branch 2)
alongside an explicit generation count, so prefix and concatenation are
integer operations.  The generation count is capped at 2**10 to bound
memory in pathological inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rng

MAX_GENERATION = 1 << 10


@dataclass(frozen=True, slots=True)
class Vertex:
    depth: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_GENERATION:
            raise ValueError(f"depth must be in [0, {MAX_GENERATION}]")
        if self.bits >> self.depth:
            raise ValueError("branch word has bits beyond its depth")

    @classmethod
    def root(cls) -> "Vertex":
        return cls(0, 0)

    @classmethod
    def from_word(cls, word) -> "Vertex":
        """Build from an iterable of symbols in {1, 2} (or a '12'-string)."""
        bits = 0
        depth = 0
        for sym in word:
            s = int(sym)
            if s not in (1, 2):
                raise ValueError(f"word symbols must be 1 or 2, got {sym!r}")
            bits |= (s - 1) << depth
            depth += 1
        return cls(depth, bits)

    def child(self, branch: int) -> "Vertex":
        if branch not in (1, 2):
            raise ValueError("branch must be 1 or 2")
        return Vertex(self.depth + 1, self.bits | ((branch - 1) << self.depth))

    def parent(self) -> "Vertex":
        if self.depth == 0:
            raise ValueError("root has no parent")
        return self.prefix(self.depth - 1)

    def prefix(self, j: int) -> "Vertex":
        """Truncation v|j to the first j symbols."""
        if not 0 <= j <= self.depth:
            raise ValueError(f"prefix length {j} out of range for depth {self.depth}")
        return Vertex(j, self.bits & ((1 << j) - 1))

    def concat(self, other: "Vertex") -> "Vertex":
        """Concatenation u*v; depth adds."""
        return Vertex(self.depth + other.depth, self.bits | (other.bits << self.depth))

    def is_prefix_of(self, other: "Vertex") -> bool:
        return (self.depth <= other.depth
                and other.bits & ((1 << self.depth) - 1) == self.bits)

    def symbol(self, j: int) -> int:
        """The j-th branch symbol (1-indexed) in {1, 2}."""
        if not 1 <= j <= self.depth:
            raise ValueError("symbol index out of range")
        return 1 + ((self.bits >> (j - 1)) & 1)

    def word(self) -> tuple[int, ...]:
        return tuple(self.symbol(j) for j in range(1, self.depth + 1))

    def key(self, root_key: int) -> int:
        """Stream key of this vertex under the given root key."""
        k = root_key
        for j in range(1, self.depth + 1):
            k = rng.child_key(k, self.symbol(j))
        return k

    def __len__(self) -> int:
        return self.depth

    def __str__(self) -> str:
        return "".join(str(s) for s in self.word()) or "<root>"
