"""Exception types shared across the package."""

from __future__ import annotations


class CascadeError(Exception):
    """Base class for all package-specific errors."""


class SamplingFailureError(CascadeError):
    """A kernel sampler gave up (e.g. rejection-iteration cap exceeded).

    Carries the address of the offending vertex: generation, the low bits of
    the packed branch word (exact for generations <= 64), and the vertex key.
    """

    def __init__(self, message: str, *, generation: int | None = None,
                 word_bits: int | None = None, key: int | None = None):
        parts = [message]
        if generation is not None:
            parts.append(f"generation={generation}")
        if word_bits is not None and generation is not None:
            n = min(generation, 64)
            word = "".join("12"[(word_bits >> i) & 1] for i in range(n))
            if generation > 64:
                word += "..."
            parts.append(f"vertex={word or 'root'}")
        if key is not None:
            parts.append(f"key=0x{key:016x}")
        super().__init__("; ".join(parts))
        self.generation = generation
        self.word_bits = word_bits
        self.key = key


class DepthCapError(CascadeError):
    """A depth-n probe was refused because n exceeds the supported cap."""


class GenerationCapError(CascadeError):
    """Tree expansion reached the hard generation cap (2**10)."""


class NodeBudgetError(CascadeError):
    """A best-first search exceeded its node budget."""


class SingularEvaluationError(CascadeError):
    """A closed-form density was evaluated at its (integrable) singularity."""


class ConfigError(CascadeError):
    """An experiment configuration failed to parse or validate."""
