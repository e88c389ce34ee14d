"""Backend selection: compiled engine when available, pure Python otherwise.

The compiled extension accelerates the three hot operations for kernels in
the built-in catalog.  Kernels without a compiled dispatch id (custom
samplers) always run on the pure engine.  Set DSYCASCADE_BACKEND=pure or
=native to force a choice; forcing ``native`` fails loudly if the extension
is missing.
"""

from __future__ import annotations

import os

from . import _pure

try:
    from . import _engine as _native
except ImportError:  # extension not built; pure fallback
    _native = None

_ENV = "DSYCASCADE_BACKEND"


def native_available() -> bool:
    return _native is not None


def _forced() -> str | None:
    value = os.environ.get(_ENV)
    if value is None:
        return None
    value = value.strip().lower()
    if value not in ("native", "pure"):
        raise ValueError(f"{_ENV} must be 'native' or 'pure', got {value!r}")
    if value == "native" and _native is None:
        raise RuntimeError(f"{_ENV}=native but the compiled engine is not built")
    return value


def active_backend_name() -> str:
    forced = _forced()
    if forced:
        return forced
    return "native" if _native is not None else "pure"


def engine_for(kernel) -> tuple[str, object]:
    """Pick the engine for a kernel: ('native', module) or ('pure', module)."""
    forced = _forced()
    if forced == "pure" or kernel.engine_kind is None or _native is None:
        return "pure", _pure
    return "native", _native


def native_module():
    return _native


def pure_module():
    return _pure
