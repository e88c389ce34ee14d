"""Experiment configuration files and machine-readable result records.

Configs are flat ``key = value`` text files, one experiment per file, with
model parameters under the ``param.`` prefix.  Result records are JSON with
three sections: the echoed config, a deterministic ``data`` section
(bit-identical across reruns with the same seed and worker count), and a
``meta`` section holding wall time and timestamps.  Per-replica streams can
additionally be written as CSV.  Every record validates against the
versioned JSON schema shipped with the package.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import jsonschema

from .errors import ConfigError

SCHEMA_VERSION = 1

PROBES = ("horizon", "zeta_n", "greedy", "inspection", "cutsets",
          "constants", "densities")

# key -> (type, default); None default means required-if-used
_FIELD_TYPES = {
    "model": (str, None),
    "probe": (str, None),
    "seed": (int, 0),
    "replicas": (int, 1),
    "initial_state": (float, None),
    "format": (str, "json"),
    "out": (str, None),
    "workers": (int, None),
    "t": (float, None),
    "vertex_cap": (int, 10**6),
    "gen_cap": (int, 60),
    "record_births": (bool, False),
    "n": (int, None),
    "k": (int, 1),
    "threshold_c": (float, None),
    "term_cap": (int, 4000),
    "tail_tol": (float, 1e-6),
    "r": (float, None),
    "psi_M": (float, 1.0),
}

_PROBE_REQUIRED = {
    "horizon": ("t",),
    "zeta_n": ("n",),
    "greedy": (),
    "inspection": ("threshold_c",),
    "cutsets": ("threshold_c",),
    "constants": (),
    "densities": (),
}


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    model_params: dict
    probe: str
    seed: int = 0
    replicas: int = 1
    initial_state: Optional[float] = None
    format: str = "json"
    out: Optional[str] = None
    workers: Optional[int] = None
    probe_params: dict = field(default_factory=dict)

    def validate(self) -> None:
        from .models import CATALOG  # deferred: records must not import models eagerly
        if self.model not in CATALOG:
            raise ConfigError(f"unknown model {self.model!r}; known: {sorted(CATALOG)}")
        if self.probe not in PROBES:
            raise ConfigError(f"unknown probe {self.probe!r}; known: {PROBES}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be json or csv, got {self.format!r}")
        for key in _PROBE_REQUIRED[self.probe]:
            if self.probe_params.get(key) is None:
                raise ConfigError(f"probe {self.probe!r} requires field {key!r}")
        p = self.probe_params
        if self.probe == "horizon" and not p["t"] > 0:
            raise ConfigError("t must be positive")
        if self.probe == "zeta_n" and not 0 <= p["n"] <= 25:
            raise ConfigError("n must lie in [0, 25]")
        if self.probe in ("horizon", "cutsets") and p.get("vertex_cap", 1) < 1:
            raise ConfigError("vertex_cap must be >= 1")
        if self.probe == "greedy":
            if p.get("term_cap", 1) < 1:
                raise ConfigError("term_cap must be >= 1")
            if not p.get("tail_tol", 1.0) > 0:
                raise ConfigError("tail_tol must be positive")
        if self.probe in ("inspection", "cutsets") and p.get("gen_cap", 1) < 1:
            raise ConfigError("gen_cap must be >= 1")
        if self.probe == "cutsets":
            r = p.get("r")
            if r is not None and r <= 2:
                raise ConfigError("cutset bound requires r > 2")

    def echo(self) -> dict:
        out = {
            "model": self.model,
            "model_params": dict(sorted(self.model_params.items())),
            "probe": self.probe,
            "seed": self.seed,
            "replicas": self.replicas,
            "initial_state": self.initial_state,
            "format": self.format,
            "out": self.out,
        }
        out.update({k: self.probe_params[k] for k in sorted(self.probe_params)})
        return out


def _coerce(key: str, raw: str, lineno: int):
    typ, _ = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if typ is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if typ is int:
            value = int(raw)
        elif typ is float:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError(raw)
        else:
            value = raw
        return value
    except ValueError:
        raise ConfigError(
            f"line {lineno}: field {key!r} expects {typ.__name__}, got {raw!r}"
        ) from None


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat key = value experiment file."""
    fields: dict[str, Any] = {}
    model_params: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key.startswith("param."):
            name = key[len("param."):]
            try:
                model_params[name] = float(raw.strip())
            except ValueError:
                raise ConfigError(
                    f"line {lineno}: model parameter {name!r} must be numeric"
                ) from None
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown field {key!r}")
        if key in fields:
            raise ConfigError(f"line {lineno}: duplicate field {key!r}")
        fields[key] = _coerce(key, raw, lineno)

    for required in ("model", "probe"):
        if required not in fields:
            raise ConfigError(f"missing required field {required!r}")

    top = {k: fields.pop(k) for k in
           ("model", "probe", "seed", "replicas", "initial_state",
            "format", "out", "workers") if k in fields}
    probe_params = {}
    for key, (_, default) in _FIELD_TYPES.items():
        if key in top or key in ("model", "probe", "seed", "replicas",
                                 "initial_state", "format", "out", "workers"):
            continue
        probe_params[key] = fields.pop(key, default)
    config = ExperimentConfig(
        model=top["model"], model_params=model_params, probe=top["probe"],
        seed=top.get("seed", 0), replicas=top.get("replicas", 1),
        initial_state=top.get("initial_state"),
        format=top.get("format", "json"), out=top.get("out"),
        workers=top.get("workers"), probe_params=probe_params)
    config.validate()
    return config


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# Result records
# ---------------------------------------------------------------------------

@dataclass
class ResultRecord:
    config: dict
    data: dict
    wall_time_s: float

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "data": self.data,
            "meta": {
                "wall_time_s": self.wall_time_s,
                "created_unix": time.time(),
            },
        }

    def data_bytes(self) -> bytes:
        """Deterministic serialization of the data section."""
        return canonical_json(self.data).encode()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def _schema() -> dict:
    ref = resources.files("dsycascade").joinpath("schema/result_record.schema.json")
    return json.loads(ref.read_text())


def validate_record(record_dict: dict) -> None:
    jsonschema.validate(record_dict, _schema())


def write_record(record: ResultRecord, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = record.to_json_dict()
    validate_record(payload)
    path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return path


def write_replica_csv(path: str | Path, header: list[str],
                      rows: list[tuple], *, seed: int, version: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# dsycascade {version} seed={seed}", ",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path
