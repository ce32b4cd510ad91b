"""Declarative experiment description (JSON, strict schema)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from ..models import params_from_dict, params_to_dict
from ..selection import rule_from_dict, rule_to_dict, validate_rule
from ..simulate import dyadic_schedule

SCHEMA_VERSION = 1
_KEYS = {"schema_version", "model", "rule", "n_steps", "checkpoints", "replicas",
         "master_seed", "d_max", "output_dir", "workers"}
_REQUIRED = {"schema_version", "model", "rule", "n_steps", "master_seed", "output_dir"}


def _int(value, name, lo):
    if isinstance(value, bool) or not isinstance(value, int) or value < lo:
        raise ConfigError(f"{name} must be an integer >= {lo}, got {value!r}")
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    model: object
    rule: object
    n_steps: int
    master_seed: int
    output_dir: str
    checkpoints: object = "dyadic"
    replicas: int = 1
    d_max: int | None = None
    workers: int = 1

    def __post_init__(self):
        _int(self.n_steps, "n_steps", 1)
        _int(self.replicas, "replicas", 1)
        _int(self.workers, "workers", 1)
        _int(self.master_seed, "master_seed", 0)
        if self.master_seed >= 2 ** 64:
            raise ConfigError("master_seed must fit in 64 bits")
        if self.d_max is not None:
            _int(self.d_max, "d_max", 1)
        validate_rule(self.rule, self.model)
        if self.checkpoints != "dyadic":
            cps = self.checkpoints
            if not isinstance(cps, (list, tuple)) or not cps:
                raise ConfigError("checkpoints must be 'dyadic' or a non-empty list")
            for c in cps:
                _int(c, "checkpoint", 1)
            if list(cps) != sorted(set(cps)):
                raise ConfigError("checkpoints must be strictly increasing")
            if cps[-1] > self.n_steps:
                raise ConfigError("checkpoints must not exceed n_steps")
            object.__setattr__(self, "checkpoints", tuple(cps))

    def schedule(self):
        if self.checkpoints == "dyadic":
            return dyadic_schedule(self.n_steps)
        return list(self.checkpoints)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "model": params_to_dict(self.model),
            "rule": rule_to_dict(self.rule),
            "n_steps": self.n_steps,
            "checkpoints": self.checkpoints if self.checkpoints == "dyadic" else list(self.checkpoints),
            "replicas": self.replicas,
            "master_seed": self.master_seed,
            "d_max": self.d_max,
            "output_dir": self.output_dir,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(doc) - _KEYS
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        missing = _REQUIRED - set(doc)
        if missing:
            raise ConfigError(f"missing configuration keys: {sorted(missing)}")
        if doc["schema_version"] != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {doc['schema_version']!r}")
        if not isinstance(doc["output_dir"], str):
            raise ConfigError("output_dir must be a string")
        return cls(model=params_from_dict(doc["model"]), rule=rule_from_dict(doc["rule"]),
                   n_steps=doc["n_steps"], master_seed=doc["master_seed"],
                   output_dir=doc["output_dir"], checkpoints=doc.get("checkpoints", "dyadic"),
                   replicas=doc.get("replicas", 1), d_max=doc.get("d_max"),
                   workers=doc.get("workers", 1))


def load_config(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ExperimentConfig.from_dict(doc)
