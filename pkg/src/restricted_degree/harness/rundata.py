"""Loading finished runs and pooling their checkpoints."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigError
from .runner import load_manifest
from .store import read_replica


@dataclass
class RunData:
    manifest: dict
    config: object
    replicas: list  # per replica: list of StoredCheckpoint in step order

    @property
    def finals(self):
        return [cps[-1] for cps in self.replicas]

    def pooled(self, attr, which=None):
        """Sum of a per-degree dict attribute over replicas' final checkpoints."""
        out = {}
        for cp in (which or self.finals):
            for d, v in getattr(cp, attr).items():
                out[d] = out.get(d, 0) + v
        return out


def load_run(run_dir):
    run_dir = Path(run_dir)
    try:
        manifest, config = load_manifest(run_dir)
    except FileNotFoundError as exc:
        raise ConfigError(f"{run_dir} is not a run directory (no manifest.json)") from exc
    replicas = []
    for entry in manifest["replicas"]:
        if entry.get("status") != "ok":
            continue
        cps = read_replica(run_dir / entry["csv"], run_dir / entry["new_csv"])
        if not cps:
            raise ConfigError(f"replica {entry['replica']} has no checkpoints")
        replicas.append(cps)
    if not replicas:
        raise ConfigError(f"{run_dir}: no completed replicas")
    return RunData(manifest, config, replicas)


def growth_points(checkpoints, min_n=1):
    """(n, s_size) pairs with n >= min_n and a non-empty selection."""
    return [(cp.n, cp.s_size) for cp in checkpoints if cp.n >= min_n and cp.s_size > 0]
