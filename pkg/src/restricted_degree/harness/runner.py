"""Run all replicas of an experiment and write the manifest."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .. import __version__
from ..errors import InvariantViolation
from ..rng import derive_seed
from ..simulate import run_replica
from . import jsonio
from .config import ExperimentConfig
from .store import write_replica

log = logging.getLogger(__name__)

MANIFEST = "manifest.json"


def _replica_job(job):
    config_doc, replica = job
    config = ExperimentConfig.from_dict(config_doc)
    seed = derive_seed(config.master_seed, replica)
    started = time.perf_counter()
    entry = {"replica": replica, "seed": seed}
    try:
        cps, state, _ = run_replica(config.model, config.rule, config.n_steps,
                                    config.schedule(), seed=seed)
        state.check()
    except InvariantViolation as exc:
        entry.update(status="invariant_violation", error=str(exc))
        return entry
    main, new = write_replica(config.output_dir, replica, cps, config.d_max)
    entry.update(status="ok", csv=main.name, new_csv=new.name,
                 clamp_events=state.clamp_events,
                 wall_time_s=time.perf_counter() - started)
    return entry


def run_experiment(config: ExperimentConfig, workers=None):
    """Simulate every replica, then write ``manifest.json``.

    Replicas run in a process pool when ``workers`` (default
    ``config.workers``) exceeds 1; each worker owns its state and writes its
    own files.  Raises :class:`InvariantViolation` after the manifest is
    written if any replica aborted.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = workers or config.workers
    doc = config.to_dict()
    jobs = [(doc, r) for r in range(config.replicas)]
    started = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_replica_job, jobs))
    else:
        entries = [_replica_job(job) for job in jobs]
    manifest = {
        "schema_version": 1,
        "package_version": __version__,
        "config": doc,
        "seeds": [{"replica": e["replica"], "seed": e["seed"]} for e in entries],
        "replicas": entries,
        "wall_time_s": time.perf_counter() - started,
    }
    path = out / MANIFEST
    jsonio.dump(manifest, path)
    failed = [e for e in entries if e["status"] != "ok"]
    for e in failed:
        log.error("replica %d aborted: %s", e["replica"], e["error"])
    if failed:
        raise InvariantViolation(f"{len(failed)} replica(s) aborted; see {path}")
    return path


def load_manifest(run_dir):
    path = Path(run_dir) / MANIFEST
    doc = jsonio.load(path)
    return doc, ExperimentConfig.from_dict(doc["config"])
