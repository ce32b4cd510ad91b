"""Build theory documents for a model, from closed forms or plug-in estimates."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from scipy.stats import poisson

from ..errors import ConfigError, EstimationError
from ..estimators import empirical_window, tail_exponent_fit
from ..models import DegreeOneFrozen, Indep, Multitree, Port, params_to_dict
from ..theory import (DegreeSequence, TheoryInputs, indep_cd, point_mass, port_cd,
                      result_to_json, shifted, solve)


def empirical_c(source, m, D, min_count=25):
    """Plug-in estimate of c on [m, D'] with D' <= D.

    ``source`` is a run directory (final checkpoints pooled), a replica CSV
    (final checkpoint) or a two-column ``d,c`` CSV.  Counts are renormalised
    over degrees >= m and truncated at the largest degree observed at least
    ``min_count`` times; the rest of the mass becomes the tail.
    Returns ``(c, counts)`` where ``counts`` may be None for ``d,c`` input.
    """
    from .rundata import load_run
    from .store import HEADER, read_replica

    source = Path(source)
    if source.is_dir():
        counts = load_run(source).pooled("counts")
    else:
        with open(source, encoding="utf-8", newline="") as fh:
            header = next(csv.reader(fh))
        if header == HEADER:
            counts = dict(read_replica(source)[-1].counts)
        elif header == ["d", "c"]:
            with open(source, encoding="utf-8", newline="") as fh:
                rows = list(csv.DictReader(fh))
            values = {int(r["d"]): float(r["c"]) for r in rows}
            top = min(D, max(values))
            arr = np.array([values.get(d, 0.0) for d in range(m, top + 1)])
            return DegreeSequence(m, arr, max(0.0, 1.0 - arr.sum())), None
        else:
            raise ConfigError(f"{source}: unrecognised CSV header {header}")
    counts = {d: v for d, v in counts.items() if d >= m and v > 0}
    total = sum(counts.values())
    if not total:
        raise ConfigError("no vertices at degrees >= m in the empirical source")
    top = max((d for d, v in counts.items() if v >= min_count), default=None)
    if top is None:
        raise ConfigError(f"no degree observed at least {min_count} times")
    top = min(top, D)
    arr = np.array([counts.get(d, 0) for d in range(m, top + 1)], dtype=float) / total
    tail = sum(v for d, v in counts.items() if d > top) / total
    return DegreeSequence(m, arr, tail), counts


def _empirical_p(source, m, D):
    from .rundata import load_run

    run = load_run(source)
    counts = run.pooled("new_counts")
    total = sum(counts.values())
    top = min(D, max(counts))
    arr = np.array([counts.get(d, 0) for d in range(m, top + 1)], dtype=float) / total
    return DegreeSequence(m, arr, sum(v for d, v in counts.items() if d > top) / total)


def build_theory(params, alpha, D, q_shift=0, empirical=None, min_count=25):
    """Theory document (plain dict) for ``params``.

    Port and Indep use closed-form c unless ``empirical`` is given;
    Multitree and the frozen model need ``empirical``.  q is the law of the
    new vertex degree shifted by ``q_shift``.
    """
    m = params.min_degree
    gamma = None
    if empirical is not None:
        c, counts = empirical_c(empirical, m, D, min_count)
        if counts is not None:
            try:
                lo, hi = empirical_window(counts, d_lo=max(m, 5), min_count=min_count)
                gamma = tail_exponent_fit({d: v for d, v in counts.items()}, lo, hi).exponent
            except EstimationError:
                gamma = None
    elif isinstance(params, Port):
        c, _ = port_cd(params.beta, D)
    elif isinstance(params, Indep):
        c, _ = indep_cd(params.lam, D)
    else:
        raise ConfigError(f"model {params.name!r} needs --empirical-c (no closed-form c)")
    Dc = c.D
    if isinstance(params, Port):
        p = point_mass(1, 1, Dc)
        gamma = gamma if empirical is not None else 3 + params.beta
    elif isinstance(params, Multitree):
        p = point_mass(params.M, params.M, Dc)
    elif isinstance(params, Indep):
        k = np.arange(0, Dc + 1)
        p = DegreeSequence(0, poisson.pmf(k, params.lam), float(poisson.sf(Dc, params.lam)))
        gamma = gamma if empirical is not None else 3.0
    elif isinstance(params, DegreeOneFrozen):
        if empirical is None or not Path(empirical).is_dir():
            raise ConfigError("frozen model needs a run directory as --empirical-c")
        p = _empirical_p(empirical, m, Dc)
    else:
        raise ConfigError(f"unsupported model {params!r}")
    q = shifted(p, q_shift) if q_shift else p
    inputs = TheoryInputs(c=c, p=p.on(m, Dc), q=q.on(m, Dc), alpha=alpha, m=m, gamma=gamma)
    result = solve(inputs)
    doc = result_to_json(result, inputs, model=params_to_dict(params))
    doc["plug_in"] = empirical is not None
    doc["q_shift"] = q_shift
    return doc
