"""Finite-n empirical proxies for the model and selection conditions.

These are diagnostics, not proofs: each block reports a number that should
settle if the corresponding asymptotic assumption holds.
"""

from __future__ import annotations

import numpy as np

from ..errors import EstimationError
from ..estimators import empirical_window, geometric_decay, tail_exponent_fit, tv_distance
from . import jsonio
from .rundata import load_run

C1_DMAX = 20
MIN_COUNT = 25


def _normalised(counts, total):
    return {d: v / total for d, v in counts.items()}


def _c1(replicas):
    worst = []
    for cps in replicas:
        final = cps[-1]
        if len(cps) < 2:
            continue
        half = min(cps[:-1], key=lambda cp: abs(cp.n - final.n / 2))
        diff = max(abs(final.counts.get(d, 0) / final.n - half.counts.get(d, 0) / half.n)
                   for d in range(C1_DMAX + 1))
        worst.append(diff)
    if not worst:
        return {"status": "absent", "reason": "needs at least two checkpoints"}
    return {"max_abs_change": float(max(worst)), "mean_abs_change": float(np.mean(worst)),
            "d_max": C1_DMAX}


def _c2(counts):
    try:
        lo, hi = empirical_window(counts, d_lo=5, min_count=MIN_COUNT)
        fit = tail_exponent_fit(counts, lo, hi)
    except EstimationError as exc:
        return {"status": "absent", "reason": str(exc)}
    return {"gamma_hat": fit.exponent, "stderr": fit.stderr, "r_squared": fit.r_squared,
            "window": [lo, hi]}


def _k_hat(c_hat, p_hat, lo, hi):
    k = np.cumsum([p_hat.get(d, 0.0) - c_hat.get(d, 0.0) for d in range(lo, hi + 1)])
    return k


def _c6(run, theory, m, c_hat, p_hat, counts, n, n_initial, q_counts):
    hi = max((d for d, v in counts.items() if v >= MIN_COUNT), default=m)
    # the initial graph biases every partial sum of p_hat - c_hat by O(|V_0| / n)
    slack = n_initial / n
    k = _k_hat(c_hat, p_hat, m, hi)
    bad = np.flatnonzero(k <= slack)
    sel_lo = min((d for d, v in q_counts.items() if v), default=m)
    sel_lo = max(sel_lo, m)
    bad_sel = [i for i in bad if m + i >= sel_lo]
    return {
        "ok": bool(len(bad) == 0),
        "first_violation": None if not len(bad) else int(m + bad[0]),
        "ok_on_selected_support": not bad_sel,
        "selected_support_min_d": int(sel_lo),
        "first_violation_on_selected_support": int(m + bad_sel[0]) if bad_sel else None,
        "k_hat": [float(v) for v in k],
        "window": [m, int(hi)],
        "slack": slack,
        "theory_condition6_ok": None if theory is None else theory.get("condition6_ok"),
    }


def check_conditions(run_dir, theory_file=None, run=None, theory=None):
    """Diagnostics JSON-ready dict for a finished run."""
    run = run or load_run(run_dir)
    if theory is None and theory_file is not None:
        theory = jsonio.load(theory_file)
    config = run.config
    m = config.model.min_degree
    finals = run.finals
    counts = run.pooled("counts")
    n_vertices = sum(cp.n_vertices for cp in finals)
    n_steps = sum(cp.n for cp in finals)
    new_counts = run.pooled("new_counts")
    q_counts = run.pooled("new_selected")
    n_initial = finals[0].n_vertices - finals[0].n

    # c over d >= m uses the total vertex count, p the number of added vertices
    c_hat = _normalised(counts, n_vertices)
    p_hat = _normalised(new_counts, n_steps)
    out = {"label": "diagnostic, not proof", "m": m, "n": finals[0].n, "replicas": len(finals)}
    if any(len(cps) < 2 for cps in run.replicas):
        out["status"] = "insufficient checkpoints"
    out["C1"] = _c1(run.replicas)
    out["C2"] = _c2(counts)

    c4 = {"p_hat": {str(d): v for d, v in sorted(p_hat.items())}}
    decay = geometric_decay(p_hat)
    c4["geometric_ratio"] = decay
    if theory is not None and theory.get("p") is not None:
        p_theory = {theory["m"] + i: v for i, v in enumerate(theory["p"])}
        c4["tv_vs_theory"] = tv_distance(p_hat, p_theory)
    out["C4"] = c4

    out["C6"] = _c6(run, theory, m, c_hat, p_hat, counts, finals[0].n, n_initial, q_counts)

    from .report import fit_growth
    growth = fit_growth(run.replicas)
    out["C9"] = {"alpha_hat": growth["alpha_hat"], "alpha_hat_pooled": growth["alpha_hat_pooled"],
                 "r_squared": growth["r_squared_pooled"],
                 "alpha_theory": None if theory is None else theory.get("alpha")}

    q_total = sum(q_counts.values())
    if q_total:
        q_hat = _normalised(q_counts, q_total)
        c10 = {"q_hat": {str(d): v for d, v in sorted(q_hat.items())}}
        if theory is not None and theory.get("q") is not None:
            q_theory = {theory["m"] + i: v for i, v in enumerate(theory["q"])}
            c10["tv_vs_theory"] = tv_distance(q_hat, q_theory)
        out["C10"] = c10
    else:
        out["C10"] = {"status": "absent", "reason": "no vertex selected after step 0"}
    return out
