"""Empirical versus theoretical restricted degree distribution."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from ..errors import ConfigError, EstimationError
from ..estimators import empirical_window, growth_exponent_fit, tail_exponent_fit, tv_distance
from ..models import params_to_dict
from ..theory import theory_x_from_json
from . import jsonio
from .diagnostics import check_conditions
from .rundata import growth_points, load_run

GROWTH_MIN_N = 1024


def _check_match(config, theory):
    model = params_to_dict(config.model)
    if theory.get("model") is not None and theory["model"] != model:
        raise ConfigError(f"theory model {theory['model']} does not match run model {model}")
    if theory["m"] != config.model.min_degree:
        raise ConfigError(f"theory m = {theory['m']} but the model has m = {config.model.min_degree}")


def fit_growth(replicas, min_n=GROWTH_MIN_N):
    """Per-replica growth fits (mean, stderr) and the fit of the pooled sizes."""
    fits = []
    for cps in replicas:
        pts = growth_points(cps, min_n)
        if len(pts) < 3:
            pts = growth_points(cps)
        try:
            fits.append(growth_exponent_fit(pts))
        except EstimationError:
            continue
    pooled = {}
    for cps in replicas:
        for cp in cps:
            pooled[cp.n] = pooled.get(cp.n, 0) + cp.s_size
    pts = [(n, s) for n, s in sorted(pooled.items()) if n >= min_n and s > 0]
    try:
        pooled_fit = growth_exponent_fit(pts)
    except EstimationError:
        pooled_fit = None
    alphas = np.array([f.alpha_hat for f in fits])
    return {
        "alpha_hat": float(alphas.mean()) if len(alphas) else None,
        "alpha_hat_stderr": float(alphas.std(ddof=1) / math.sqrt(len(alphas))) if len(alphas) > 1 else None,
        "alpha_hat_pooled": None if pooled_fit is None else pooled_fit.alpha_hat,
        "r_squared_pooled": None if pooled_fit is None else pooled_fit.r_squared,
        "n_replicas_fitted": len(fits),
        "min_n": min_n,
    }


def _safe_fit(counts, method, d_lo=5, min_count=25):
    try:
        lo, hi = empirical_window(counts, d_lo=d_lo, min_count=min_count)
        fit = tail_exponent_fit(counts, lo, hi, method)
    except EstimationError as exc:
        return {"exponent": None, "reason": str(exc)}
    return {"exponent": fit.exponent, "stderr": fit.stderr, "d_min": fit.d_min,
            "d_max": fit.d_max, "r_squared": fit.r_squared, "method": method}


def compare_report(run_dir, theory_file, out=None, tv_dmax=None):
    """Aggregate final checkpoints and compare them with the theory file.

    Writes ``out`` (JSON) and ``out`` with suffix ``.txt`` (table) when
    ``out`` is given; always returns the report dict.
    """
    run = load_run(run_dir)
    theory = jsonio.load(theory_file)
    _check_match(run.config, theory)
    x = theory_x_from_json(theory)
    finals = [cp for cp in run.finals if cp.s_size > 0]
    if not finals:
        raise EstimationError("no replica has selected vertices")

    pooled_sel = run.pooled("selected", finals)
    s_total = sum(cp.s_size for cp in finals)
    x_pooled = {d: v / s_total for d, v in pooled_sel.items()}
    per_rep = [{d: v / cp.s_size for d, v in cp.selected.items()} for cp in finals]
    support = sorted(set(pooled_sel) | set(int(d) for d in x.degrees if x[d] > 0 and d <= max(pooled_sel)))
    R = len(per_rep)
    rows = []
    x_mean = {}
    for d in support:
        vals = np.array([r.get(d, 0.0) for r in per_rep])
        mean = float(vals.mean())
        x_mean[d] = mean
        se = float(vals.std(ddof=1) / math.sqrt(R)) if R > 1 else None
        rows.append({"d": d, "x_hat": mean, "stderr": se, "x_hat_pooled": x_pooled.get(d, 0.0),
                     "x_theory": x[d], "abs_error": abs(mean - x[d])})

    x_theory = x.as_dict()
    report = {
        "schema_version": 1,
        "run_dir": str(run_dir),
        "theory_file": str(theory_file),
        "n": finals[0].n,
        "replicas": R,
        "s_size_total": s_total,
        "table": rows,
        "tv": tv_distance(x_mean, x_theory),
        "tv_pooled": tv_distance(x_pooled, x_theory),
        "gamma_hat": _safe_fit(pooled_sel, "loglog_ls"),
        "gamma_hat_hill": _safe_fit(pooled_sel, "hill"),
        "gamma": theory.get("gamma"),
        "gamma_star": theory.get("gamma_star"),
        "alpha_theory": theory["alpha"],
        "growth": fit_growth(run.replicas),
        "clamp_events": {str(e["replica"]): e.get("clamp_events", 0) for e in run.manifest["replicas"]},
        "conditions": check_conditions(run_dir, theory_file, run=run, theory=theory),
    }
    report["alpha_hat"] = report["growth"]["alpha_hat"]
    if tv_dmax is not None:
        head = lambda dist: {d: v for d, v in dist.items() if d <= tv_dmax}  # noqa: E731
        report["tv_dmax"] = tv_dmax
        report["tv_head"] = tv_distance(head(x_mean), head(x_theory))
        report["tv_head_pooled"] = tv_distance(head(x_pooled), head(x_theory))
    if out is not None:
        out = Path(out)
        jsonio.dump(report, out)
        out.with_suffix(".txt").write_text(format_table(report), encoding="utf-8")
    return report


def format_table(report, max_rows=40):
    lines = [f"n = {report['n']}, replicas = {report['replicas']}, |S| total = {report['s_size_total']}",
             f"TV(x_hat, x) = {report['tv']:.4f}   pooled: {report['tv_pooled']:.4f}",
             f"gamma* = {report['gamma_star']}   fitted: {report['gamma_hat'].get('exponent')}"
             f"   hill: {report['gamma_hat_hill'].get('exponent')}",
             f"alpha = {report['alpha_theory']}   fitted: {report['alpha_hat']}",
             "",
             f"{'d':>6} {'x_hat':>12} {'stderr':>10} {'x_theory':>12} {'abs_err':>10}"]
    for row in report["table"][:max_rows]:
        se = "" if row["stderr"] is None else f"{row['stderr']:.2e}"
        lines.append(f"{row['d']:>6} {row['x_hat']:>12.6f} {se:>10} {row['x_theory']:>12.6f} {row['abs_error']:>10.2e}")
    return "\n".join(lines) + "\n"
