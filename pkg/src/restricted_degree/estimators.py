"""Tail exponents, growth exponents and distribution distances.

The functional API (``tail_exponent_fit``, ``growth_exponent_fit``,
``tv_distance``, ``empirical_x``) is what the harness uses.  The two
estimator classes wrap the fits in the scikit-learn interface so they can be
dropped into pipelines, grid searches or ``clone``.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import EstimationError
from .theory import DegreeSequence


@dataclass(frozen=True)
class TailFit:
    exponent: float
    stderr: float
    d_min: int
    d_max: int
    method: str
    r_squared: float
    n_points: int = 0


@dataclass(frozen=True)
class GrowthFit:
    alpha_hat: float
    stderr: float
    n_checkpoints: int
    r_squared: float = math.nan


def as_degree_map(dist):
    """Normalise the accepted input shapes to ``{degree: value}``.

    Accepts a :class:`DegreeSequence`, a mapping, or a sequence indexed by
    degree (a histogram such as ``Checkpoint.x_star``).
    """
    if isinstance(dist, DegreeSequence):
        return dist.as_dict()
    if isinstance(dist, Mapping):
        return {int(d): float(v) for d, v in dist.items()}
    return {d: float(v) for d, v in enumerate(dist)}


def tail_exponent_fit(dist, d_min, d_max=None, method="loglog_ls"):
    """Fit value_d ~ K d^(-exponent) on [d_min, d_max].

    ``loglog_ls`` regresses log value on log d over nonzero entries.
    ``hill`` treats the values as multiplicities of a degree sample and
    returns 1 + 1 / mean(log(d / d_min)) over degrees >= d_min; ``d_max`` is
    ignored for it.
    """
    values = as_degree_map(dist)
    if d_max is None:
        d_max = max(values, default=d_min)
    if method == "loglog_ls":
        pts = sorted((d, v) for d, v in values.items() if d_min <= d <= d_max and v > 0 and d > 0)
        if len(pts) < 5:
            raise EstimationError(f"need at least 5 nonzero entries in [{d_min}, {d_max}], got {len(pts)}")
        d = np.array([p[0] for p in pts], dtype=float)
        v = np.array([p[1] for p in pts], dtype=float)
        fit = linregress(np.log(d), np.log(v))
        return TailFit(-fit.slope, fit.stderr, d_min, d_max, method, fit.rvalue ** 2, len(pts))
    if method == "hill":
        if d_min <= 0:
            raise EstimationError("hill estimator needs d_min >= 1")
        pts = [(d, v) for d, v in values.items() if d >= d_min and v > 0]
        if len(pts) < 5:
            raise EstimationError(f"need at least 5 distinct degrees >= {d_min}, got {len(pts)}")
        d = np.array([p[0] for p in pts], dtype=float)
        w = np.array([p[1] for p in pts], dtype=float)
        mean_log = float(np.sum(w * np.log(d / d_min)) / w.sum())
        if mean_log <= 0:
            raise EstimationError("degenerate sample above d_min")
        tail_index = 1.0 / mean_log
        stderr = tail_index / math.sqrt(w.sum())
        return TailFit(1.0 + tail_index, stderr, d_min, int(d.max()), method, math.nan, len(pts))
    raise ValueError(f"unknown method {method!r}")


def growth_exponent_fit(checkpoints):
    """Slope of log |S_n| against log n over ``(n, s_size)`` pairs."""
    pts = [(n, s) for n, s in checkpoints]
    if len(pts) < 3:
        raise EstimationError(f"need at least 3 checkpoints, got {len(pts)}")
    n = np.array([p[0] for p in pts], dtype=float)
    s = np.array([p[1] for p in pts], dtype=float)
    if np.any(s <= 0) or np.any(n <= 0):
        raise EstimationError("growth fit needs positive n and s_size")
    x, y = np.log(n), np.log(s)
    if np.ptp(x) == 0:
        raise EstimationError("checkpoints must span more than one n")
    if np.ptp(y) == 0:
        return GrowthFit(0.0, 0.0, len(pts), math.nan)
    fit = linregress(x, y)
    return GrowthFit(fit.slope, fit.stderr, len(pts), fit.rvalue ** 2)


def tv_distance(p, q):
    """Total variation distance 0.5 * sum_d |p_d - q_d| over the joint support."""
    pm, qm = as_degree_map(p), as_degree_map(q)
    support = set(pm) | set(qm)
    return 0.5 * math.fsum(abs(pm.get(d, 0.0) - qm.get(d, 0.0)) for d in support)


def empirical_x(checkpoint):
    """X*[n, d] / |S_n| over the observed degrees."""
    if checkpoint.s_size <= 0:
        raise EstimationError("no selected vertices at this checkpoint")
    xs = checkpoint.x_star
    m = next(d for d, v in enumerate(xs) if v)
    return DegreeSequence(m, np.asarray(xs[m:], dtype=float) / checkpoint.s_size)


def empirical_window(counts, d_lo=5, min_count=25):
    """Default empirical fit window: [d_lo, largest d with count >= min_count]."""
    counts = as_degree_map(counts)
    hi = max((d for d, v in counts.items() if v >= min_count), default=None)
    if hi is None or hi <= d_lo:
        raise EstimationError(f"no degree above {d_lo} has at least {min_count} observations")
    return d_lo, hi


# -- scikit-learn style wrappers --------------------------------------------

def check_degree_sample(X):
    """1-D array of non-negative integer degrees."""
    X = check_array(X, ensure_2d=False, dtype=None)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError("degree samples must be one column")
        X = X[:, 0]
    if np.any(X < 0) or np.any(np.asarray(X) != np.round(X)):
        raise ValueError("degrees must be non-negative integers")
    return X.astype(np.int64)


class TailExponentEstimator(BaseEstimator):
    """Power-law exponent of a degree sample.

    Parameters
    ----------
    method : {"hill", "loglog_ls"}
    d_min : int
        Lower end of the fit window.
    d_max : int or None
        Upper end for ``loglog_ls``; None uses the largest observed degree.

    Attributes
    ----------
    exponent_, stderr_ : float
    fit_ : TailFit
    """

    def __init__(self, method="hill", d_min=5, d_max=None):
        self.method = method
        self.d_min = d_min
        self.d_max = d_max

    def fit(self, X, y=None):
        degrees = check_degree_sample(X)
        counts = np.bincount(degrees)
        values = counts / counts.sum() if self.method == "loglog_ls" else counts
        self.fit_ = tail_exponent_fit(values, self.d_min, self.d_max, self.method)
        self.exponent_ = self.fit_.exponent
        self.stderr_ = self.fit_.stderr
        return self


class GrowthExponentEstimator(RegressorMixin, BaseEstimator):
    """Regularly growing size |S_n| ~ zeta n^alpha, fitted in log-log space.

    ``fit(n, s_size)`` takes step counts as a single feature column and the
    set sizes as targets; ``predict`` returns the fitted zeta n^alpha.
    """

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, dtype=float)
        n = X.ravel() if X.ndim == 1 or X.shape[1] == 1 else None
        if n is None:
            raise ValueError("growth fit takes a single feature (n)")
        self.fit_ = growth_exponent_fit(zip(n, y))
        self.alpha_ = self.fit_.alpha_hat
        self.log_zeta_ = float(np.mean(np.log(y)) - self.alpha_ * np.mean(np.log(n)))
        return self

    def predict(self, X):
        check_is_fitted(self, "alpha_")
        n = check_array(X, ensure_2d=False, dtype=float).ravel()
        return np.exp(self.log_zeta_ + self.alpha_ * np.log(n))


def geometric_decay(dist):
    """Fitted ratio r of value_{d+1} / value_d beyond the mode.

    Exponentially decreasing laws give r < 1; a law with at most two
    support points past its mode is reported with r = 0.
    """
    values = {d: v for d, v in as_degree_map(dist).items() if v > 0}
    if not values:
        raise EstimationError("empty distribution")
    mode = max(values, key=values.get)
    pts = sorted((d, v) for d, v in values.items() if d >= mode)
    if len(pts) < 3:
        return {"ratio": 0.0, "r_squared": None, "points": len(pts)}
    fit = linregress([p[0] for p in pts], np.log([p[1] for p in pts]))
    return {"ratio": math.exp(fit.slope), "r_squared": fit.rvalue ** 2, "points": len(pts)}
