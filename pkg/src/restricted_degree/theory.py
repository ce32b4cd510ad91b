"""Limit degree distribution of the selected vertices.

Given the asymptotic degree distribution ``c`` of the whole graph, the
asymptotic initial-degree distribution ``p`` of new vertices, the one of new
selected vertices ``q`` and the growth exponent ``alpha`` of the selected set,
the limits x_d of X*[n, d] / |S_n| satisfy::

    k_d = sum_{j=m}^{d} (p_j - c_j),   t_d = k_d / c_d
    x_m = alpha q_m / (alpha + t_m)
    x_d = (x_{d-1} t_{d-1} + alpha q_d) / (alpha + t_d)

and z_d = sum_{j >= d} x_j obeys a recursion of the same shape.  Everything
is evaluated on a truncated support [m, D]; each sequence carries the mass
beyond D in ``tail``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import linregress, poisson

from .errors import Condition6Error, ConfigError


@dataclass
class DegreeSequence:
    """Values for degrees m, m+1, ..., D plus the mass beyond D."""

    m: int
    values: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")

    @property
    def D(self):
        return self.m + len(self.values) - 1

    @property
    def degrees(self):
        return np.arange(self.m, self.D + 1)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, d):
        """Value at degree ``d`` (zero outside the stored range)."""
        i = d - self.m
        if 0 <= i < len(self.values):
            return float(self.values[i])
        return 0.0

    def total(self):
        return float(self.values.sum()) + self.tail

    def on(self, m, D):
        """Values re-indexed to [m, D], zero-filled; tail keeps mass beyond D."""
        out = np.zeros(D - m + 1)
        lo, hi = max(m, self.m), min(D, self.D)
        if lo <= hi:
            out[lo - m:hi - m + 1] = self.values[lo - self.m:hi - self.m + 1]
        tail = self.tail
        if self.D > D:
            tail += float(self.values[D + 1 - self.m:].sum())
        return DegreeSequence(m, out, tail)

    def as_dict(self):
        return {int(d): float(v) for d, v in zip(self.degrees, self.values)}


def point_mass(at, m, D):
    values = np.zeros(D - m + 1)
    values[at - m] = 1.0
    return DegreeSequence(m, values, 0.0)


def shifted(seq, shift):
    """Sequence of X + shift when ``seq`` is the law of X."""
    return DegreeSequence(seq.m + shift, seq.values.copy(), seq.tail)


def geometric_tail_bound(values):
    """Mass beyond the last entry assuming geometric decay.

    The ratio is fitted on the last decade of positive entries; a sequence
    that has already vanished has no tail.
    """
    values = np.asarray(values, dtype=float)
    pos = np.flatnonzero(values > 0)
    if len(pos) < 2 or pos[-1] != len(values) - 1:
        return 0.0
    window = pos[-max(2, len(values) // 10):]
    slope = np.polyfit(window, np.log(values[window]), 1)[0]
    r = math.exp(slope)
    if r >= 1:
        return math.inf
    return float(values[-1] * r / (1 - r))


# -- base distributions ----------------------------------------------------

def port_cd(beta, D):
    """Degree distribution of the tree with attachment weight d + beta.

    Returns ``(c, p)`` on [1, D]; ``p`` is the point mass at 1.  The tail of
    ``c`` is exact: Gamma ratios telescope,
    sum_{j > D} Gamma(j + beta) / Gamma(j + 3 + 2 beta)
    = Gamma(D + 1 + beta) / ((2 + beta) Gamma(D + 3 + 2 beta)).
    """
    if not beta > -1:
        raise ConfigError(f"beta must exceed -1, got {beta}")
    if D < 1:
        raise ConfigError("D must be at least 1")
    d = np.arange(1, D + 1, dtype=float)
    log_const = math.log(2 + beta) + gammaln(3 + 2 * beta) - gammaln(1 + beta)
    c = np.exp(log_const + gammaln(d + beta) - gammaln(d + 3 + 2 * beta))
    tail = math.exp(log_const + gammaln(D + 1 + beta) - gammaln(D + 3 + 2 * beta)) / (2 + beta)
    return DegreeSequence(1, c, tail), point_mass(1, 1, D)


def indep_cd(lam, D):
    """Degree distribution of the independent-edges model and Poisson(lam).

    c_0 = p_0 and c_d = 2 / (d (d+1) (d+2)) * sum_{k=1}^{d} k (k+1) p_k.
    The tail of ``c`` uses sum_k k (k+1) p_k = lam (lam + 2), an upper bound
    that is exact once the Poisson mass beyond D is negligible.
    """
    if not 0 < lam < 2:
        raise ConfigError(f"lambda must lie in (0, 2), got {lam}")
    if D < 1:
        raise ConfigError("D must be at least 1")
    k = np.arange(0, D + 1)
    p = poisson.pmf(k, lam)
    weighted = np.cumsum(k * (k + 1) * p)
    c = np.empty(D + 1)
    c[0] = p[0]
    dd = k[1:].astype(float)
    c[1:] = 2.0 / (dd * (dd + 1) * (dd + 2)) * weighted[1:]
    c_tail = lam * (lam + 2) / ((D + 1) * (D + 2))
    return DegreeSequence(0, c, c_tail), DegreeSequence(0, p, float(poisson.sf(D, lam)))


# -- limit recursion -------------------------------------------------------

@dataclass
class TheoryInputs:
    c: DegreeSequence
    p: DegreeSequence
    q: DegreeSequence
    alpha: float
    m: int
    gamma: float | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if self.m < 0:
            raise ConfigError("m must be non-negative")

    @property
    def D(self):
        return self.c.D

    def aligned(self):
        """(c, p, q) as arrays on [m, D] plus their tails."""
        D = self.D
        return tuple(s.on(self.m, D) for s in (self.c, self.p, self.q))


def _upper_tails(seq):
    """u[i] = mass strictly above degree m + i."""
    rev = np.cumsum(seq.values[::-1])[::-1]
    return np.concatenate([rev[1:], [0.0]]) + seq.tail


def k_sequence(c, p, m, D):
    """k_d = sum_{j=m}^{d} (p_j - c_j) on [m, D] and whether all k_d > 0.

    When both sequences are normalised (tail included) the identical
    quantity sum_{j>d} (c_j - p_j) is used instead; it avoids cancellation
    where k_d is tiny.  Differences below the rounding error of the two
    sums are structural zeros (c_0 = p_0 for the independent-edges model)
    and are set to exactly 0.
    """
    c = c.on(m, D)
    p = p.on(m, D)
    if abs(c.total() - 1) < 1e-9 and abs(p.total() - 1) < 1e-9:
        cu, pu = _upper_tails(c), _upper_tails(p)
        k = cu - pu
        scale = cu + pu
    else:
        k = np.cumsum(p.values - c.values)
        scale = np.cumsum(p.values + c.values)
    k[np.abs(k) <= 16 * np.finfo(float).eps * scale] = 0.0
    return k, bool(np.all(k > 0))


def dominance_check(c, p, m, D):
    """Per degree: does the cumulative p reach the cumulative c (k_d >= 0)?"""
    k, _ = k_sequence(c, p, m, D)
    return k >= 0


def _rates(inputs, k, strict):
    c, p, q = inputs.aligned()
    k = np.asarray(k, dtype=float)
    if len(k) != len(c):
        raise ValueError("k must cover the same degrees as c")
    if np.any(c.values <= 0):
        d = inputs.m + int(np.flatnonzero(c.values <= 0)[0])
        raise ConfigError(f"c_d must be positive on the support, c_{d} = {c[d]}")
    bad = np.flatnonzero(k <= 0) if strict else np.flatnonzero(k < 0)
    if len(bad):
        i = int(bad[0])
        raise Condition6Error(inputs.m + i, float(k[i]))
    return k / c.values, q


def x_recursion(inputs, k, strict=True):
    """x_d by the forward recursion.

    With ``strict=False`` zero values of k_d are accepted (the denominators
    stay positive); negative ones always raise.
    """
    t, q = _rates(inputs, k, strict)
    alpha = inputs.alpha
    qv = q.values
    x = np.empty(len(t))
    prev = alpha * qv[0] / (alpha + t[0])
    x[0] = prev
    for i in range(1, len(t)):
        prev = (prev * t[i - 1] + alpha * qv[i]) / (alpha + t[i])
        x[i] = prev
    return DegreeSequence(inputs.m, x)


def x_closed_form(inputs, k, strict=True):
    """x_d = alpha / (a_d (t_d + alpha)) * sum_{i<=d} a_i q_i.

    a_d = prod_{i=m}^{d-1} (t_i + alpha) / t_i is accumulated in log space
    and the inner sum with a running log-sum-exp.  A zero t_j (allowed when
    ``strict=False``) kills every contribution from i <= j for d > j, so the
    products restart right after it.
    """
    t, q = _rates(inputs, k, strict)
    alpha = inputs.alpha
    qv = q.values
    x = np.zeros(len(t))
    zeros = np.flatnonzero(t == 0).tolist()
    starts = [0] + [z + 1 for z in zeros if z + 1 < len(t)]
    ends = [z for z in zeros if z + 1 < len(t)] + [len(t) - 1]
    with np.errstate(divide="ignore"):
        for s, e in zip(starts, ends):
            seg_t = t[s:e + 1]
            step = np.log(seg_t[:-1] + alpha) - np.log(seg_t[:-1])
            log_a = np.concatenate([[0.0], np.cumsum(step)])
            log_terms = log_a + np.log(qv[s:e + 1])
            log_sums = np.logaddexp.accumulate(log_terms)
            x[s:e + 1] = alpha * np.exp(log_sums - log_a) / (seg_t + alpha)
    return DegreeSequence(inputs.m, x)


def log_a_sequence(inputs, k):
    """log a_d on [m, D]; +inf after a zero t."""
    t, _ = _rates(inputs, k, strict=False)
    with np.errstate(divide="ignore"):
        step = np.log(t[:-1] + inputs.alpha) - np.log(t[:-1])
    return np.concatenate([[0.0], np.cumsum(step)])


def z_recursion(inputs, k, strict=True):
    """z_d = share of selected vertices with degree >= d, on [m, D + 1]."""
    t, q = _rates(inputs, k, strict)
    alpha = inputs.alpha
    # Q[i] = mass of q at degrees >= m + i, i = 0 .. D - m + 1
    Q = np.concatenate([np.cumsum(q.values[::-1])[::-1], [0.0]]) + q.tail
    if abs(Q[0] - 1) > 1e-9:
        raise ConfigError(f"q must be a probability distribution, total mass {Q[0]!r}")
    z = np.empty(len(t) + 1)
    z[0] = 1.0
    for i in range(1, len(z)):
        tp = t[i - 1]
        z[i] = (z[i - 1] * tp + alpha * Q[i]) / (alpha + tp)
    return z


def gamma_star(alpha, gamma):
    """Exponent alpha (gamma - 1) + 1; exact for ``Fraction`` inputs."""
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    return alpha * (gamma - 1) + 1


@dataclass
class LimitResult:
    m: int
    alpha: float
    k: np.ndarray
    t: np.ndarray
    a: np.ndarray
    x: DegreeSequence | None
    z: np.ndarray | None
    condition6_ok: bool
    gamma: float | None = None
    gamma_star: float | None = None
    first_violation: int | None = None

    @property
    def D(self):
        return self.m + len(self.k) - 1


def solve(inputs, strict=False):
    """All limit quantities for ``inputs``.

    A failed positivity check is recorded in ``condition6_ok``; x and z are
    still produced when every k_d >= 0 (``strict=False``) and left as None
    otherwise.
    """
    m, D = inputs.m, inputs.D
    k, ok = k_sequence(inputs.c, inputs.p, m, D)
    c = inputs.c.on(m, D).values
    with np.errstate(divide="ignore", invalid="ignore"):
        t = k / c
        a = np.exp(np.concatenate([[0.0], np.cumsum(np.log(t[:-1] + inputs.alpha) - np.log(t[:-1]))]))
    first = None if ok else m + int(np.flatnonzero(k <= 0)[0])
    x = z = None
    if ok or (not strict and np.all(k >= 0)):
        x = x_recursion(inputs, k, strict=False)
        z = z_recursion(inputs, k, strict=False)
        x.tail = float(z[-1])
    gs = None
    if inputs.gamma is not None and inputs.gamma > 1 and 0 < inputs.alpha <= 1:
        gs = gamma_star(inputs.alpha, inputs.gamma)
    return LimitResult(m=m, alpha=inputs.alpha, k=k, t=t, a=a, x=x, z=z,
                       condition6_ok=ok, gamma=inputs.gamma, gamma_star=gs,
                       first_violation=first)


# -- serialisation ---------------------------------------------------------

def result_to_json(result, inputs, model=None):
    """Plain-data form of a :class:`LimitResult` (floats kept as floats)."""
    c, p, q = inputs.aligned()

    def arr(a):
        return None if a is None else [float(v) for v in a]

    return {
        "schema_version": 1,
        "model": model,
        "m": result.m,
        "alpha": float(result.alpha),
        "gamma": None if result.gamma is None else float(result.gamma),
        "gamma_star": None if result.gamma_star is None else float(result.gamma_star),
        "D": result.D,
        "c": arr(c.values),
        "p": arr(p.values),
        "q": arr(q.values),
        "k": arr(result.k),
        "x": None if result.x is None else arr(result.x.values),
        "z": arr(result.z),
        "condition6_ok": result.condition6_ok,
        "first_violation": result.first_violation,
        "tail_bounds": {"c": c.tail, "p": p.tail, "q": q.tail,
                        "x": None if result.x is None else result.x.tail},
    }


def theory_x_from_json(doc):
    """The x sequence stored in a theory document."""
    if doc.get("x") is None:
        raise ConfigError("theory file has no x sequence (k_d < 0 somewhere)")
    return DegreeSequence(doc["m"], np.asarray(doc["x"], dtype=float), doc["tail_bounds"].get("x") or 0.0)


def loglog_slope(seq, d_lo, d_hi):
    """Least-squares slope of log value against log degree over a window."""
    d = seq.degrees
    sel = (d >= d_lo) & (d <= d_hi) & (seq.values > 0)
    fit = linregress(np.log(d[sel]), np.log(seq.values[sel]))
    return fit.slope
