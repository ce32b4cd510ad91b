"""One evolution step for each graph model.

Four families are supported:

* ``Port(beta)``: plane oriented recursive tree, a vertex of degree d is
  chosen with probability proportional to d + beta (beta = 0 is the
  Albert-Barabasi tree).
* ``Indep(lam)``: every old vertex joins the new one independently with
  probability lam * d / T, T being the degree sum.
* ``Multitree(M)``: the new vertex is attached to all members of a uniformly
  chosen base (an M-hyperedge) and M new bases are created.
* ``DegreeOneFrozen(lam)``: like ``Indep`` but vertices of degree 0 or 1 are
  never chosen and T only sums degrees >= 2.  This is the model in which the
  positivity of k_d fails.

Step functions return a :class:`StepOutcome` and leave the graph untouched
(only the clamp-event counter may change);
:func:`restricted_degree.graph.apply_outcome` applies the outcome.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ConfigError, InvariantViolation
from .graph import GraphState, StepOutcome, bump


@dataclass(frozen=True)
class Port:
    beta: float = 0.0
    name = "port"

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > -1):
            raise ConfigError(f"port model needs beta > -1, got beta = {self.beta}")

    @property
    def min_degree(self):
        return 1


@dataclass(frozen=True)
class Indep:
    lam: float = 1.0
    name = "indep"

    def __post_init__(self):
        if not (0 < self.lam < 2):
            raise ConfigError(f"indep model needs 0 < lambda < 2, got lambda = {self.lam}")

    @property
    def min_degree(self):
        return 0


@dataclass(frozen=True)
class Multitree:
    M: int = 2
    name = "multitree"

    def __post_init__(self):
        if isinstance(self.M, bool) or not isinstance(self.M, int) or self.M < 2:
            raise ConfigError(f"multitree model needs an integer M >= 2, got M = {self.M!r}")

    @property
    def min_degree(self):
        return self.M


@dataclass(frozen=True)
class DegreeOneFrozen:
    lam: float = 1.0
    name = "frozen"

    def __post_init__(self):
        if not (0 < self.lam < 2):
            raise ConfigError(f"frozen model needs 0 < lambda < 2, got lambda = {self.lam}")

    @property
    def min_degree(self):
        return 0


_PARAM_KEYS = {"port": (Port, {"beta": "beta"}),
               "indep": (Indep, {"lambda": "lam"}),
               "multitree": (Multitree, {"M": "M"}),
               "frozen": (DegreeOneFrozen, {"lambda": "lam"})}


def params_from_dict(spec):
    """Build model parameters from ``{"name": ..., <param>: ...}``."""
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("model must be an object with a 'name' field")
    name = spec["name"]
    if name not in _PARAM_KEYS:
        raise ConfigError(f"unknown model {name!r}; expected one of {sorted(_PARAM_KEYS)}")
    cls, keys = _PARAM_KEYS[name]
    extra = set(spec) - {"name"} - set(keys)
    if extra:
        raise ConfigError(f"unknown keys for model {name!r}: {sorted(extra)}")
    kwargs = {attr: spec[key] for key, attr in keys.items() if key in spec}
    return cls(**kwargs)


def params_to_dict(params):
    _, keys = _PARAM_KEYS[params.name]
    values = asdict(params)
    return {"name": params.name, **{key: values[attr] for key, attr in keys.items()}}


# -- auxiliary state -------------------------------------------------------

class PortAux:
    """Parent links, depths from u_1 and the flat list of edge endpoints."""

    def __init__(self, beta):
        self.beta = beta
        self.parent = [-1, -1]
        self.depth = [0, 1]
        self.ends = [0, 1]

    def absorb(self, state, outcome):
        target = outcome.endpoints[0]
        self.parent.append(target)
        self.depth.append(outcome.label)
        self.ends.append(target)
        self.ends.append(outcome.new_vertex)


class MultitreeAux:
    """Bases stored flat (M consecutive entries per base) and distance labels."""

    def __init__(self, M):
        self.M = M
        self.bases = list(range(M))
        self.dist = [0] * M

    @property
    def n_bases(self):
        return len(self.bases) // self.M

    def base(self, i):
        M = self.M
        return tuple(self.bases[i * M:(i + 1) * M])

    def absorb(self, state, outcome):
        members = outcome.endpoints
        nv = outcome.new_vertex
        for i in range(self.M):
            new = list(members)
            new[i] = nv
            self.bases.extend(new)
        self.dist.append(outcome.label)


def degree_bin(d):
    """Bin b holds degrees in [2**(b-1), 2**b - 1]; bin 0 holds degree 0."""
    return d.bit_length()


class IndepAux:
    """Vertex pools per dyadic degree bin plus the running normaliser T.

    A step draws, for every bin, a binomial number of candidates using the
    largest inclusion probability in the bin, picks that many distinct
    members uniformly and thins each candidate down to its own probability.
    The result is exactly one independent Bernoulli draw per vertex at a cost
    of O(log max degree + number of candidates).
    """

    def __init__(self, lam, frozen, degrees):
        self.lam = lam
        self.frozen = frozen
        # lowest bin whose vertices can receive edges
        self.first_bin = 2 if frozen else 1
        self.bins = []
        self.pos = []
        self.total = 0
        for v, d in enumerate(degrees):
            self._insert(v, d)
            self.total += self._weight(d)

    def _weight(self, d):
        if self.frozen and d < 2:
            return 0
        return d

    def _insert(self, v, d):
        b = degree_bin(d)
        while len(self.bins) <= b:
            self.bins.append([])
        pool = self.bins[b]
        if v == len(self.pos):
            self.pos.append(len(pool))
        else:
            self.pos[v] = len(pool)
        pool.append(v)

    def _move(self, v, src, dst):
        pool = self.bins[src]
        i = self.pos[v]
        last = pool.pop()
        if last != v:
            pool[i] = last
            self.pos[last] = i
        while len(self.bins) <= dst:
            self.bins.append([])
        self.pos[v] = len(self.bins[dst])
        self.bins[dst].append(v)

    def absorb(self, state, outcome):
        degrees = state.degrees
        for v in outcome.endpoints:
            d = degrees[v]
            b0, b1 = degree_bin(d - 1), degree_bin(d)
            if b0 != b1:
                self._move(v, b0, b1)
            self.total += self._weight(d) - self._weight(d - 1)
        k = len(outcome.endpoints)
        self._insert(outcome.new_vertex, k)
        self.total += self._weight(k)

    def inclusion_probability(self, d):
        """Unclamped probability that a vertex of degree d joins the new vertex."""
        if self._weight(d) == 0:
            return 0.0
        return self.lam * d / self.total


# -- initial configurations ------------------------------------------------

def _complete_edges(k):
    return tuple((i, j) for i in range(k) for j in range(i + 1, k))


def init_state(params, rng=None) -> GraphState:
    """Canonical initial graph G_0 of the model, at step n = 0.

    Port and Indep start from a single edge, Multitree(M) from the complete
    graph on M vertices (one base).  DegreeOneFrozen starts from a triangle:
    a single edge would leave no vertex of degree >= 2 and the model would
    never evolve.
    """
    if isinstance(params, Port):
        edges = ((0, 1),)
        aux = PortAux(params.beta)
        degrees = [1, 1]
    elif isinstance(params, Indep):
        edges = ((0, 1),)
        degrees = [1, 1]
        aux = IndepAux(params.lam, False, degrees)
    elif isinstance(params, DegreeOneFrozen):
        edges = _complete_edges(3)
        degrees = [2, 2, 2]
        aux = IndepAux(params.lam, True, degrees)
    elif isinstance(params, Multitree):
        edges = _complete_edges(params.M)
        degrees = [params.M - 1] * params.M
        aux = MultitreeAux(params.M)
    else:
        raise ConfigError(f"unsupported model parameters {params!r}")
    hist = []
    for d in degrees:
        bump(hist, d)
    return GraphState(params=params, degrees=degrees, histogram=hist,
                      edge_count=len(edges), aux=aux, rng=rng,
                      n_initial=len(degrees), initial_edges=edges)


# -- steps -----------------------------------------------------------------

def port_selection_probabilities(state):
    """Exact (d + beta) / sum(d + beta) for every vertex; used by tests and diagnostics."""
    beta = state.aux.beta
    weights = [d + beta for d in state.degrees]
    total = sum(weights)
    return [w / total for w in weights]


def port_step(state, rng=None) -> StepOutcome:
    """Choose one old vertex with probability proportional to degree + beta.

    For beta >= 0 a uniform vertex is taken with probability
    beta|V| / (2|E| + beta|V|), otherwise a uniform entry of the endpoint
    list.  For -1 < beta < 0 an endpoint-list entry (probability
    proportional to d) is accepted with probability (d + beta) / d.
    """
    rng = rng or state.rng
    aux = state.aux
    beta = aux.beta
    ends = aux.ends
    nv = len(state.degrees)
    ne = len(ends)
    if beta > 0:
        if rng.uniform() * (ne + beta * nv) < beta * nv:
            target = int(rng.uniform() * nv)
        else:
            target = ends[int(rng.uniform() * ne)]
    elif beta == 0:
        target = ends[int(rng.uniform() * ne)]
    else:
        degrees = state.degrees
        while True:
            target = ends[int(rng.uniform() * ne)]
            d = degrees[target]
            if rng.uniform() * d < d + beta:
                break
    return StepOutcome(new_vertex=nv, endpoints=[target], label=aux.depth[target] + 1)


def multitree_step(state, rng=None) -> StepOutcome:
    """Attach the new vertex to every member of a uniformly chosen base."""
    rng = rng or state.rng
    aux = state.aux
    M = aux.M
    b = int(rng.uniform() * (len(aux.bases) // M))
    members = aux.bases[b * M:(b + 1) * M]
    dist = aux.dist
    label = 1 + min(dist[v] for v in members)
    return StepOutcome(new_vertex=len(state.degrees), endpoints=members,
                       label=label, base_index=b)


def binomial_inverse(u, size, p):
    """Binomial(size, p) quantile at ``u`` by sequential inversion.

    Only used with small means (at most 2 * lambda per bin), so the loop is
    short and ``(1 - p) ** size`` cannot underflow.
    """
    if p >= 1.0:
        return size
    if size == 0 or p <= 0.0:
        return 0
    q = 1.0 - p
    pmf = q ** size
    cdf = pmf
    ratio = p / q
    k = 0
    while u >= cdf and k < size:
        pmf *= (size - k) / (k + 1) * ratio
        k += 1
        cdf += pmf
    return k


def _independent_step(state, rng):
    aux = state.aux
    T = aux.total
    if T <= 0:
        raise InvariantViolation(f"normaliser T must be positive, got {T}")
    lam = aux.lam
    degrees = state.degrees
    bins = aux.bins
    endpoints = []
    for b in range(aux.first_bin, len(bins)):
        pool = bins[b]
        size = len(pool)
        if not size:
            continue
        # largest inclusion probability in the bin
        cap = lam * ((1 << b) - 1) / T
        if cap > 1.0:
            cap = 1.0
        k = binomial_inverse(rng.uniform(), size, cap)
        if not k:
            continue
        picks = set()
        while len(picks) < k:
            picks.add(int(rng.uniform() * size))
        for idx in sorted(picks):
            v = pool[idx]
            p = lam * degrees[v] / T
            if p > 1.0:
                p = 1.0
                state.clamp_events += 1
            if rng.uniform() * cap < p:
                endpoints.append(v)
    return StepOutcome(new_vertex=len(degrees), endpoints=endpoints)


def indep_step(state, rng=None) -> StepOutcome:
    """Connect each old vertex independently with probability lam * d / T."""
    return _independent_step(state, rng or state.rng)


def frozen_step(state, rng=None) -> StepOutcome:
    """As :func:`indep_step`, but degree 0 and 1 vertices never get edges."""
    return _independent_step(state, rng or state.rng)


STEP = {Port: port_step, Indep: indep_step, Multitree: multitree_step,
        DegreeOneFrozen: frozen_step}


def step_function(params):
    return STEP[type(params)]
