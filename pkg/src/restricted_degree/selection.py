"""Selected-vertex sets and the restricted degree histogram X*[n, d].

A vertex is classified once, right after its edges are drawn, and stays
selected forever.  The per-step order is fixed:

1. the model produces a :class:`~restricted_degree.graph.StepOutcome`;
2. :func:`classify_new_vertex` decides membership of the new vertex;
3. :func:`update_selected_degrees` shifts X* using the *pre-step* degrees;
4. :func:`~restricted_degree.graph.apply_outcome` updates the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError, InvariantViolation
from .graph import bump
from .models import DegreeOneFrozen, Multitree, Port


@dataclass(frozen=True)
class Level:
    """Vertices at distance ``j`` from the root (trees) or from G_0 (multitrees)."""

    j: int
    name = "level"


@dataclass(frozen=True)
class NeighborsOf:
    target: int = 0
    name = "neighbors_of"


@dataclass(frozen=True)
class ConnectedToAll:
    """Multitree vertices adjacent to every vertex of ``fixed``."""

    fixed: tuple
    name = "connected_to_all"


@dataclass(frozen=True)
class All:
    name = "all"


@dataclass(frozen=True)
class DegreeOne:
    """Vertices born with degree 1; in the frozen model they keep degree 1."""

    name = "degree_one"


def rule_from_dict(spec):
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigError("rule must be an object with a 'name' field")
    name = spec["name"]
    keys = {"level": {"j"}, "neighbors_of": {"target"}, "connected_to_all": {"fixed"},
            "all": set(), "degree_one": set()}
    if name not in keys:
        raise ConfigError(f"unknown rule {name!r}; expected one of {sorted(keys)}")
    extra = set(spec) - {"name"} - keys[name]
    missing = keys[name] - set(spec)
    if extra or missing:
        raise ConfigError(f"rule {name!r}: unknown keys {sorted(extra)}, missing {sorted(missing)}")
    if name == "level":
        return Level(spec["j"])
    if name == "neighbors_of":
        return NeighborsOf(spec["target"])
    if name == "connected_to_all":
        return ConnectedToAll(tuple(spec["fixed"]))
    if name == "all":
        return All()
    return DegreeOne()


def rule_to_dict(rule):
    if isinstance(rule, Level):
        return {"name": "level", "j": rule.j}
    if isinstance(rule, NeighborsOf):
        return {"name": "neighbors_of", "target": rule.target}
    if isinstance(rule, ConnectedToAll):
        return {"name": "connected_to_all", "fixed": list(rule.fixed)}
    return {"name": rule.name}


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def n_initial_vertices(params):
    if isinstance(params, Multitree):
        return params.M
    if isinstance(params, DegreeOneFrozen):
        return 3
    return 2


def validate_rule(rule, params):
    """Reject rule/model pairings the limit theory does not cover."""
    n0 = n_initial_vertices(params)
    if isinstance(rule, Level):
        if not isinstance(params, (Port, Multitree)):
            raise ConfigError("level rule needs a tree or multitree model")
        if not _is_int(rule.j) or rule.j < 1:
            raise ConfigError(f"level rule needs an integer j >= 1, got {rule.j!r}")
    elif isinstance(rule, NeighborsOf):
        if not _is_int(rule.target) or not 0 <= rule.target < n0:
            raise ConfigError(f"neighbors_of target must be an initial vertex in [0, {n0}), got {rule.target!r}")
    elif isinstance(rule, ConnectedToAll):
        if not isinstance(params, Multitree):
            raise ConfigError("connected_to_all rule needs the multitree model")
        fixed = rule.fixed
        if not all(_is_int(v) for v in fixed) or len(set(fixed)) != len(fixed):
            raise ConfigError("connected_to_all needs distinct integer vertices")
        if not 1 <= len(fixed) < params.M:
            raise ConfigError(f"connected_to_all needs 1 <= k < M = {params.M}, got k = {len(fixed)}")
        if not all(0 <= v < params.M for v in fixed):
            raise ConfigError("connected_to_all vertices must be initial vertices")
    elif isinstance(rule, DegreeOne):
        if not isinstance(params, DegreeOneFrozen):
            raise ConfigError("degree_one rule is only meaningful for the frozen model")
    elif not isinstance(rule, All):
        raise ConfigError(f"unsupported rule {rule!r}")
    return rule


@dataclass(eq=False)
class SelectionState:
    rule: object
    members: bytearray
    x_star: list
    s_size: int = 0
    # new_counts[d] = selected added vertices whose initial degree was d
    new_counts: list = field(default_factory=list)

    def is_selected(self, v):
        return bool(self.members[v])

    def selected_vertices(self):
        return [v for v, flag in enumerate(self.members) if flag]


def init_selection(rule, state) -> SelectionState:
    """Fix S_0 for ``rule`` on the initial graph held in ``state``."""
    params = state.params
    validate_rule(rule, params)
    n0 = state.n_initial
    if isinstance(rule, Level):
        labels = state.aux.depth if isinstance(params, Port) else state.aux.dist
        chosen = {v for v in range(n0) if labels[v] == rule.j}
    elif isinstance(rule, NeighborsOf):
        chosen = set()
        for a, b in state.initial_edges:
            if a == rule.target:
                chosen.add(b)
            elif b == rule.target:
                chosen.add(a)
    elif isinstance(rule, ConnectedToAll):
        chosen = set(range(n0)) - set(rule.fixed)
    elif isinstance(rule, DegreeOne):
        chosen = {v for v in range(n0) if state.degrees[v] == 1}
    else:
        chosen = set(range(n0))
    members = bytearray(n0)
    x_star = []
    for v in chosen:
        members[v] = 1
        bump(x_star, state.degrees[v])
    return SelectionState(rule=rule, members=members, x_star=x_star, s_size=len(chosen))


def classify_new_vertex(rule, outcome, state) -> bool:
    """Membership of the new vertex, using only its freshly drawn edges."""
    if isinstance(rule, Level):
        return outcome.label == rule.j
    if isinstance(rule, NeighborsOf):
        return rule.target in outcome.endpoints
    if isinstance(rule, ConnectedToAll):
        ends = outcome.endpoints
        return all(v in ends for v in rule.fixed)
    if isinstance(rule, DegreeOne):
        return len(outcome.endpoints) == 1
    return True


def update_selected_degrees(selection, outcome, state, selected):
    """Shift X* for selected endpoints and register the new vertex.

    Must run before ``apply_outcome`` so that ``state.degrees`` still holds
    the pre-step degrees.
    """
    members = selection.members
    x_star = selection.x_star
    degrees = state.degrees
    for v in outcome.endpoints:
        if members[v]:
            d = degrees[v]
            if d >= len(x_star) or x_star[d] <= 0:
                raise InvariantViolation(f"X* underflow at degree {d} for vertex {v}")
            x_star[d] -= 1
            bump(x_star, d + 1)
    if outcome.new_vertex != len(members):
        raise InvariantViolation("selection membership out of sync with the graph")
    members.append(1 if selected else 0)
    if selected:
        k = len(outcome.endpoints)
        bump(x_star, k)
        bump(selection.new_counts, k)
        selection.s_size += 1
    return selection
