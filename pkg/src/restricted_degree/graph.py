"""Evolving graph state and exact degree accounting.

Only degrees, the degree histogram and whatever auxiliary structure a model
needs are stored; the adjacency itself is not kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import InvariantViolation


def bump(hist, d, delta=1):
    """Add ``delta`` to ``hist[d]``, growing the list with zeros as needed."""
    if d >= len(hist):
        hist.extend([0] * (d + 1 - len(hist)))
    hist[d] += delta


def trimmed(hist):
    """Histogram as a tuple without trailing zeros."""
    end = len(hist)
    while end and hist[end - 1] == 0:
        end -= 1
    return tuple(hist[:end])


@dataclass
class StepOutcome:
    """Result of one model step, before it is applied.

    ``label`` is the distance label of the new vertex (tree depth or
    multitree distance) when the model tracks one; ``base_index`` is the
    chosen base for multitrees.
    """

    new_vertex: int
    endpoints: list
    label: int | None = None
    base_index: int | None = None


@dataclass(eq=False)
class GraphState:
    params: Any
    degrees: list
    histogram: list
    edge_count: int
    aux: Any
    rng: Any = None
    n: int = 0
    n_initial: int = 0
    initial_edges: tuple = ()
    # new_degree_counts[d] = number of added vertices whose initial degree is d
    new_degree_counts: list = field(default_factory=list)
    clamp_events: int = 0

    @property
    def n_vertices(self):
        return len(self.degrees)

    def check(self):
        """Cheap global invariants; raises :class:`InvariantViolation`."""
        if sum(self.histogram) != self.n_initial + self.n:
            raise InvariantViolation(
                f"histogram mass {sum(self.histogram)} != |V_0| + n = {self.n_initial + self.n}"
            )
        if len(self.degrees) != self.n_initial + self.n:
            raise InvariantViolation("vertex count out of sync with step counter")
        if sum(self.degrees) != 2 * self.edge_count:
            raise InvariantViolation("degree sum differs from twice the edge count")


@dataclass(frozen=True)
class Checkpoint:
    """Immutable snapshot of both histograms at step ``n``.

    Histograms are tuples indexed by degree.  ``new_degrees`` and
    ``new_selected_degrees`` count added vertices (all / selected ones) by
    their degree at creation.
    """

    n: int
    histogram: tuple
    x_star: tuple
    s_size: int
    n_vertices: int
    new_degrees: tuple = ()
    new_selected_degrees: tuple = ()

    def validate(self):
        if sum(self.x_star) != self.s_size:
            raise InvariantViolation("s_size differs from the restricted histogram mass")
        if sum(self.histogram) != self.n_vertices:
            raise InvariantViolation("histogram mass differs from the vertex count")
        for d, xs in enumerate(self.x_star):
            if xs < 0 or xs > (self.histogram[d] if d < len(self.histogram) else 0):
                raise InvariantViolation(f"X*[{self.n},{d}] = {xs} exceeds X[{self.n},{d}]")
        return self


def apply_outcome(state: GraphState, outcome: StepOutcome) -> GraphState:
    """Add the new vertex and its edges to ``state`` in place."""
    degrees = state.degrees
    nv = len(degrees)
    endpoints = outcome.endpoints
    if outcome.new_vertex != nv:
        raise InvariantViolation(f"new vertex must be {nv}, got {outcome.new_vertex}")
    if len(endpoints) > 1 and len(set(endpoints)) != len(endpoints):
        raise InvariantViolation(f"duplicate endpoint in {endpoints}")
    hist = state.histogram
    for v in endpoints:
        if not 0 <= v < nv:
            raise InvariantViolation(f"endpoint {v} does not exist (|V| = {nv})")
        d = degrees[v]
        hist[d] -= 1
        bump(hist, d + 1)
        degrees[v] = d + 1
    k = len(endpoints)
    degrees.append(k)
    bump(hist, k)
    bump(state.new_degree_counts, k)
    state.edge_count += k
    state.n += 1
    state.aux.absorb(state, outcome)
    return state


def snapshot(state: GraphState, selection) -> Checkpoint:
    return Checkpoint(
        n=state.n,
        histogram=trimmed(state.histogram),
        x_star=trimmed(selection.x_star),
        s_size=selection.s_size,
        n_vertices=len(state.degrees),
        new_degrees=trimmed(state.new_degree_counts),
        new_selected_degrees=trimmed(selection.new_counts),
    )
