import pytest

from conftest import fresh, recount
from restricted_degree.errors import InvariantViolation
from restricted_degree.graph import StepOutcome, apply_outcome, snapshot, trimmed
from restricted_degree.models import Indep, Multitree, Port, init_state
from restricted_degree.selection import All, Level
from restricted_degree.simulate import advance


def test_apply_single_edge_to_ab_tree():
    state = init_state(Port(0.0))
    apply_outcome(state, StepOutcome(new_vertex=2, endpoints=[0], label=1))
    assert state.degrees == [2, 1, 1]
    assert trimmed(state.histogram) == (0, 2, 1)
    assert state.n == 1 and state.edge_count == 2


def test_apply_empty_outcome_gives_degree_zero():
    state = init_state(Indep(1.0))
    apply_outcome(state, StepOutcome(new_vertex=2, endpoints=[]))
    assert state.degrees[2] == 0
    assert state.histogram[0] == 1
    assert state.edge_count == 1


def test_apply_multitree_base():
    state = init_state(Multitree(2))
    apply_outcome(state, StepOutcome(new_vertex=2, endpoints=[0, 1], label=1, base_index=0))
    assert state.degrees == [2, 2, 2]
    assert state.edge_count == 3


@pytest.mark.parametrize("endpoints", [[0, 0], [5], [-1]])
def test_apply_rejects_bad_endpoints(endpoints):
    state = init_state(Indep(1.0))
    with pytest.raises(InvariantViolation):
        apply_outcome(state, StepOutcome(new_vertex=2, endpoints=endpoints))


def test_apply_rejects_wrong_vertex_id():
    state = init_state(Port(0.0))
    with pytest.raises(InvariantViolation):
        apply_outcome(state, StepOutcome(new_vertex=7, endpoints=[0], label=1))


def test_initial_snapshot_all_rule():
    state, sel = fresh(Port(0.0), All())
    cp = snapshot(state, sel)
    assert cp.n == 0
    assert cp.histogram == (0, 2)
    assert cp.x_star == (0, 2)
    assert cp.s_size == 2
    assert sum(cp.x_star) == cp.s_size


def test_snapshot_is_a_copy():
    state, sel = fresh(Port(0.0), All())
    cp = snapshot(state, sel)
    advance(state, sel)
    assert cp.histogram == (0, 2)


@pytest.mark.parametrize("params,rule", [(Port(0.0), Level(1)), (Port(1.5), All()),
                                         (Indep(1.0), All()), (Multitree(3), Level(1))])
def test_histogram_matches_recount(params, rule):
    state, sel = fresh(params, rule, seed=11)
    previous = list(state.degrees)
    for step in range(1, 1001):
        advance(state, sel)
        assert all(a <= b for a, b in zip(previous, state.degrees))
        previous = list(state.degrees)
        if step % 100 == 0:
            state.check()
            assert trimmed(state.histogram) == recount(state.degrees)
            assert sum(state.histogram) == state.n_initial + state.n
            assert sum(state.degrees) == 2 * state.edge_count
