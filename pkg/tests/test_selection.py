import pytest

from conftest import fresh, recount
from restricted_degree.errors import ConfigError, InvariantViolation
from restricted_degree.graph import StepOutcome, apply_outcome, trimmed
from restricted_degree.models import DegreeOneFrozen, Indep, Multitree, Port, init_state
from restricted_degree.selection import (All, ConnectedToAll, DegreeOne, Level, NeighborsOf,
                                         classify_new_vertex, rule_from_dict,
                                         rule_to_dict, update_selected_degrees, validate_rule)
from restricted_degree.simulate import advance, evolve, evolve_fast, run_replica


def test_initial_sets():
    _, sel = fresh(Port(0.0), Level(1))
    assert sel.selected_vertices() == [1] and sel.s_size == 1
    _, sel = fresh(Indep(1.0), NeighborsOf(0))
    assert sel.selected_vertices() == [1]
    _, sel = fresh(Multitree(3), ConnectedToAll((0,)))
    assert sel.selected_vertices() == [1, 2]
    _, sel = fresh(Multitree(3), All())
    assert sel.s_size == 3


@pytest.mark.parametrize("params,rule", [
    (Indep(1.0), Level(1)), (Port(0.0), ConnectedToAll((0,))), (Multitree(3), ConnectedToAll((0, 1, 2))),
    (Multitree(3), ConnectedToAll((5,))), (Port(0.0), NeighborsOf(2)), (Port(0.0), Level(0)),
    (Indep(1.0), DegreeOne())])
def test_incompatible_pairs(params, rule):
    with pytest.raises(ConfigError):
        validate_rule(rule, params)


def test_rule_round_trip():
    for rule in (Level(2), NeighborsOf(0), ConnectedToAll((0, 1)), All(), DegreeOne()):
        assert rule_from_dict(rule_to_dict(rule)) == rule
    with pytest.raises(ConfigError):
        rule_from_dict({"name": "level"})


def test_classification():
    state = init_state(Port(0.0))
    assert classify_new_vertex(Level(2), StepOutcome(2, [1], label=2), state)
    state = init_state(Indep(1.0))
    assert not classify_new_vertex(NeighborsOf(0), StepOutcome(2, []), state)
    state = init_state(Multitree(3))
    assert classify_new_vertex(ConnectedToAll((0, 1)), StepOutcome(6, [0, 1, 5]), state)
    assert not classify_new_vertex(ConnectedToAll((0, 2)), StepOutcome(6, [0, 1, 5]), state)


def test_update_shifts_selected_endpoint():
    state, sel = fresh(Port(0.0), All())
    # vertex 0 reaches degree 3
    for _ in range(2):
        out = StepOutcome(len(state.degrees), [0], label=1)
        update_selected_degrees(sel, out, state, True)
        apply_outcome(state, out)
    before = list(sel.x_star)
    out = StepOutcome(len(state.degrees), [0], label=1)
    update_selected_degrees(sel, out, state, False)
    assert sel.x_star[3] == before[3] - 1 and sel.x_star[4] == 1
    assert sel.x_star[1] == before[1]


def test_update_new_selected_and_unselected():
    state, sel = fresh(Port(0.0), Level(1))
    before = list(sel.x_star)
    out = StepOutcome(2, [0], label=1)
    update_selected_degrees(sel, out, state, True)
    assert sel.x_star[1] == before[1] + 1 and sel.s_size == 2
    apply_outcome(state, out)
    # vertex 0 is not selected, new vertex not selected: no change
    before = list(sel.x_star)
    out = StepOutcome(3, [0], label=1)
    update_selected_degrees(sel, out, state, False)
    assert sel.x_star == before


def test_underflow_detected():
    state, sel = fresh(Port(0.0), All())
    sel.x_star[1] = 0
    with pytest.raises(InvariantViolation):
        update_selected_degrees(sel, StepOutcome(2, [0], label=1), state, False)


@pytest.mark.parametrize("params,rule", [
    (Port(0.0), Level(2)), (Indep(1.0), NeighborsOf(0)), (Multitree(3), ConnectedToAll((0, 1))),
    (Multitree(2), Level(1)), (DegreeOneFrozen(1.0), DegreeOne())])
def test_restricted_histogram_matches_recount(params, rule):
    state, sel = fresh(params, rule, seed=21)
    sizes = []
    members = set()
    for step in range(1, 3001):
        advance(state, sel)
        now = set(sel.selected_vertices())
        assert members <= now
        members = now
        sizes.append(sel.s_size)
        if step % 300 == 0:
            expect = recount([state.degrees[v] for v in members])
            assert trimmed(sel.x_star) == expect
            assert sel.s_size == len(members)
    assert sizes == sorted(sizes)


def test_all_rule_equals_full_histogram():
    cps, state, sel = run_replica(Indep(1.0), All(), 2000, seed=3)
    for cp in cps:
        assert cp.x_star == cp.histogram
        assert cp.s_size == cp.n_vertices


def test_frozen_degree_one_members_stay_at_one():
    cps, state, sel = run_replica(DegreeOneFrozen(1.0), DegreeOne(), 5000, seed=2)
    assert all(state.degrees[v] == 1 for v in sel.selected_vertices())
    for cp in cps:
        assert sum(cp.x_star[2:]) == 0


@pytest.mark.parametrize("params,rule", [
    (Port(0.0), Level(1)), (Port(1.5), NeighborsOf(0)), (Port(-0.5), All()),
    (Multitree(3), Level(1)), (Multitree(3), ConnectedToAll((0, 2))), (Multitree(2), NeighborsOf(1))])
def test_fast_path_identical(params, rule):
    a_state, a_sel = fresh(params, rule, seed=77)
    b_state, b_sel = fresh(params, rule, seed=77)
    cps = [1, 10, 100, 1000, 3000]
    a = evolve(a_state, a_sel, 3000, cps)
    b = evolve_fast(b_state, b_sel, 3000, cps)
    assert a == b
    assert a_state.degrees == b_state.degrees
    assert bytes(a_sel.members) == bytes(b_sel.members)
