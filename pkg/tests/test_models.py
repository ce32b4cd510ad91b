import math

import numpy as np
import pytest
from scipy import stats

from conftest import recount
from restricted_degree.errors import ConfigError
from restricted_degree.graph import StepOutcome, apply_outcome, trimmed
from restricted_degree.models import (DegreeOneFrozen, Indep, Multitree, Port, binomial_inverse,
                                      init_state, indep_step, multitree_step, params_from_dict,
                                      params_to_dict, port_selection_probabilities, port_step)
from restricted_degree.rng import RandomSource
from restricted_degree.selection import All
from restricted_degree.simulate import run_replica


# -- parameters and initial graphs ----------------------------------------

@pytest.mark.parametrize("bad", [lambda: Port(-1.0), lambda: Port(float("nan")), lambda: Indep(0.0),
                                 lambda: Indep(2.0), lambda: Multitree(1), lambda: Multitree(2.5),
                                 lambda: DegreeOneFrozen(2.5)])
def test_parameter_ranges(bad):
    with pytest.raises(ConfigError):
        bad()


def test_error_names_bound():
    with pytest.raises(ConfigError, match="beta > -1"):
        Port(-2)


def test_params_round_trip():
    for p in (Port(0.5), Indep(1.2), Multitree(4), DegreeOneFrozen(1.0)):
        assert params_from_dict(params_to_dict(p)) == p
    with pytest.raises(ConfigError):
        params_from_dict({"name": "port", "lambda": 1})


def test_initial_states():
    s = init_state(Port(0.0))
    assert s.degrees == [1, 1] and s.edge_count == 1
    s = init_state(Multitree(3))
    assert s.degrees == [2, 2, 2]
    assert [s.aux.base(i) for i in range(s.aux.n_bases)] == [(0, 1, 2)]
    s = init_state(Indep(1.0))
    assert s.degrees == [1, 1] and s.aux.total == 2
    s = init_state(DegreeOneFrozen(1.0))
    assert s.degrees == [2, 2, 2] and s.aux.total == 6


# -- PORT ------------------------------------------------------------------

def test_port_selection_probabilities():
    state = init_state(Port(0.0))
    assert port_selection_probabilities(state) == [0.5, 0.5]
    apply_outcome(state, StepOutcome(2, [0], label=1))
    assert port_selection_probabilities(state) == [0.5, 0.25, 0.25]


def _fixed_tree(beta):
    state = init_state(Port(beta), RandomSource(3))
    for parent in [0, 0, 1, 2, 0, 3, 3, 5]:
        apply_outcome(state, StepOutcome(len(state.degrees), [parent], label=state.aux.depth[parent] + 1))
    assert len(state.degrees) == 10
    return state


@pytest.mark.parametrize("beta", [0.0, 2.0, -0.5])
def test_port_frequencies_multinomial(beta):
    state = _fixed_tree(beta)
    probs = np.array(port_selection_probabilities(state))
    trials = 100_000
    counts = np.zeros(10)
    for _ in range(trials):
        counts[port_step(state).endpoints[0]] += 1
    sigma = np.sqrt(trials * probs * (1 - probs))
    assert np.all(np.abs(counts - trials * probs) < 3.5 * sigma)


def test_port_initial_choice_is_fair():
    hits = 0
    trials = 20_000
    for seed in range(trials):
        hits += port_step(init_state(Port(1.0), RandomSource(seed))).endpoints[0] == 0
    assert abs(hits / trials - 0.5) < 3 * math.sqrt(0.25 / trials)


def test_port_gives_tree_with_depths():
    _, state, _ = run_replica(Port(0.3), All(), 2000, seed=5, fast=False)
    assert state.edge_count == len(state.degrees) - 1
    aux = state.aux
    for v in range(2, len(state.degrees)):
        assert aux.depth[v] == aux.depth[aux.parent[v]] + 1


# -- multitree ---------------------------------------------------------------

def test_multitree_first_step_and_base_count():
    state = init_state(Multitree(3), RandomSource(0))
    out = multitree_step(state)
    assert out.endpoints == [0, 1, 2] and out.label == 1
    apply_outcome(state, out)
    assert state.aux.n_bases == 4
    assert state.aux.base(0) == (0, 1, 2)
    assert sorted(state.aux.base(i) for i in range(1, 4)) == [(0, 1, 3), (0, 3, 2), (3, 1, 2)]
    _, state, _ = run_replica(Multitree(3), All(), 500, seed=1, fast=False)
    assert state.aux.n_bases == 1 + 500 * 3
    assert state.edge_count == 3 + 500 * 3
    assert set(state.degrees[3:]) >= {3}
    assert state.new_degree_counts == [0, 0, 0, 500]


def test_multitree_distance_labels():
    _, state, _ = run_replica(Multitree(2), All(), 300, seed=2, fast=False)
    aux = state.aux
    for i in range(aux.n_bases):
        members = aux.base(i)
        # every base member pair stays adjacent; distances differ by at most 1
        assert abs(aux.dist[members[0]] - aux.dist[members[1]]) <= 1


# -- independent edges ------------------------------------------------------

def test_binomial_inverse_matches_scipy():
    for size, p in [(1, 0.3), (7, 0.2), (50, 0.01), (400, 0.004)]:
        for u in np.linspace(0.001, 0.999, 37):
            assert binomial_inverse(u, size, p) == int(stats.binom.ppf(u, size, p))
    assert binomial_inverse(0.5, 5, 1.0) == 5
    assert binomial_inverse(0.5, 0, 0.4) == 0


def test_indep_initial_step_probabilities():
    trials = 40_000
    zero = both = 0
    for seed in range(trials):
        k = len(indep_step(init_state(Indep(1.0), RandomSource(seed))).endpoints)
        zero += k == 0
        both += k == 2
    assert abs(zero / trials - 0.25) < 3 * math.sqrt(0.1875 / trials)
    assert abs(both / trials - 0.25) < 3 * math.sqrt(0.1875 / trials)


def test_degree_zero_never_chosen():
    state = init_state(Indep(1.0), RandomSource(0))
    apply_outcome(state, StepOutcome(2, []))
    assert state.aux.inclusion_probability(0) == 0.0
    for _ in range(2000):
        assert 2 not in indep_step(state).endpoints


def _naive_indep(lam, n, seed):
    rng = np.random.default_rng(seed)
    degrees = [1, 1]
    for _ in range(n):
        T = sum(degrees)
        probs = np.minimum(lam * np.array(degrees) / T, 1.0)
        hit = np.flatnonzero(rng.random(len(degrees)) < probs)
        for v in hit:
            degrees[v] += 1
        degrees.append(len(hit))
    return degrees


def test_indep_matches_naive_bernoulli_chi_square():
    lam, n, reps = 1.0, 1500, 12
    fast = np.zeros(6)
    slow = np.zeros(6)
    for r in range(reps):
        _, state, _ = run_replica(Indep(lam), All(), n, seed=100 + r)
        for d, v in enumerate(recount(state.degrees)):
            fast[min(d, 5)] += v
        for d, v in enumerate(recount(_naive_indep(lam, n, 200 + r))):
            slow[min(d, 5)] += v
    table = np.vstack([fast, slow])
    _, pvalue, _, _ = stats.chi2_contingency(table)
    assert pvalue > 1e-3


def test_indep_mean_endpoint_count():
    _, state, _ = run_replica(Indep(1.5), All(), 20_000, seed=9)
    counts = state.new_degree_counts
    mean = sum(d * v for d, v in enumerate(counts)) / state.n
    # per-step counts have variance about lambda
    assert abs(mean - 1.5) < 3 * math.sqrt(1.5 / state.n) + 0.01
    assert state.clamp_events == 0


def test_indep_bins_stay_consistent():
    _, state, _ = run_replica(Indep(1.0), All(), 3000, seed=4)
    aux = state.aux
    seen = sorted(v for pool in aux.bins for v in pool)
    assert seen == list(range(len(state.degrees)))
    for b, pool in enumerate(aux.bins):
        for i, v in enumerate(pool):
            assert state.degrees[v].bit_length() == b
            assert aux.pos[v] == i
    assert aux.total == sum(state.degrees)


# -- frozen counterexample -------------------------------------------------

def test_frozen_inclusion_probabilities():
    state = init_state(DegreeOneFrozen(1.0), RandomSource(0))
    apply_outcome(state, StepOutcome(3, [0]))
    # degrees [3, 2, 2, 1]; T' = 7
    aux = state.aux
    assert aux.total == 7
    assert aux.inclusion_probability(1) == 0.0
    assert aux.inclusion_probability(2) == pytest.approx(2 / 7)


def test_frozen_degree_two_probability_half():
    # two vertices of degree 2 only: T' = 4, each included w.p. 1/2
    state = init_state(DegreeOneFrozen(1.0), RandomSource(0))
    state.aux.total = 4
    assert state.aux.inclusion_probability(2) == 0.5


def test_frozen_low_degrees_never_move():
    state = init_state(DegreeOneFrozen(1.0), RandomSource(8))
    from restricted_degree.simulate import advance
    from restricted_degree.selection import init_selection
    sel = init_selection(All(), state)
    low = set()
    for step in range(3000):
        out, _ = advance(state, sel)
        assert not low.intersection(out.endpoints)
        low.update(v for v in range(len(state.degrees)) if state.degrees[v] < 2)
        if step % 500 == 0:
            assert trimmed(state.histogram) == recount(state.degrees)
