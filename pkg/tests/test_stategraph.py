import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntpetri import (
    ExplorationLimits,
    State,
    Truncation,
    analyze,
    apply_delta,
    check_predicate,
    compute_state_graph,
    deadlock_states,
    gallery,
    graph_has_cycle,
    net_has_cycle,
    new_net,
    serialize_state_graph,
    state_count_bound,
    updates,
)

from netgen import brute_force_deadlocks, brute_force_graph, random_net

UNLIMITED = ExplorationLimits.unlimited()


def as_oracle(g):
    """Convert a StateGraph into the oracle's (nodes, edges) representation."""
    def key(s):
        return tuple(s.items())
    nodes = {key(s) for s in g.nodes}
    edges = {(key(s), e.transition, key(e.target)) for s in g.nodes for e in g.edges[s]}
    return nodes, edges


def test_water_graph(water):
    net, s = water
    g = compute_state_graph(net, s)
    assert g.complete
    assert set(g.nodes) == {s, net.marking({"H2O": 2})}
    assert g.edge_count() == 1
    assert deadlock_states(g) == {net.marking({"H2O": 2})}
    assert not graph_has_cycle(g)


def test_self_replenishing_truncates_at_max_states():
    net, s = gallery.self_replenishing()
    g = compute_state_graph(net, s, ExplorationLimits(max_states=50))
    assert len(g) == 50
    assert g.truncation is Truncation.MAX_STATES
    assert g.status == "truncated(max_states)"
    # the last discovered state could not be expanded; it is not a deadlock
    assert deadlock_states(g) == frozenset()
    assert net.marking({"P0": 1, "P1": 49}) in g.frontier


def test_token_and_depth_limits():
    net, s = gallery.self_replenishing()
    g = compute_state_graph(net, s, ExplorationLimits(max_tokens_per_place=5))
    assert g.truncation is Truncation.MAX_TOKENS_PER_PLACE
    assert len(g) == 6
    g = compute_state_graph(net, s, ExplorationLimits(max_depth=3))
    assert g.truncation is Truncation.MAX_DEPTH
    assert len(g) == 4
    assert g.frontier == {net.marking({"P0": 1, "P1": 3})}


def test_depth_limit_on_finite_graph_reports_complete_when_unreached(water):
    net, s = water
    g = compute_state_graph(net, s, ExplorationLimits(max_depth=1))
    assert g.complete and len(g) == 2


def test_start_without_enabled_transitions():
    net, s = gallery.empty_marking()
    g = compute_state_graph(net, s)
    assert (len(g), g.edge_count(), g.complete) == (1, 0, True)
    assert deadlock_states(g) == {s}
    assert not graph_has_cycle(g)


def test_token_cycle_has_no_deadlock():
    net, s = gallery.shared_input_cycle()
    g = compute_state_graph(net, s)
    assert deadlock_states(g) == frozenset() == frozenset(brute_force_deadlocks(net, s))
    assert graph_has_cycle(g)


def test_xor_returning_token_upstream_cycles():
    net = new_net(["A", "B"], ["•"])
    net.add_xor("X", pairs=[("A", "B"), ("B", "A")])
    s = net.marking({"A": 1})
    g = compute_state_graph(net, s)
    assert len(g) == 2
    assert any(e.target == s for e in g.edges[net.marking({"B": 1})])
    assert graph_has_cycle(g)


def test_net_cycles():
    assert not net_has_cycle(gallery.water()[0])
    net = new_net(["P0"], ["•"])
    net.add_and("T0", inputs=["P0"], outputs=["P0"])
    assert net_has_cycle(net)
    assert net_has_cycle(gallery.voice_pipeline()[0])


def test_cycle_in_net_not_reached_by_tokens():
    net, s = gallery.unreachable_loop()
    assert net_has_cycle(net)
    assert not graph_has_cycle(compute_state_graph(net, s))


def test_source_transitions_can_cycle_an_acyclic_net():
    # a producer with no inputs plus a consumer: the state graph loops
    # although the net has no directed cycle
    net = new_net(["P"], ["•"])
    net.add_and("make", outputs=["P"])
    net.add_and("take", inputs=["P"])
    g = compute_state_graph(net, State(), ExplorationLimits(max_tokens_per_place=3))
    assert graph_has_cycle(g) and not net_has_cycle(net)


@pytest.mark.parametrize("p,t,expected", [(1, 1, 2), (2, 3, 27), (0, 5, 1), (0, 0, 1),
                                          (10, 30, 11**30)])
def test_state_count_bound(p, t, expected):
    assert state_count_bound(p, t) == expected


def test_check_predicate(water):
    net, s = water
    g = compute_state_graph(net, s)
    assert check_predicate(g, lambda st: st.total() <= 3) == []
    h2o = net.place_id("H2O")
    assert check_predicate(g, lambda st: st[h2o, 0] == 0) == [net.marking({"H2O": 2})]
    assert check_predicate(g, lambda st: True) == []


def test_analyze_report(water):
    net, s = water
    report = analyze(net, compute_state_graph(net, s), {"no-water": lambda st: st.total() < 2})
    assert report.state_count == 2 and report.complete
    assert report.deadlock_states == [net.marking({"H2O": 2})]
    assert report.state_bound == 64
    assert len(report.predicate_violations["no-water"]) == 2


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_matches_brute_force_enumeration(seed):
    rng = random.Random(seed)
    net, s = random_net(rng, n_colors=rng.randint(1, 2))
    oracle = brute_force_graph(net, s, cap=2000)
    g = compute_state_graph(net, s, ExplorationLimits(max_states=2001))
    if oracle is None:
        assert not g.complete
        return
    assert g.complete
    assert as_oracle(g) == oracle
    # soundness: every edge replays through enabled/updates/apply_delta
    for node in g.nodes:
        for e in g.edges[node]:
            t = net.transitions[e.transition]
            assert t.enabled(node) and e.delta in updates(t, node)
            assert apply_delta(node, e.delta) == e.target
    # completeness
    for node in g.nodes:
        for tid, t in enumerate(net.transitions):
            if t.enabled(node):
                for d in updates(t, node):
                    assert g.has_edge(node, tid, d, apply_delta(node, d))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_graph_is_deterministic(seed):
    net, s = random_net(random.Random(seed), n_colors=2)
    a = compute_state_graph(net, s, ExplorationLimits(max_states=500))
    b = compute_state_graph(net, s, ExplorationLimits(max_states=500))
    assert serialize_state_graph(a, net) == serialize_state_graph(b, net)


def test_deep_graph_does_not_recurse():
    net, s = gallery.self_replenishing()
    g = compute_state_graph(net, s, ExplorationLimits(max_tokens_per_place=20_000))
    assert len(g) == 20_001
    assert g.truncation is Truncation.MAX_TOKENS_PER_PLACE


def test_pipeline_graph_matches_oracle(pipeline):
    net, s = pipeline
    g = compute_state_graph(net, s)
    assert as_oracle(g) == brute_force_graph(net, s)
    assert len(g) == 448
