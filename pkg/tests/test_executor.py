import random
import threading
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ntpetri import (
    CallbackError,
    ChoiceRule,
    ExecutionPolicy,
    ExplorationLimits,
    InvalidPartition,
    MismatchedStart,
    State,
    StateDelta,
    Termination,
    Trace,
    WorkClusterPartition,
    apply_delta,
    coarsen,
    compute_state_graph,
    compute_work_clusters,
    deadlock_states,
    gallery,
    new_net,
    run,
    validate_trace,
)
from ntpetri.executor import TraceEvent

from netgen import random_net


def test_water_fires_once(water):
    net, s = water
    trace = run(net, s, policy=ExecutionPolicy(max_firings=10))
    assert len(trace) == 1
    assert trace.termination is Termination.QUIESCENT
    assert trace.final_state == net.marking({"H2O": 2})
    assert validate_trace(trace, compute_state_graph(net, s))


def test_quiescent_start():
    net, s = gallery.empty_marking()
    trace = run(net, s)
    assert len(trace) == 0 and trace.termination is Termination.QUIESCENT


def test_zero_firing_limit(water):
    net, s = water
    trace = run(net, s, policy=ExecutionPolicy(max_firings=0))
    assert len(trace) == 0 and trace.termination is Termination.FIRING_LIMIT


def test_invalid_partition_rejected():
    net, s = gallery.shared_input()
    with pytest.raises(InvalidPartition):
        run(net, s, WorkClusterPartition.of([[0], [1]]))


def test_shared_input_cycle_keeps_going():
    net, s = gallery.shared_input_cycle()
    g = compute_state_graph(net, s)
    trace = run(net, s, policy=ExecutionPolicy(max_firings=200, seed=3))
    assert len(trace) == 200 and trace.termination is Termination.FIRING_LIMIT
    assert validate_trace(trace, g)


def test_trace_snapshots_chain(pipeline):
    net, s = pipeline
    trace = run(net, s, policy=ExecutionPolicy(max_firings=300, seed=11))
    prev = s
    for k, ev in enumerate(trace.events):
        assert ev.seq == k
        assert ev.state == apply_delta(prev, ev.delta)
        prev = ev.state


def test_callbacks_run_on_cluster_threads(pipeline):
    net, s = pipeline
    seen = {}
    lock = threading.Lock()

    def cb(tid, delta):
        with lock:
            seen.setdefault(tid, set()).add(threading.current_thread().name)
        assert isinstance(delta, StateDelta)

    callbacks = {tid: cb for tid in range(len(net.transitions))}
    partition = compute_work_clusters(net)
    trace = run(net, s, partition, ExecutionPolicy(max_firings=200), callbacks)
    fired = {ev.transition for ev in trace.events}
    assert set(seen) == fired
    owner = partition.owner()
    for tid, names in seen.items():
        assert names == {f"work-cluster-{owner[tid]}"}


def test_clusters_really_run_concurrently():
    net, s = gallery.disjoint()
    barrier = threading.Barrier(2, timeout=5)

    def meet(tid, delta):
        barrier.wait()

    trace = run(net, s, callbacks={"T0": meet, "T1": meet})
    assert len(trace) == 2 and trace.termination is Termination.QUIESCENT


def test_callback_failure_aborts_with_partial_trace(pipeline):
    net, s = pipeline
    calls = []

    def boom(tid, delta):
        calls.append(tid)
        if len(calls) == 3:
            raise RuntimeError("device unplugged")

    with pytest.raises(CallbackError) as info:
        run(net, s, WorkClusterPartition.single(net), ExecutionPolicy(max_firings=100),
            {"T1": boom})
    err = info.value
    assert err.transition == net.transition_id("T1")
    assert err.trace.termination is Termination.FAILED
    assert "device unplugged" in err.trace.failure
    assert validate_trace(err.trace, compute_state_graph(net, s))


def test_external_stop(pipeline):
    net, s = pipeline
    stop = threading.Event()
    count = []

    def slow(tid, delta):
        count.append(tid)
        if len(count) == 20:
            stop.set()
        time.sleep(0.001)

    trace = run(net, s, callbacks={t: slow for t in range(6)}, stop=stop)
    assert trace.termination is Termination.STOPPED
    assert 20 <= len(trace) < 100


def test_replay_determinism_single_worker(pipeline):
    net, s = pipeline
    one = WorkClusterPartition.single(net)
    for rule in ChoiceRule:
        runs = [run(net, s, one, ExecutionPolicy(seed=42, max_firings=150, choice_rule=rule))
                for _ in range(3)]
        assert runs[0].events == runs[1].events == runs[2].events
    a = run(net, s, one, ExecutionPolicy(seed=1, max_firings=150))
    b = run(net, s, one, ExecutionPolicy(seed=2, max_firings=150))
    assert a.events != b.events


def test_quiescence_ends_in_deadlock_state():
    rng = random.Random(7)
    checked = 0
    while checked < 30:
        net, s = random_net(rng)
        g = compute_state_graph(net, s, ExplorationLimits(max_states=500))
        if not g.complete:
            continue
        trace = run(net, s, policy=ExecutionPolicy(seed=checked, max_firings=500))
        if trace.termination is Termination.QUIESCENT:
            assert trace.final_state in deadlock_states(g)
        checked += 1


def test_validate_trace_rejects_teleport(water):
    net, s = water
    g = compute_state_graph(net, s)
    assert validate_trace(Trace(s), g)
    d = net.delta({"H2": -2, "O2": -1, "H2O": 3})
    forged = Trace(s, [TraceEvent(0, 0, d, apply_delta(s, d))])
    assert not validate_trace(forged, g)
    with pytest.raises(MismatchedStart):
        validate_trace(Trace(State()), g)


def test_non_monotone_custom_under_concurrent_deposits():
    # "take" fires only when A holds exactly one token; producers keep
    # depositing into A from other clusters with slow callbacks
    net = new_net(["S0", "S1", "A", "B"], ["•"])
    net.add_and("fill0", inputs=["S0"], outputs=["A"])
    net.add_and("fill1", inputs=["S1"], outputs=["A"])
    a, b = net.place_id("A"), net.place_id("B")
    net.add_custom("take", inputs=["A"], outputs=["B"],
                   enable=lambda v: v[a, 0] == 1,
                   deltas=lambda v: [StateDelta({(a, 0): -1, (b, 0): 1})])
    s = net.marking({"S0": 3, "S1": 3})
    g = compute_state_graph(net, s)
    partition = compute_work_clusters(net)
    assert len(partition) == 3

    def jitter(tid, delta):
        time.sleep(random.random() * 0.002)

    for seed in range(30):
        trace = run(net, s, partition, ExecutionPolicy(seed=seed),
                    {t: jitter for t in range(3)})
        assert validate_trace(trace, g)
        assert trace.final_state in deadlock_states(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_conformance_under_any_valid_partition(seed):
    rng = random.Random(seed)
    net, s = random_net(rng, max_places=4, max_transitions=5, n_colors=2, max_tokens=4)
    g = compute_state_graph(net, s, ExplorationLimits(max_states=2000))
    if not g.complete:
        return
    maximal = compute_work_clusters(net)
    partitions = [maximal, WorkClusterPartition.single(net)]
    if len(maximal) > 2:
        partitions.append(coarsen(maximal, [(0, len(maximal) - 1)]))
    for p in partitions:
        trace = run(net, s, p, ExecutionPolicy(seed=seed % 1000, max_firings=40))
        assert validate_trace(trace, g)
