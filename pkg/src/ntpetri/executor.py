"""Concurrent execution: one worker thread per work cluster.

A firing happens in three steps:

1. *reserve* - under the store lock the worker picks an enabled
   (transition, delta) of its own cluster, removes the consumed tokens,
   appends the event to the trace and marks the output places pending;
2. the transition's callback runs with no lock held, concurrently with
   other clusters;
3. *deposit* - the produced tokens are added and the owning clusters of
   those places are woken.

The trace is linearized at step 1, with each event's snapshot already
including its outputs.  A worker does not reserve while a deposit into
one of its input places is pending, so the marking it sees on its inputs
is exactly the linearized one.  Since each place has at most one
consuming cluster, that makes every trace step an edge of the state graph.
"""

from __future__ import annotations

import enum
import random
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .clusters import WorkClusterPartition, cluster_inputs, validate_partition
from .core import Net, State, StateDelta, apply_delta
from .errors import CallbackError, InvalidPartition, MismatchedStart
from .stategraph import StateGraph

_POLL = 0.05


class ChoiceRule(str, enum.Enum):
    SEEDED_RANDOM = "seeded_random"
    FIRST_ENABLED = "first_enabled"


class Termination(str, enum.Enum):
    QUIESCENT = "quiescent"
    FIRING_LIMIT = "firing_limit"
    STOPPED = "stopped"
    FAILED = "failed"


@dataclass(frozen=True)
class ExecutionPolicy:
    """How runtime nondeterminism is resolved and when a run stops.

    ``max_firings=None`` runs until quiescence or an external stop.
    """

    seed: int = 0
    choice_rule: ChoiceRule = ChoiceRule.SEEDED_RANDOM
    max_firings: int | None = None

    def __post_init__(self):
        if self.max_firings is not None and self.max_firings < 0:
            raise ValueError("max_firings must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    transition: int
    delta: StateDelta
    state: State


@dataclass
class Trace:
    start: State
    events: list[TraceEvent] = field(default_factory=list)
    termination: Termination | None = None
    failure: str | None = None

    def __len__(self):
        return len(self.events)

    @property
    def final_state(self) -> State:
        return self.events[-1].state if self.events else self.start

    def states(self) -> list[State]:
        return [self.start] + [e.state for e in self.events]


Callback = Callable[[int, StateDelta], object]


class _Run:
    def __init__(self, net, start, partition, policy, callbacks, stop):
        self.net = net
        self.policy = policy
        self.callbacks = callbacks
        self.stop = stop
        self.clusters = partition.clusters
        self.inputs = [cluster_inputs(net, c) for c in self.clusters]
        self.owner = {p: i for i, ps in enumerate(self.inputs) for p in ps}

        self.lock = threading.Lock()
        self.wakeup = [threading.Condition(self.lock) for _ in self.clusters]
        # physical token store; lags the trace snapshot by pending deposits
        self.store: Counter = Counter(dict(start.items()))
        self.pending: Counter = Counter()
        self.in_flight = 0
        self.trace = Trace(start)
        self.snapshot = start
        self.failure: tuple[int | None, BaseException] | None = None
        self.rngs = [random.Random(f"{policy.seed}/{i}") for i in range(len(self.clusters))]

    # -- helpers, all called with self.lock held -------------------------------

    def _view(self, places) -> State:
        return State((k, n) for k, n in self.store.items() if k[0] in places and n)

    def _options(self, idx):
        view = self._view(self.inputs[idx])
        out = []
        for tid in self.clusters[idx]:
            t = self.net.transitions[tid]
            if t.enabled(view):
                out.extend((tid, d) for d in t.updates(view))
        return out

    def _any_enabled(self) -> bool:
        return any(self.net.transitions[tid].enabled(self._view(self.inputs[i]))
                   for i, c in enumerate(self.clusters) for tid in c)

    def _gated(self, idx) -> bool:
        return any(self.pending[p] for p in self.inputs[idx])

    def _finish(self, reason):
        if self.trace.termination is None:
            self.trace.termination = reason
        for cond in self.wakeup:
            cond.notify_all()

    def _reserve(self, tid, delta) -> TraceEvent:
        for key, n in delta.negative_part().items():
            self.store[key] += n
        self.snapshot = apply_delta(self.snapshot, delta)
        event = TraceEvent(len(self.trace.events), tid, delta, self.snapshot)
        self.trace.events.append(event)
        for p in delta.produced_places():
            self.pending[p] += 1
        self.in_flight += 1
        limit = self.policy.max_firings
        if limit is not None and len(self.trace.events) >= limit:
            self._finish(Termination.FIRING_LIMIT)
        return event

    def _deposit(self, delta):
        for key, n in delta.positive_part().items():
            self.store[key] += n
        woken = set()
        for p in delta.produced_places():
            self.pending[p] -= 1
            if p in self.owner:
                woken.add(self.owner[p])
        self.in_flight -= 1
        for i in woken:
            self.wakeup[i].notify()

    # -- worker ----------------------------------------------------------------

    def _next_firing(self, idx):
        cond = self.wakeup[idx]
        while True:
            if self.trace.termination is not None:
                return None
            if self.stop is not None and self.stop.is_set():
                self._finish(Termination.STOPPED)
                return None
            if not self._gated(idx):
                options = self._options(idx)
                if options:
                    if self.policy.choice_rule is ChoiceRule.FIRST_ENABLED:
                        return options[0]
                    return self.rngs[idx].choice(options)
                if self.in_flight == 0 and not self._any_enabled():
                    self._finish(Termination.QUIESCENT)
                    return None
            cond.wait(_POLL)

    def worker(self, idx):
        tid = None
        try:
            while True:
                with self.lock:
                    choice = self._next_firing(idx)
                    if choice is None:
                        return
                    tid, delta = choice
                    self._reserve(tid, delta)
                callback = self.callbacks.get(tid)
                if callback is not None:
                    callback(tid, delta)
                with self.lock:
                    self._deposit(delta)
                tid = None
        except BaseException as exc:  # noqa: BLE001 - any worker failure aborts the run
            with self.lock:
                if self.failure is None:
                    self.failure = (tid, exc)
                self._finish(Termination.FAILED)


def _resolve_callbacks(net, callbacks) -> dict[int, Callback]:
    return {net.transition_id(k): v for k, v in (callbacks or {}).items()}


def run(net: Net, start: State, partition: WorkClusterPartition | None = None,
        policy: ExecutionPolicy | None = None,
        callbacks: Mapping[int | str, Callback] | None = None,
        stop: threading.Event | None = None) -> Trace:
    """Execute ``net`` from ``start`` with one thread per cluster of ``partition``.

    Callbacks are keyed by transition id or name and are called as
    ``callback(transition_id, delta)`` on the owning worker's thread.  A
    callback (or custom transition) that raises aborts the run with
    :class:`CallbackError`, whose ``trace`` holds the firings logged so far.
    """
    from .clusters import compute_work_clusters

    policy = policy or ExecutionPolicy()
    if partition is None:
        partition = compute_work_clusters(net)
    if not validate_partition(net, partition):
        raise InvalidPartition("two clusters share an input place")
    net.freeze()
    state = _Run(net, start, partition, policy, _resolve_callbacks(net, callbacks), stop)

    if policy.max_firings == 0:
        with state.lock:
            state._finish(Termination.QUIESCENT if not state._any_enabled()
                          else Termination.FIRING_LIMIT)
        return state.trace
    if not state.clusters:
        state.trace.termination = Termination.QUIESCENT
        return state.trace

    threads = [threading.Thread(target=state.worker, args=(i,), daemon=True,
                                name=f"work-cluster-{i}")
               for i in range(len(state.clusters))]
    for th in threads:
        th.start()
    for th in threads:
        th.join()

    if state.failure is not None:
        tid, exc = state.failure
        name = net.transitions[tid].name if tid is not None else None
        state.trace.failure = f"{type(exc).__name__}: {exc}"
        raise CallbackError(
            f"worker failed while firing {name!r}: {exc}", trace=state.trace,
            transition=tid) from exc
    return state.trace


def validate_trace(t: Trace, g: StateGraph) -> bool:
    """True iff every step of ``t`` is an edge of ``g`` with the same transition and delta."""
    if t.start != g.start:
        raise MismatchedStart("trace and state graph start from different states")
    prev = t.start
    for ev in t.events:
        if prev not in g:
            return False
        if not g.has_edge(prev, ev.transition, ev.delta, ev.state):
            return False
        prev = ev.state
    return True
