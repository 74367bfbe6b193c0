"""Reachable state graph enumeration and the analyses built on it."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .core import Net, State, StateDelta, apply_delta


class Truncation(str, enum.Enum):
    MAX_STATES = "max_states"
    MAX_TOKENS_PER_PLACE = "max_tokens_per_place"
    MAX_DEPTH = "max_depth"


@dataclass(frozen=True)
class ExplorationLimits:
    """Cutoffs that keep exploration of unbounded nets finite.

    ``None`` means unlimited for the token and depth limits.
    """

    max_states: int = 1_000_000
    max_tokens_per_place: int | None = 10_000
    max_depth: int | None = None

    def __post_init__(self):
        for name in ("max_states", "max_tokens_per_place", "max_depth"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @classmethod
    def unlimited(cls) -> "ExplorationLimits":
        return cls(max_states=2**63 - 1, max_tokens_per_place=None, max_depth=None)


@dataclass(frozen=True)
class Edge:
    transition: int
    delta: StateDelta
    target: State

    @property
    def sort_key(self):
        return (self.transition, self.delta.sort_key, self.target.sort_key)


@dataclass
class StateGraph:
    start: State
    nodes: tuple[State, ...]
    edges: dict[State, tuple[Edge, ...]]
    truncation: Truncation | None = None
    # nodes whose successors were not (all) explored because a limit was hit
    frontier: frozenset[State] = field(default_factory=frozenset)

    @property
    def complete(self) -> bool:
        return self.truncation is None

    @property
    def status(self) -> str:
        return "complete" if self.truncation is None else f"truncated({self.truncation.value})"

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, s):
        return s in self.edges

    def successors(self, s: State) -> tuple[Edge, ...]:
        return self.edges[s]

    def edge_count(self) -> int:
        return sum(len(es) for es in self.edges.values())

    def has_edge(self, s: State, transition: int, delta: StateDelta, target: State) -> bool:
        return any(e.transition == transition and e.delta == delta and e.target == target
                   for e in self.edges.get(s, ()))

    def index(self) -> dict[State, int]:
        return {s: i for i, s in enumerate(self.nodes)}


def _successors(net: Net, s: State):
    for tid, t in enumerate(net.transitions):
        if t.enabled(s):
            for d in t.updates(s):
                yield tid, d, apply_delta(s, d)


def compute_state_graph(net: Net, start: State,
                        limits: ExplorationLimits | None = None) -> StateGraph:
    """Enumerate the states reachable from ``start``.

    Exploration is depth-first with an explicit stack of successor
    iterators, so deep graphs cannot exhaust the interpreter stack.  Edges
    into already-known states are recorded as well, which is what makes
    cycles visible.  With a depth limit the search runs breadth-first so
    that depth means shortest firing distance from ``start``.

    Hitting a limit never raises; the partial graph comes back with
    ``truncation`` set and the affected nodes listed in ``frontier``.
    """
    limits = limits or ExplorationLimits()
    edges: dict[State, list[Edge]] = {start: []}
    depth = {start: 0}
    frontier: set[State] = set()
    reasons: list[Truncation] = []

    def hit(reason, state):
        frontier.add(state)
        if reason not in reasons:
            reasons.append(reason)

    def admit(state, new, d):
        """Register ``new`` as a node; False if a limit forbids it."""
        if len(edges) >= limits.max_states:
            hit(Truncation.MAX_STATES, state)
            return False
        if limits.max_tokens_per_place is not None and new.max_count() > limits.max_tokens_per_place:
            hit(Truncation.MAX_TOKENS_PER_PLACE, state)
            return False
        edges[new] = []
        depth[new] = d
        return True

    def expandable(state):
        if limits.max_depth is not None and depth[state] >= limits.max_depth:
            if any(True for _ in _successors(net, state)):
                hit(Truncation.MAX_DEPTH, state)
            return False
        return True

    if limits.max_depth is None:
        stack = [(start, _successors(net, start))]
        while stack:
            state, succ = stack[-1]
            step = next(succ, None)
            if step is None:
                stack.pop()
                continue
            tid, d, new = step
            if new in edges:
                edges[state].append(Edge(tid, d, new))
            elif admit(state, new, depth[state] + 1):
                edges[state].append(Edge(tid, d, new))
                stack.append((new, _successors(net, new)))
            elif Truncation.MAX_STATES in reasons:
                # nothing more can be added; stop and mark everything unfinished
                frontier.update(s for s, _ in stack)
                break
    else:
        queue = deque([start])
        while queue:
            state = queue.popleft()
            if not expandable(state):
                continue
            stop = False
            for tid, d, new in _successors(net, state):
                if new in edges:
                    edges[state].append(Edge(tid, d, new))
                elif admit(state, new, depth[state] + 1):
                    edges[state].append(Edge(tid, d, new))
                    queue.append(new)
                elif Truncation.MAX_STATES in reasons:
                    stop = True
                    break
            if stop:
                frontier.update(queue)
                break

    nodes = tuple(sorted(edges, key=lambda s: s.sort_key))
    frozen = {s: tuple(sorted(edges[s], key=lambda e: e.sort_key)) for s in nodes}
    return StateGraph(
        start=start,
        nodes=nodes,
        edges=frozen,
        truncation=reasons[0] if reasons else None,
        frontier=frozenset(frontier),
    )


def deadlock_states(g: StateGraph) -> frozenset[State]:
    """Nodes without successors.

    Frontier nodes of a truncated graph are never reported: their missing
    edges are an artifact of the cutoff, so the answer is partial there.
    """
    return frozenset(s for s in g.nodes if not g.edges[s] and s not in g.frontier)


def _has_cycle(nodes, successors) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    for root in nodes:
        if color[root] != WHITE:
            continue
        color[root] = GREY
        stack = [(root, iter(successors(root)))]
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
            elif color[nxt] == GREY:
                return True
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(successors(nxt))))
    return False


def graph_has_cycle(g: StateGraph) -> bool:
    return _has_cycle(g.nodes, lambda s: [e.target for e in g.edges[s]])


def net_has_cycle(net: Net) -> bool:
    """True iff the place/transition graph has a directed cycle."""
    succ: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for p in range(len(net.places)):
        succ[("p", p)] = []
    for tid, t in enumerate(net.transitions):
        succ[("t", tid)] = [("p", p) for p in sorted(t.output_places())]
        for p in sorted(t.input_places()):
            succ.setdefault(("p", p), []).append(("t", tid))
        for p in t.output_places():
            succ.setdefault(("p", p), [])
    return _has_cycle(list(succ), lambda n: succ[n])


def state_count_bound(places: int, tokens: int) -> int:
    """Upper bound on reachable states for ``tokens`` distinct tokens over ``places`` places."""
    if places < 0 or tokens < 0:
        raise ValueError("place and token counts must be non-negative")
    return (places + 1) ** tokens


def check_predicate(g: StateGraph, pred: Callable[[State], bool]) -> list[State]:
    """Nodes failing ``pred``, in canonical node order."""
    return [s for s in g.nodes if not pred(s)]


@dataclass
class AnalysisReport:
    state_count: int
    edge_count: int
    status: str
    complete: bool
    deadlock_states: list[State]
    deadlocks_partial: bool
    graph_has_cycle: bool
    net_has_cycle: bool
    state_bound: int
    predicate_violations: dict[str, list[State]] = field(default_factory=dict)

    @property
    def violations(self) -> int:
        return sum(len(v) for v in self.predicate_violations.values())


def analyze(net: Net, g: StateGraph,
            predicates: Mapping[str, Callable[[State], bool]] | None = None) -> AnalysisReport:
    dead = sorted(deadlock_states(g), key=lambda s: s.sort_key)
    return AnalysisReport(
        state_count=len(g.nodes),
        edge_count=g.edge_count(),
        status=g.status,
        complete=g.complete,
        deadlock_states=dead,
        deadlocks_partial=not g.complete,
        graph_has_cycle=graph_has_cycle(g),
        net_has_cycle=net_has_cycle(net),
        state_bound=state_count_bound(len(net.places), g.start.total()),
        predicate_violations={name: check_predicate(g, p)
                              for name, p in (predicates or {}).items()},
    )
