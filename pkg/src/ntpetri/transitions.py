"""Transition kinds and their firing semantics.

Every transition answers two questions about a marking: is it enabled, and
which deltas may a firing apply.  ``And`` behaves like a classic Petri net
transition, ``Xor`` moves a single token along one of its input/output
pairs, and ``Custom`` delegates both questions to host code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Key, State, StateDelta
from .errors import ContractViolation, DeltaLimitExceeded, InvalidArc, NotEnabled

DEFAULT_MAX_DELTAS = 1024


def _merge_arcs(arcs) -> tuple[tuple[int, int, int], ...]:
    merged: dict[Key, int] = {}
    for place, color, weight in arcs:
        if not isinstance(weight, int) or isinstance(weight, bool) or weight < 1:
            raise InvalidArc(f"arc weight must be a positive integer, got {weight!r}")
        key = (int(place), int(color))
        merged[key] = merged.get(key, 0) + weight
    return tuple((p, c, w) for (p, c), w in sorted(merged.items()))


def _sorted_deltas(deltas: Iterable[StateDelta]) -> tuple[StateDelta, ...]:
    return tuple(sorted(set(deltas), key=lambda d: d.sort_key))


class Transition:
    """Common interface; see the concrete kinds below."""

    name: str
    kind: str = ""
    serializable = True

    def input_places(self) -> frozenset[int]:
        raise NotImplementedError

    def output_places(self) -> frozenset[int]:
        raise NotImplementedError

    def referenced_places(self) -> frozenset[int]:
        return self.input_places() | self.output_places()

    def referenced_colors(self) -> frozenset[int]:
        return frozenset()

    def enabled(self, s: State) -> bool:
        raise NotImplementedError

    def updates(self, s: State) -> tuple[StateDelta, ...]:
        raise NotImplementedError


@dataclass(frozen=True)
class AndTransition(Transition):
    """Enabled when every colored input requirement is met; one delta."""

    name: str
    inputs: tuple[tuple[int, int, int], ...] = ()
    outputs: tuple[tuple[int, int, int], ...] = ()
    kind = "and"

    def __post_init__(self):
        object.__setattr__(self, "inputs", _merge_arcs(self.inputs))
        object.__setattr__(self, "outputs", _merge_arcs(self.outputs))

    @property
    def delta(self) -> StateDelta:
        return StateDelta([((p, c), w) for p, c, w in self.outputs]
                          + [((p, c), -w) for p, c, w in self.inputs])

    def input_places(self):
        return frozenset(p for p, _c, _w in self.inputs)

    def output_places(self):
        return frozenset(p for p, _c, _w in self.outputs)

    def referenced_colors(self):
        return frozenset(c for _p, c, _w in self.inputs + self.outputs)

    def enabled(self, s):
        return all(s[p, c] >= w for p, c, w in self.inputs)

    def updates(self, s):
        if not self.enabled(s):
            raise NotEnabled(f"transition {self.name!r} is not enabled")
        return (self.delta,)


@dataclass(frozen=True)
class XorTransition(Transition):
    """One token moves from a pair's input to the same pair's output."""

    name: str
    pairs: tuple[tuple[Key, Key], ...] = ()
    kind = "xor"

    def __post_init__(self):
        pairs = tuple(((int(a[0]), int(a[1])), (int(b[0]), int(b[1])))
                      for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)

    def input_places(self):
        return frozenset(a[0] for a, _b in self.pairs)

    def output_places(self):
        return frozenset(b[0] for _a, b in self.pairs)

    def referenced_colors(self):
        return frozenset(k[1] for pair in self.pairs for k in pair)

    def enabled(self, s):
        return any(s[a] >= 1 for a, _b in self.pairs)

    def updates(self, s):
        out = [StateDelta([(a, -1), (b, 1)]) for a, b in self.pairs if s[a] >= 1]
        if not out:
            raise NotEnabled(f"transition {self.name!r} is not enabled")
        return _sorted_deltas(out)


class CustomTransition(Transition):
    """Host-defined nondeterministic transition.

    ``enable`` and ``deltas`` both receive the marking restricted to the
    declared input places.  ``deltas`` must yield a finite, non-empty
    collection; more than ``max_deltas`` distinct results is an error.
    Emitted deltas may only consume from declared inputs and only produce
    into declared outputs.  Instances compare by identity.
    """

    kind = "custom"
    serializable = False

    def __init__(self, name, input_places=(), output_places=(), enable=None,
                 deltas=None, max_deltas=DEFAULT_MAX_DELTAS):
        if enable is None or deltas is None:
            raise TypeError("custom transitions need both enable and deltas callables")
        self.name = name
        self.input_places_ = frozenset(input_places)
        self.output_places_ = frozenset(output_places)
        self.enable = enable
        self.deltas = deltas
        self.max_deltas = max_deltas

    def __repr__(self):
        return (f"CustomTransition({self.name!r}, inputs={sorted(self.input_places_)}, "
                f"outputs={sorted(self.output_places_)})")

    def input_places(self):
        return self.input_places_

    def output_places(self):
        return self.output_places_

    def enabled(self, s):
        return bool(self.enable(s.restrict(self.input_places_)))

    def updates(self, s):
        view = s.restrict(self.input_places_)
        if not self.enable(view):
            raise NotEnabled(f"transition {self.name!r} is not enabled")
        seen = set()
        for d in self.deltas(view):
            if not isinstance(d, StateDelta):
                d = StateDelta(d)
            seen.add(d)
            if len(seen) > self.max_deltas:
                raise DeltaLimitExceeded(
                    f"transition {self.name!r} produced more than {self.max_deltas} deltas")
        if not seen:
            raise ContractViolation(f"transition {self.name!r} is enabled but produced no deltas")
        for d in seen:
            self._check_delta(d, s)
        return _sorted_deltas(seen)

    def _check_delta(self, d: StateDelta, s: State):
        stray_in = d.consumed_places() - self.input_places_
        stray_out = d.produced_places() - self.output_places_
        if stray_in or stray_out:
            raise ContractViolation(
                f"transition {self.name!r} emitted {d!r} touching undeclared places")
        for key, n in d.items():
            if n < 0 and s[key] + n < 0:
                raise ContractViolation(
                    f"transition {self.name!r} emitted {d!r} which underflows {key}")


def enabled(t: Transition, s: State) -> bool:
    return t.enabled(s)


def updates(t: Transition, s: State) -> tuple[StateDelta, ...]:
    """Deduplicated deltas in canonical order; raises NotEnabled if disabled."""
    return t.updates(s)
