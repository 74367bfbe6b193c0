"""Net structure, markings and deltas.

Places, colors and transitions are addressed by dense integer ids assigned
in insertion order; names live in side tables on the :class:`Net`.  A
marking (:class:`State`) and a firing change (:class:`StateDelta`) are
immutable sparse maps keyed by ``(place_id, color_id)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    DuplicateName,
    EmptyColorTable,
    NegativeTokens,
    UnknownNode,
)

Key = tuple[int, int]


class _Counts:
    """Sparse integer map over (place, color) with structural equality.

    Zero entries are dropped at construction so that equal markings always
    hash alike.  Absent keys read as 0.
    """

    __slots__ = ("_items", "_map", "_hash")

    def __init__(self, counts=()):
        raw = counts.items() if hasattr(counts, "items") else counts
        merged: dict[Key, int] = {}
        for key, n in raw:
            place, color = key
            k = (int(place), int(color))
            merged[k] = merged.get(k, 0) + int(n)
        self._check(merged)
        items = tuple(sorted((k, n) for k, n in merged.items() if n != 0))
        self._items = items
        self._map = dict(items)
        self._hash = hash((type(self).__name__, items))

    def _check(self, merged):
        pass

    def __getitem__(self, key: Key) -> int:
        return self._map.get(key, 0)

    def __contains__(self, key) -> bool:
        return key in self._map

    def __iter__(self) -> Iterator[Key]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def items(self) -> tuple[tuple[Key, int], ...]:
        return self._items

    def keys(self):
        return self._map.keys()

    def places(self) -> frozenset[int]:
        return frozenset(p for (p, _c) in self._map)

    @property
    def sort_key(self) -> tuple[tuple[int, int, int], ...]:
        """Lexicographic key over sorted ``(place, color, count)`` triples."""
        return tuple((p, c, n) for (p, c), n in self._items)

    def triples(self) -> list[tuple[int, int, int]]:
        return list(self.sort_key)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"({p},{c}): {n}" for (p, c), n in self._items)
        return f"{type(self).__name__}({{{body}}})"


class State(_Counts):
    """A marking: non-negative token counts per (place, color)."""

    __slots__ = ()

    def _check(self, merged):
        for key, n in merged.items():
            if n < 0:
                raise NegativeTokens(f"negative count {n} at {key}")

    def total(self) -> int:
        return sum(n for _k, n in self._items)

    def restrict(self, places: Iterable[int]) -> "State":
        keep = set(places)
        return State((k, n) for k, n in self._items if k[0] in keep)

    def max_count(self) -> int:
        return max((n for _k, n in self._items), default=0)

    def __add__(self, other):
        if isinstance(other, StateDelta):
            return apply_delta(self, other)
        return NotImplemented


class StateDelta(_Counts):
    """A signed change to a marking, as produced by a single firing."""

    __slots__ = ()

    def negate(self) -> "StateDelta":
        return StateDelta((k, -n) for k, n in self._items)

    def consumed_places(self) -> frozenset[int]:
        return frozenset(p for (p, _c), n in self._items if n < 0)

    def produced_places(self) -> frozenset[int]:
        return frozenset(p for (p, _c), n in self._items if n > 0)

    def negative_part(self) -> "StateDelta":
        return StateDelta((k, n) for k, n in self._items if n < 0)

    def positive_part(self) -> "StateDelta":
        return StateDelta((k, n) for k, n in self._items if n > 0)

    def __add__(self, other):
        if isinstance(other, StateDelta):
            return StateDelta(list(self._items) + list(other._items))
        return NotImplemented


def apply_delta(s: State, d: StateDelta) -> State:
    """Return ``s + d``; raise :class:`NegativeTokens` on underflow."""
    counts = dict(s.items())
    for key, n in d.items():
        new = counts.get(key, 0) + n
        if new < 0:
            raise NegativeTokens(
                f"place {key[0]} color {key[1]} would hold {new} tokens")
        counts[key] = new
    return State(counts)


def _unique(names, kind):
    names = tuple(str(n) for n in names)
    seen = set()
    for n in names:
        if n in seen:
            raise DuplicateName(f"duplicate {kind} name {n!r}")
        seen.add(n)
    return names


class Net:
    """A colored NT-Petri net under construction (or frozen).

    Arcs are not stored separately; they are implied by the transition
    specs, which reference places only.  Place-to-place and
    transition-to-transition arcs therefore cannot be expressed.
    """

    def __init__(self, place_names, color_names):
        self.places = _unique(place_names, "place")
        self.colors = _unique(color_names, "color")
        if not self.colors:
            raise EmptyColorTable("a net must declare at least one color")
        self.transitions: list = []
        self._place_ids = {n: i for i, n in enumerate(self.places)}
        self._color_ids = {n: i for i, n in enumerate(self.colors)}
        self._transition_ids: dict[str, int] = {}
        self._frozen = False

    def __repr__(self):
        return (f"Net(places={len(self.places)}, colors={len(self.colors)}, "
                f"transitions={len(self.transitions)})")

    def __eq__(self, other):
        if not isinstance(other, Net):
            return NotImplemented
        return (self.places == other.places and self.colors == other.colors
                and self.transitions == other.transitions)

    __hash__ = None

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self) -> "Net":
        self._frozen = True
        return self

    # -- lookups -----------------------------------------------------------

    def place_id(self, ref) -> int:
        if isinstance(ref, str):
            try:
                return self._place_ids[ref]
            except KeyError:
                raise UnknownNode(f"no place named {ref!r}") from None
        if isinstance(ref, int) and 0 <= ref < len(self.places):
            return ref
        raise UnknownNode(f"no place {ref!r}")

    def color_id(self, ref) -> int:
        if isinstance(ref, str):
            try:
                return self._color_ids[ref]
            except KeyError:
                raise UnknownNode(f"no color named {ref!r}") from None
        if isinstance(ref, int) and 0 <= ref < len(self.colors):
            return ref
        raise UnknownNode(f"no color {ref!r}")

    def transition_id(self, ref) -> int:
        if isinstance(ref, str):
            try:
                return self._transition_ids[ref]
            except KeyError:
                raise UnknownNode(f"no transition named {ref!r}") from None
        if isinstance(ref, int) and 0 <= ref < len(self.transitions):
            return ref
        raise UnknownNode(f"no transition {ref!r}")

    def transition(self, ref):
        return self.transitions[self.transition_id(ref)]

    # -- building ----------------------------------------------------------

    def add_transition(self, spec) -> int:
        """Append a prebuilt transition spec and return its id.

        Place and color ids inside ``spec`` are taken as-is; use
        :func:`validate_net` to catch dangling references.
        """
        if self._frozen:
            raise RuntimeError("net is frozen")
        if spec.name in self._transition_ids:
            raise DuplicateName(f"duplicate transition name {spec.name!r}")
        tid = len(self.transitions)
        self.transitions.append(spec)
        self._transition_ids[spec.name] = tid
        return tid

    def _endpoint(self, ref) -> Key:
        if isinstance(ref, tuple):
            place, color = ref
            return self.place_id(place), self.color_id(color)
        return self.place_id(ref), 0

    def _arc(self, entry) -> tuple[int, int, int]:
        # "P" | ("P", weight) | ("P", color, weight)
        if not isinstance(entry, tuple):
            return self.place_id(entry), 0, 1
        if len(entry) == 2:
            return self.place_id(entry[0]), 0, entry[1]
        place, color, weight = entry
        return self.place_id(place), self.color_id(color), weight

    def add_and(self, name, inputs=(), outputs=()) -> int:
        from .transitions import AndTransition
        return self.add_transition(AndTransition(
            name,
            inputs=[self._arc(e) for e in inputs],
            outputs=[self._arc(e) for e in outputs],
        ))

    def add_xor(self, name, pairs) -> int:
        from .transitions import XorTransition
        return self.add_transition(XorTransition(
            name, pairs=[(self._endpoint(a), self._endpoint(b)) for a, b in pairs]))

    def add_custom(self, name, inputs, outputs, enable, deltas, max_deltas=1024) -> int:
        from .transitions import CustomTransition
        return self.add_transition(CustomTransition(
            name,
            input_places=[self.place_id(p) for p in inputs],
            output_places=[self.place_id(p) for p in outputs],
            enable=enable,
            deltas=deltas,
            max_deltas=max_deltas,
        ))

    # -- markings ----------------------------------------------------------

    def _counts(self, counts):
        raw = counts.items() if hasattr(counts, "items") else counts
        return [(self._endpoint(k), n) for k, n in raw]

    def marking(self, counts=()) -> State:
        """Build a State from ``{place: n}`` or ``{(place, color): n}``."""
        return State(self._counts(counts))

    def delta(self, changes=()) -> StateDelta:
        return StateDelta(self._counts(changes))

    def key_label(self, key: Key) -> str:
        place, color = key
        pname = self.places[place] if place < len(self.places) else f"#{place}"
        if len(self.colors) == 1:
            return pname
        cname = self.colors[color] if color < len(self.colors) else f"#{color}"
        return f"{pname}/{cname}"

    def format_counts(self, counts: _Counts, signed: bool = False) -> str:
        fmt = "{}:{:+d}" if signed else "{}:{}"
        return "{" + ", ".join(fmt.format(self.key_label(k), n)
                               for k, n in counts.items()) + "}"


def new_net(place_names, color_names) -> Net:
    """Create an empty net; ids follow list order."""
    return Net(place_names, color_names)


@dataclass(frozen=True)
class Finding:
    code: str
    severity: str
    message: str
    transition: int | None = None


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return bool(self.findings)

    def codes(self) -> list[str]:
        return [f.code for f in self.findings]


def validate_net(net: Net) -> ValidationReport:
    """Check a net for dangling references and malformed transitions."""
    from .transitions import AndTransition, XorTransition

    report = ValidationReport()
    n_places, n_colors = len(net.places), len(net.colors)
    for tid, t in enumerate(net.transitions):
        for p in sorted(t.referenced_places()):
            if not 0 <= p < n_places:
                report.findings.append(Finding(
                    "DanglingReference", "error",
                    f"transition {t.name!r} references place {p} of {n_places}", tid))
        for c in sorted(t.referenced_colors()):
            if not 0 <= c < n_colors:
                report.findings.append(Finding(
                    "DanglingReference", "error",
                    f"transition {t.name!r} references color {c} of {n_colors}", tid))
        if isinstance(t, AndTransition) and not t.inputs:
            report.findings.append(Finding(
                "AlwaysEnabled", "warning",
                f"transition {t.name!r} has no inputs and is always enabled", tid))
        if isinstance(t, XorTransition):
            ins = [a for a, _b in t.pairs]
            if not ins:
                report.findings.append(Finding(
                    "XorMalformed", "error", f"xor {t.name!r} has no pairs", tid))
            elif len(set(ins)) != len(ins):
                report.findings.append(Finding(
                    "XorMalformed", "error",
                    f"xor {t.name!r} repeats an input across pairs", tid))
    return report
