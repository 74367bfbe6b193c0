"""Net documents (JSON), state-graph and report serialization, DOT export.

A net document looks like::

    {
      "version": "1",
      "colors": ["•"],
      "places": ["H2", "O2", "H2O"],
      "transitions": [
        {"name": "T0", "kind": "and", "inputs": [["H2", "•", 2], ["O2", "•", 1]],
         "outputs": [["H2O", "•", 2]]}
      ],
      "marking": [["H2", "•", 2], ["O2", "•", 1]]
    }

Xor transitions carry ``"pairs": [[[in_place, color], [out_place, color]], ...]``.
Places and colors are referenced by name.
"""

from __future__ import annotations

import json

import jsonschema

from .clusters import WorkClusterPartition
from .core import Net, State, new_net, validate_net
from .errors import (
    NetSemanticError,
    NetSyntaxError,
    PetriNetError,
    UnknownNode,
    UnserializableTransition,
    VersionError,
)
from .stategraph import AnalysisReport, StateGraph
from .transitions import AndTransition, XorTransition

FORMAT_VERSION = "1"

_ARC = {"type": "array", "prefixItems": [{"type": "string"}, {"type": "string"},
                                         {"type": "integer", "minimum": 1}],
        "minItems": 3, "maxItems": 3}
_ENDPOINT = {"type": "array", "prefixItems": [{"type": "string"}, {"type": "string"}],
             "minItems": 2, "maxItems": 2}

NET_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "colors", "places", "transitions", "marking"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "string"},
        "colors": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "places": {"type": "array", "items": {"type": "string"}},
        "transitions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "kind"],
                "properties": {"name": {"type": "string"}, "kind": {"enum": ["and", "xor"]}},
                "oneOf": [
                    {"properties": {"kind": {"const": "and"},
                                    "inputs": {"type": "array", "items": _ARC},
                                    "outputs": {"type": "array", "items": _ARC}},
                     "required": ["inputs", "outputs"]},
                    {"properties": {"kind": {"const": "xor"},
                                    "pairs": {"type": "array", "minItems": 1, "items": {
                                        "type": "array", "items": _ENDPOINT,
                                        "minItems": 2, "maxItems": 2}}},
                     "required": ["pairs"]},
                ],
            },
        },
        "marking": {"type": "array", "items": {
            "type": "array",
            "prefixItems": [{"type": "string"}, {"type": "string"},
                            {"type": "integer", "minimum": 0}],
            "minItems": 3, "maxItems": 3}},
    },
}

_validator = jsonschema.Draft202012Validator(NET_SCHEMA)


def _where(err) -> str:
    return "/".join(str(p) for p in err.absolute_path) or "<root>"


def parse_net(text: str) -> tuple[Net, State]:
    """Parse a net document into a validated net and its initial marking."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise NetSyntaxError("top level must be a JSON object", 1, 1)
    if "version" not in doc:
        raise VersionError("missing format version")
    if doc["version"] != FORMAT_VERSION:
        raise VersionError(f"unsupported format version {doc['version']!r}, "
                           f"expected {FORMAT_VERSION!r}")
    for t in doc.get("transitions") or []:
        if isinstance(t, dict) and t.get("kind") not in ("and", "xor"):
            raise NetSemanticError(f"unknown transition kind {t.get('kind')!r} "
                                   f"(only 'and' and 'xor' are serializable)")
    err = jsonschema.exceptions.best_match(_validator.iter_errors(doc))
    if err is not None:
        raise NetSemanticError(f"{_where(err)}: {err.message}")

    try:
        net = new_net(doc["places"], doc["colors"])
        for t in doc["transitions"]:
            if t["kind"] == "and":
                net.add_and(t["name"],
                            inputs=[(p, c, w) for p, c, w in t["inputs"]],
                            outputs=[(p, c, w) for p, c, w in t["outputs"]])
            else:
                net.add_xor(t["name"], [((a[0], a[1]), (b[0], b[1])) for a, b in t["pairs"]])
        start = net.marking([((p, c), n) for p, c, n in doc["marking"]])
    except UnknownNode as exc:
        raise NetSemanticError(f"dangling reference: {exc}") from None
    except PetriNetError as exc:
        raise NetSemanticError(str(exc)) from None

    report = validate_net(net)
    if not report.ok:
        raise NetSemanticError("; ".join(f.message for f in report.errors))
    return net, start


def _row(items) -> str:
    return json.dumps(items, ensure_ascii=False)


def _transition_doc(net: Net, t) -> dict:
    if isinstance(t, AndTransition):
        def arcs(xs):
            return [[net.places[p], net.colors[c], w] for p, c, w in xs]
        return {"name": t.name, "kind": "and",
                "inputs": arcs(t.inputs), "outputs": arcs(t.outputs)}
    if isinstance(t, XorTransition):
        return {"name": t.name, "kind": "xor",
                "pairs": [[[net.places[a[0]], net.colors[a[1]]],
                           [net.places[b[0]], net.colors[b[1]]]] for a, b in t.pairs]}
    raise UnserializableTransition(
        f"transition {t.name!r} of kind {t.kind!r} cannot be serialized")


def serialize_net(net: Net, start: State | None = None) -> str:
    """Deterministic document text; round-trips through :func:`parse_net`."""
    start = start if start is not None else State()
    transitions = [_transition_doc(net, t) for t in net.transitions]
    marking = [[net.places[p], net.colors[c], n] for p, c, n in start.sort_key]
    lines = ["{",
             f'  "version": {_row(FORMAT_VERSION)},',
             f'  "colors": {_row(list(net.colors))},',
             f'  "places": {_row(list(net.places))},']
    if transitions:
        lines.append('  "transitions": [')
        lines.append(",\n".join("    " + _row(t) for t in transitions))
        lines.append("  ],")
    else:
        lines.append('  "transitions": [],')
    lines.append(f'  "marking": {_row(marking)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def state_to_json(net: Net, s: State) -> list:
    return [[net.places[p], net.colors[c], n] for p, c, n in s.sort_key]


def serialize_state_graph(g: StateGraph, net: Net) -> str:
    """Nodes indexed in canonical order; edges as ``[src, transition, delta, dst]``."""
    index = g.index()
    doc = {
        "version": FORMAT_VERSION,
        "status": g.status,
        "start": index[g.start],
        "nodes": [state_to_json(net, s) for s in g.nodes],
        "edges": [[index[s], net.transitions[e.transition].name,
                   [[net.places[p], net.colors[c], n] for p, c, n in e.delta.sort_key],
                   index[e.target]]
                  for s in g.nodes for e in g.edges[s]],
        "frontier": sorted(index[s] for s in g.frontier),
    }
    return json.dumps(doc, ensure_ascii=False, indent=1) + "\n"


def report_to_dict(report: AnalysisReport, net: Net, partition=None) -> dict:
    doc = {
        "states": report.state_count,
        "edges": report.edge_count,
        "status": report.status,
        "complete": report.complete,
        "deadlock_states": [state_to_json(net, s) for s in report.deadlock_states],
        "deadlocks_partial": report.deadlocks_partial,
        "graph_has_cycle": report.graph_has_cycle,
        "net_has_cycle": report.net_has_cycle,
        "state_bound": str(report.state_bound),
        "predicate_violations": {name: [state_to_json(net, s) for s in states]
                                 for name, states in sorted(report.predicate_violations.items())},
    }
    if partition is not None:
        doc["work_clusters"] = [[net.transitions[t].name for t in c] for c in partition]
    return doc


# -- DOT --------------------------------------------------------------------------------

def _q(text) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


_SHAPES = {"and": "box", "xor": "diamond", "custom": "hexagon"}


def net_to_dot(net: Net, partition: WorkClusterPartition | None = None,
               marking: State | None = None) -> str:
    multicolor = len(net.colors) > 1
    lines = ["digraph net {"]
    if net.places or net.transitions:
        lines.append("  rankdir=LR;")
    for pid, name in enumerate(net.places):
        label = name
        if marking is not None:
            held = [(c, n) for (p, c), n in marking.items() if p == pid]
            if held:
                label += "\n" + " ".join(
                    f"{net.colors[c]}×{n}" if multicolor else str(n) for c, n in held)
        lines.append(f"  {_q('p:' + name)} [shape=circle, label={_q(label)}];")

    def tnode(tid):
        return _q("t:" + net.transitions[tid].name)

    def tdecl(tid):
        t = net.transitions[tid]
        return f"{tnode(tid)} [shape={_SHAPES[t.kind]}, label={_q(t.name)}];"

    clustered = set()
    if partition is not None:
        for i, cluster in enumerate(partition):
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append(f"    label={_q(f'work cluster {i}')};")
            for tid in cluster:
                lines.append("    " + tdecl(tid))
                clustered.add(tid)
            lines.append("  }")
    for tid in range(len(net.transitions)):
        if tid not in clustered:
            lines.append("  " + tdecl(tid))

    def attrs(weight, color):
        out = []
        if weight != 1:
            out.append(f"label={_q(weight)}")
        if multicolor:
            out.append(f"color={_q(net.colors[color])}")
        return f" [{', '.join(out)}]" if out else ""

    for tid, t in enumerate(net.transitions):
        if isinstance(t, AndTransition):
            for p, c, w in t.inputs:
                lines.append(f"  {_q('p:' + net.places[p])} -> {tnode(tid)}{attrs(w, c)};")
            for p, c, w in t.outputs:
                lines.append(f"  {tnode(tid)} -> {_q('p:' + net.places[p])}{attrs(w, c)};")
        elif isinstance(t, XorTransition):
            for (pa, ca), (pb, cb) in t.pairs:
                lines.append(f"  {_q('p:' + net.places[pa])} -> {tnode(tid)}{attrs(1, ca)};")
                lines.append(f"  {tnode(tid)} -> {_q('p:' + net.places[pb])}{attrs(1, cb)};")
        else:
            for p in sorted(t.input_places()):
                lines.append(f"  {_q('p:' + net.places[p])} -> {tnode(tid)} [style=dashed];")
            for p in sorted(t.output_places()):
                lines.append(f"  {tnode(tid)} -> {_q('p:' + net.places[p])} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def state_graph_to_dot(g: StateGraph, net: Net) -> str:
    index = g.index()
    dead = {s for s in g.nodes if not g.edges[s] and s not in g.frontier}
    lines = ["digraph state_graph {"]
    for s in g.nodes:
        extra = ""
        if s == g.start:
            extra += ", style=bold"
        if s in dead:
            extra += ", peripheries=2"
        if s in g.frontier:
            extra += ", style=dashed"
        lines.append(f"  s{index[s]} [shape=ellipse, label={_q(net.format_counts(s))}{extra}];")
    for s in g.nodes:
        for e in g.edges[s]:
            lines.append(f"  s{index[s]} -> s{index[e.target]} "
                         f"[label={_q(net.transitions[e.transition].name)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(target, partition: WorkClusterPartition | None = None,
               net: Net | None = None, marking: State | None = None) -> str:
    """DOT text for a net (optionally clustered) or a state graph (needs ``net`` for labels)."""
    if isinstance(target, StateGraph):
        if net is None:
            raise TypeError("state graph export needs the net for labels")
        return state_graph_to_dot(target, net)
    return net_to_dot(target, partition, marking)
