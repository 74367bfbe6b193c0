"""Command-line front end.

    ntpetri check NET.json        analyse the state graph
    ntpetri partition NET.json    list the maximal work clusters
    ntpetri run NET.json          execute and check the trace
    ntpetri export NET.json       DOT for the net, its state graph or clusters

``-`` reads the document from stdin.  Exit codes: 0 success/pass,
1 failed check, 2 usage or input error.
"""

from __future__ import annotations

import json
import signal
import sys
import threading

import click

from . import io as netio
from .clusters import compute_work_clusters
from .errors import CallbackError, PetriNetError
from .executor import ChoiceRule, ExecutionPolicy, run, validate_trace
from .stategraph import ExplorationLimits, analyze, compute_state_graph

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

_PREDICATES = {
    "max-total-tokens": lambda n: (lambda s: s.total() <= n),
    "max-place-tokens": lambda n: (lambda s: s.max_count() <= n),
}


def _load(stream):
    try:
        return netio.parse_net(stream.read())
    except PetriNetError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _limits(max_states, max_tokens_per_place, max_depth):
    try:
        return ExplorationLimits(max_states=max_states,
                                 max_tokens_per_place=max_tokens_per_place or None,
                                 max_depth=max_depth)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _parse_predicates(specs):
    out = {}
    for spec in specs:
        name, _, value = spec.partition("=")
        if name not in _PREDICATES or not value.lstrip("-").isdigit():
            raise click.UsageError(
                f"bad predicate {spec!r}; known: {', '.join(f'{k}=N' for k in _PREDICATES)}")
        out[spec] = _PREDICATES[name](int(value))
    return out


def limit_options(f):
    f = click.option("--max-depth", type=click.IntRange(min=1), default=None,
                     help="Stop expanding states this many firings from the start.")(f)
    f = click.option("--max-tokens-per-place", type=click.IntRange(min=0), default=10_000,
                     show_default=True, help="Per (place, color) cutoff; 0 = unlimited.")(f)
    f = click.option("--max-states", type=click.IntRange(min=1), default=1_000_000,
                     show_default=True)(f)
    return f


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Verify and run nondeterministic-transition colored Petri nets."""


@main.command()
@click.argument("source", type=click.File("r", encoding="utf-8"))
@limit_options
@click.option("--format", "fmt", type=click.Choice(["human", "report", "dot"]), default="human")
@click.option("--fail-on", type=click.Choice(["deadlock", "truncation", "none"]), multiple=True,
              help="Conditions that make the check fail (default: deadlock and truncation).")
@click.option("--predicate", "predicates", multiple=True, metavar="NAME=N",
              help="Built-in state constraint, e.g. max-total-tokens=3. Repeatable.")
def check(source, max_states, max_tokens_per_place, max_depth, fmt, fail_on, predicates):
    """Enumerate the state graph and report deadlocks, cycles and truncation."""
    net, start = _load(source)
    limits = _limits(max_states, max_tokens_per_place, max_depth)
    preds = _parse_predicates(predicates)
    fail_on = set(fail_on or ("deadlock", "truncation"))
    if "none" in fail_on:
        fail_on = set()

    graph = compute_state_graph(net, start, limits)
    report = analyze(net, graph, preds)
    partition = compute_work_clusters(net)

    failures = []
    if "truncation" in fail_on and not report.complete:
        failures.append("truncation")
    if "deadlock" in fail_on and report.deadlock_states:
        failures.append("deadlock")
    if report.violations:
        failures.append("predicate")

    if fmt == "report":
        doc = netio.report_to_dict(report, net, partition)
        doc["verdict"] = "fail" if failures else "pass"
        doc["failures"] = failures
        click.echo(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
    elif fmt == "dot":
        click.echo(netio.export_dot(graph, net=net), nl=False)
    else:
        click.echo(f"states: {report.state_count}")
        click.echo(f"edges: {report.edge_count}")
        click.echo(f"status: {report.status}")
        click.echo(f"state bound (p+1)^t: {report.state_bound}")
        click.echo(f"graph cycle: {'yes' if report.graph_has_cycle else 'no'}")
        click.echo(f"net cycle: {'yes' if report.net_has_cycle else 'no'}")
        partial = " (partial)" if report.deadlocks_partial else ""
        click.echo(f"deadlock states{partial}: {len(report.deadlock_states)}")
        for s in report.deadlock_states:
            click.echo(f"  {net.format_counts(s)}")
        for name, bad in sorted(report.predicate_violations.items()):
            click.echo(f"predicate {name}: {len(bad)} violating state(s)")
            for s in bad:
                click.echo(f"  {net.format_counts(s)}")
        click.echo(f"work clusters: {len(partition)}")
        click.echo("result: " + (f"FAIL ({', '.join(failures)})" if failures else "PASS"))
    sys.exit(EXIT_FAILED if failures else EXIT_OK)


@main.command()
@click.argument("source", type=click.File("r", encoding="utf-8"))
@click.option("--format", "fmt", type=click.Choice(["human", "report", "dot"]), default="human")
def partition(source, fmt):
    """Print the maximal set of work clusters."""
    net, start = _load(source)
    p = compute_work_clusters(net)
    if fmt == "report":
        click.echo(json.dumps({"work_clusters": [[net.transitions[t].name for t in c] for c in p]},
                              indent=2, ensure_ascii=False))
    elif fmt == "dot":
        click.echo(netio.export_dot(net, partition=p, marking=start), nl=False)
    else:
        for i, cluster in enumerate(p):
            click.echo(f"cluster {i}: " + " ".join(net.transitions[t].name for t in cluster))


@main.command("run")
@click.argument("source", type=click.File("r", encoding="utf-8"))
@limit_options
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--firings", type=click.IntRange(min=0), default=1000, show_default=True,
              help="Stop after this many firings.")
@click.option("--first-enabled", is_flag=True,
              help="Deterministic tie-break instead of the seeded random choice.")
@click.option("--format", "fmt", type=click.Choice(["human", "report"]), default="human")
def run_cmd(source, max_states, max_tokens_per_place, max_depth, seed, firings,
            first_enabled, fmt):
    """Execute under the maximal partition and check the trace against the state graph."""
    net, start = _load(source)
    limits = _limits(max_states, max_tokens_per_place, max_depth)
    policy = ExecutionPolicy(
        seed=seed, max_firings=firings,
        choice_rule=ChoiceRule.FIRST_ENABLED if first_enabled else ChoiceRule.SEEDED_RANDOM)

    stop = threading.Event()
    on_main = threading.current_thread() is threading.main_thread()
    previous = signal.signal(signal.SIGINT, lambda *_: stop.set()) if on_main else None
    try:
        trace = run(net, start, compute_work_clusters(net), policy, stop=stop)
        failure = None
    except CallbackError as exc:
        trace, failure = exc.trace, str(exc)
    finally:
        if on_main:
            signal.signal(signal.SIGINT, previous)

    graph = compute_state_graph(net, start, limits)
    if failure is not None:
        verdict = "failed"
    elif graph.complete:
        verdict = "conformant" if validate_trace(trace, graph) else "nonconformant"
    else:
        verdict = "unverified"

    if fmt == "report":
        doc = {
            "firings": len(trace),
            "termination": trace.termination.value,
            "conformance": verdict,
            "graph_status": graph.status,
            "events": [[e.seq, net.transitions[e.transition].name,
                        netio.state_to_json(net, e.state)] for e in trace.events],
        }
        click.echo(json.dumps(doc, indent=1, ensure_ascii=False))
    else:
        for e in trace.events:
            click.echo(f"#{e.seq} {net.transitions[e.transition].name} "
                       f"{net.format_counts(e.delta, signed=True)} -> {net.format_counts(e.state)}")
        click.echo(f"firings: {len(trace)}")
        click.echo(f"termination: {trace.termination.value}")
        if failure:
            click.echo(f"failure: {failure}")
        click.echo(f"conformance: {verdict} (state graph {graph.status}, {len(graph)} states)")
    sys.exit(EXIT_OK if verdict == "conformant" else EXIT_FAILED)


@main.command()
@click.argument("source", type=click.File("r", encoding="utf-8"))
@click.option("--target", type=click.Choice(["net", "graph", "clustered-net"]), default="net",
              show_default=True)
@limit_options
def export(source, target, max_states, max_tokens_per_place, max_depth):
    """Write Graphviz DOT to stdout."""
    net, start = _load(source)
    if target == "graph":
        graph = compute_state_graph(net, start,
                                    _limits(max_states, max_tokens_per_place, max_depth))
        text = netio.export_dot(graph, net=net)
    elif target == "clustered-net":
        text = netio.export_dot(net, partition=compute_work_clusters(net), marking=start)
    else:
        text = netio.export_dot(net, marking=start)
    click.echo(text, nl=False)


if __name__ == "__main__":
    main()
