"""Nondeterministic-transition colored Petri nets.

Build a net, enumerate and check its state graph, partition its
transitions into work clusters, and run it with one thread per cluster.
"""

from .clusters import (
    WorkClusterPartition,
    coarsen,
    compute_work_clusters,
    validate_partition,
)
from .core import Net, State, StateDelta, ValidationReport, apply_delta, new_net, validate_net
from .errors import *  # noqa: F401,F403
from .executor import ChoiceRule, ExecutionPolicy, Termination, Trace, run, validate_trace
from .io import export_dot, parse_net, serialize_net, serialize_state_graph
from .stategraph import (
    AnalysisReport,
    ExplorationLimits,
    StateGraph,
    Truncation,
    analyze,
    check_predicate,
    compute_state_graph,
    deadlock_states,
    graph_has_cycle,
    net_has_cycle,
    state_count_bound,
)
from .transitions import AndTransition, CustomTransition, XorTransition, enabled, updates

__version__ = "0.1.0"
