"""Work-cluster partitioning.

Two transitions that consume from a common place must run on the same
thread, otherwise both workers may wait on that place and race for the
next token.  The finest partition respecting this is the set of connected
components of the "shares an input place" relation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import Net
from .errors import IndexOutOfRange, NotAPartition


class UnionFind:
    """Disjoint sets over ``range(size)`` with path halving and union by size."""

    def __init__(self, size):
        self.parent = list(range(size))
        self.size = [1] * size
        self.count = size

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True

    def groups(self):
        out = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


@dataclass(frozen=True)
class WorkClusterPartition:
    """Canonical partition: members sorted, clusters ordered by least member."""

    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        canon = sorted(tuple(sorted(c)) for c in self.clusters)
        object.__setattr__(self, "clusters", tuple(canon))

    @classmethod
    def of(cls, clusters: Iterable[Iterable[int]]) -> "WorkClusterPartition":
        return cls(tuple(tuple(c) for c in clusters))

    @classmethod
    def single(cls, net: Net) -> "WorkClusterPartition":
        """Everything in one cluster (always valid)."""
        n = len(net.transitions)
        return cls(((*range(n),),) if n else ())

    def __len__(self):
        return len(self.clusters)

    def __iter__(self):
        return iter(self.clusters)

    def __getitem__(self, i):
        return self.clusters[i]

    def owner(self) -> dict[int, int]:
        """Map transition id to cluster index."""
        return {t: i for i, c in enumerate(self.clusters) for t in c}


def cluster_inputs(net: Net, cluster) -> frozenset[int]:
    out = frozenset()
    for tid in cluster:
        out |= net.transitions[tid].input_places()
    return out


def compute_work_clusters(net: Net) -> WorkClusterPartition:
    """The unique maximal valid partition of the net's transitions."""
    n = len(net.transitions)
    uf = UnionFind(n)
    first_consumer: dict[int, int] = {}
    for tid, t in enumerate(net.transitions):
        for p in t.input_places():
            if p in first_consumer:
                uf.union(first_consumer[p], tid)
            else:
                first_consumer[p] = tid
    return WorkClusterPartition.of(uf.groups())


def _check_covers(net: Net, p: WorkClusterPartition):
    members = [t for c in p.clusters for t in c]
    if any(not c for c in p.clusters):
        raise NotAPartition("empty cluster")
    if len(members) != len(set(members)):
        raise NotAPartition("clusters overlap")
    if set(members) != set(range(len(net.transitions))):
        raise NotAPartition("clusters do not cover exactly the net's transitions")


def validate_partition(net: Net, p: WorkClusterPartition) -> bool:
    """True iff no two clusters share an input place."""
    _check_covers(net, p)
    seen: set[int] = set()
    for cluster in p.clusters:
        inputs = cluster_inputs(net, cluster)
        if inputs & seen:
            return False
        seen |= inputs
    return True


def coarsen(p: WorkClusterPartition, merges) -> WorkClusterPartition:
    """Union the clusters named by each ``(i, j)`` index pair."""
    n = len(p.clusters)
    uf = UnionFind(n)
    for i, j in merges:
        for k in (i, j):
            if not 0 <= k < n:
                raise IndexOutOfRange(f"cluster index {k} out of range for {n} clusters")
        uf.union(i, j)
    return WorkClusterPartition.of(
        [t for i in group for t in p.clusters[i]] for group in uf.groups())
