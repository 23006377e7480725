"""Multicast tree construction (Dijkstra SPT, Kruskal MST) and transmission-group decomposition.

A weighted graph is a mapping ``{(u, v): weight}`` over undirected edges.
Node ids only need to be hashable and mutually orderable; ties are broken
on that order so results are reproducible.
"""

from __future__ import annotations

import dataclasses
import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Hashable, Iterable, Mapping, Tuple

import numpy as np

from .radio import LinkChannelTable

Node = Hashable
Graph = Mapping[Tuple[Node, Node], float]


class TreeKind(str, Enum):
    SPT = "SPT"
    MST = "MST"


class EdgeMetric(str, Enum):
    ETX = "ETX"
    DISTANCE = "Distance"


class Mode(str, Enum):
    UNICAST = "Unicast"
    MULTICAST = "Multicast"


@dataclass(frozen=True)
class TransmissionGroup:
    transmitter: Node
    receivers: tuple
    mode: Mode

    @classmethod
    def of(cls, transmitter, receivers) -> "TransmissionGroup":
        receivers = tuple(sorted(receivers))
        if not receivers:
            raise ValueError("a transmission group needs at least one receiver")
        mode = Mode.UNICAST if len(receivers) == 1 else Mode.MULTICAST
        return cls(transmitter, receivers, mode)


@dataclass(frozen=True)
class MulticastTree:
    kind: TreeKind
    source: Node
    parent: Dict[Node, Node]
    destinations: frozenset
    unreachable: frozenset = frozenset()
    groups: tuple = field(default=(), compare=False)

    @property
    def nodes(self) -> set:
        return {self.source, *self.parent}

    @property
    def edges(self) -> set:
        return {tuple(sorted((c, p))) for c, p in self.parent.items()}

    def path(self, node) -> list:
        """Nodes from the source down to ``node``."""
        out = [node]
        while node != self.source:
            node = self.parent[node]
            out.append(node)
        return out[::-1]


def _adjacency(graph: Graph) -> dict:
    adj: dict = {}
    for (u, v), w in graph.items():
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, w))
    for nbrs in adj.values():
        nbrs.sort(key=lambda t: t[0])
    return adj


def dijkstra(graph: Graph, source: Node):
    """Single-source shortest paths; returns ``(cost, parent)`` dicts.

    Equal tentative costs keep the final hop with the smaller transmitter.
    """
    adj = _adjacency(graph)
    cost = {source: 0.0}
    parent: dict = {}
    done = set()
    heap = [(0.0, source)]
    while heap:
        c, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, w in adj.get(u, ()):
            if v in done:
                continue
            nc = c + w
            old = cost.get(v, math.inf)
            if nc < old or (nc == old and u < parent[v]):
                cost[v] = nc
                parent[v] = u
                heapq.heappush(heap, (nc, v))
    return cost, parent


def _prune(kind: TreeKind, source, parent: dict, destinations, reached) -> MulticastTree:
    keep: dict = {}
    for d in sorted(reached):
        node = d
        while node != source and node not in keep:
            keep[node] = parent[node]
            node = parent[node]
    tree = MulticastTree(
        kind=kind,
        source=source,
        parent=keep,
        destinations=frozenset(reached),
        unreachable=frozenset(set(destinations) - set(reached)),
    )
    return dataclasses.replace(tree, groups=tuple(decompose_groups(tree)))


def dijkstra_spt(graph: Graph, source: Node, destinations: Iterable[Node]) -> MulticastTree:
    """Union of per-destination shortest paths, pruned to the destinations."""
    destinations = set(destinations) - {source}
    cost, parent = dijkstra(graph, source)
    reached = {d for d in destinations if d in cost}
    return _prune(TreeKind.SPT, source, parent, destinations, reached)


class UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}
        self.rank = {x: 0 for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def _component(graph: Graph, source) -> set:
    adj = _adjacency(graph)
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, _ in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def kruskal_edges(graph: Graph, nodes: Iterable[Node] = None) -> list:
    """Kruskal over ``nodes`` (default: all). Ties go to the smaller endpoint pair."""
    if nodes is None:
        nodes = {x for e in graph for x in e}
    nodes = set(nodes)
    uf = UnionFind(nodes)
    ordered = sorted(
        (w, tuple(sorted(e))) for e, w in graph.items() if e[0] in nodes and e[1] in nodes
    )
    picked = []
    for w, (u, v) in ordered:
        if uf.union(u, v):
            picked.append((u, v))
            if len(picked) == len(nodes) - 1:
                break
    return picked


def kruskal_mst(graph: Graph, source: Node, destinations: Iterable[Node]) -> MulticastTree:
    """Spanning tree of the source's component, rooted at the source and pruned."""
    destinations = set(destinations) - {source}
    comp = _component(graph, source)
    mst = kruskal_edges(graph, comp)
    adj: dict = {}
    for u, v in mst:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    parent: dict = {}
    queue = deque([source])
    seen = {source}
    while queue:
        u = queue.popleft()
        for v in sorted(adj.get(u, ())):
            if v not in seen:
                seen.add(v)
                parent[v] = u
                queue.append(v)
    reached = destinations & comp
    return _prune(TreeKind.MST, source, parent, destinations, reached)


def build_tree(kind: TreeKind, graph: Graph, source, destinations) -> MulticastTree:
    if TreeKind(kind) is TreeKind.SPT:
        return dijkstra_spt(graph, source, destinations)
    return kruskal_mst(graph, source, destinations)


def tree_from_parent(kind: TreeKind, source, parent: Mapping, destinations) -> MulticastTree:
    """Wrap an explicit parent map (e.g. a hand-drawn tree) as a pruned MulticastTree."""
    return _prune(TreeKind(kind), source, dict(parent), destinations, set(destinations))


def decompose_groups(tree: MulticastTree) -> list:
    """One group per internal node, transmitters in breadth-first order from the source."""
    children: dict = {}
    for c, p in tree.parent.items():
        children.setdefault(p, []).append(c)
    groups = []
    queue = deque([tree.source])
    while queue:
        u = queue.popleft()
        kids = sorted(children.get(u, ()))
        if kids:
            groups.append(TransmissionGroup.of(u, kids))
            queue.extend(kids)
    return groups


def edge_weights(table: LinkChannelTable, metric: EdgeMetric) -> dict:
    metric = EdgeMetric(metric)
    if metric is EdgeMetric.ETX:
        return {
            e: float(w) for e, w in zip(table.edges, table.etx) if np.isfinite(w)
        }
    return {e: float(d) for e, d in zip(table.edges, table.dist)}
