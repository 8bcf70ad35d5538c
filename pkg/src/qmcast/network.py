"""Acyclic directed network model and structural validation.

A network document is JSON with fields:

    {"nodes": [...], "edges": [[tail, head], ...],
     "source": "s", "targets": ["t1", ...]}

Parallel edges are allowed and are identified by their position in the
edge list.  The simulator always transmits along the directed edge of G'
(reversing a channel is a teleportation detail the model does not need).
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Sequence

import networkx as nx

from .errors import CyclicGraph, ParseError, StructureViolation, UnknownTarget


class NetworkSpec:
    """Validated acyclic multicast network."""

    def __init__(self, nodes: Sequence[str], edges: Sequence[tuple], source: str,
                 targets: Sequence[str]):
        self.nodes = list(nodes)
        self.edges = [(str(t), str(h)) for t, h in edges]
        self.source = source
        self.targets = list(targets)
        self._validate()

    def _validate(self) -> None:
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise StructureViolation("duplicate node ids")
        if self.source not in node_set:
            raise StructureViolation(f"source {self.source!r} not a node")
        if not self.targets:
            raise StructureViolation("at least one target required")
        for t in self.targets:
            if t not in node_set:
                raise StructureViolation(f"target {t!r} not a node")
        if self.source in self.targets:
            raise StructureViolation("source cannot be a target")
        for tail, head in self.edges:
            if tail not in node_set or head not in node_set:
                raise StructureViolation(f"edge ({tail}, {head}) references unknown node")

        g = nx.MultiDiGraph()
        g.add_nodes_from(self.nodes)
        for i, (tail, head) in enumerate(self.edges):
            g.add_edge(tail, head, key=i)
        if not nx.is_directed_acyclic_graph(g):
            raise CyclicGraph("network digraph contains a cycle")

        targets = set(self.targets)
        for tail, head in self.edges:
            if head == self.source:
                raise StructureViolation("incoming edge to the source node")
            if tail in targets:
                raise StructureViolation(f"outgoing edge from target {tail!r}")
        # local-minimum / local-maximum conditions
        for v in self.nodes:
            if v == self.source or v in targets:
                continue
            if g.out_degree(v) > 0 and g.in_degree(v) == 0:
                raise StructureViolation(
                    f"non-source node {v!r} has outgoing edges but no incoming edge")
            if g.in_degree(v) > 0 and g.out_degree(v) == 0:
                raise StructureViolation(
                    f"non-target node {v!r} has incoming edges but no outgoing edge")
        self._graph = g

    # -- derived structure ---------------------------------------------------

    def in_edges(self, node: str) -> list[int]:
        """Indices of edges entering `node`, in edge-list order."""
        return [i for i, (_, h) in enumerate(self.edges) if h == node]

    def out_edges(self, node: str) -> list[int]:
        return [i for i, (t, _) in enumerate(self.edges) if t == node]

    def to_document(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [list(e) for e in self.edges],
            "source": self.source,
            "targets": list(self.targets),
        }


def parse_network(text: str) -> NetworkSpec:
    """Parse and validate a JSON network document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    for key in ("nodes", "edges", "source", "targets"):
        if key not in doc:
            raise ParseError(f"missing field {key!r}")
    edges = []
    for e in doc["edges"]:
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise ParseError(f"edge {e!r} is not a 2-element list")
        edges.append((e[0], e[1]))
    return NetworkSpec(doc["nodes"], edges, doc["source"], doc["targets"])


def builtin_network(name: str) -> NetworkSpec:
    """Load one of the shipped networks (butterfly, chain, tree2, tree3)."""
    try:
        text = resources.files("qmcast.data").joinpath(f"{name}.json").read_text()
    except FileNotFoundError as exc:
        raise ParseError(f"no builtin network named {name!r}") from exc
    return parse_network(text)


def topological_edge_order(net: NetworkSpec) -> list[int]:
    """Total order on edge indices extending the transmission partial order.

    Stable: among incomparable edges the lower node-topological position,
    then the lower edge index, comes first.
    """
    node_order = {v: i for i, v in enumerate(nx.lexicographical_topological_sort(
        net._graph, key=lambda v: net.nodes.index(v)))}
    return sorted(range(len(net.edges)), key=lambda i: (node_order[net.edges[i][0]], i))


def min_cut(net: NetworkSpec, target: str) -> int:
    """Minimum s-target edge cut (= max-flow with unit edge capacities)."""
    if target not in net.targets:
        raise UnknownTarget(f"{target!r} is not a target")
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    for tail, head in net.edges:
        if g.has_edge(tail, head):
            g[tail][head]["capacity"] += 1
        else:
            g.add_edge(tail, head, capacity=1)
    return int(nx.maximum_flow_value(g, net.source, target))
