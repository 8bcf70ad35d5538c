"""Network model, validation, topological order, and min-cut tests."""

import itertools
import json

import pytest

from qmcast.errors import (CyclicGraph, ParseError, StructureViolation,
                           UnknownTarget)
from qmcast.network import (NetworkSpec, builtin_network, min_cut,
                            parse_network, topological_edge_order)

BUILTINS = ["butterfly", "chain", "tree2", "tree3"]


def brute_force_min_cut(net, target):
    """Smallest edge set whose removal disconnects source from target."""
    n_e = len(net.edges)
    for size in range(n_e + 1):
        for cut in itertools.combinations(range(n_e), size):
            removed = set(cut)
            # BFS over the surviving edges
            seen = {net.source}
            frontier = [net.source]
            while frontier:
                v = frontier.pop()
                for i, (tail, head) in enumerate(net.edges):
                    if i not in removed and tail == v and head not in seen:
                        seen.add(head)
                        frontier.append(head)
            if target not in seen:
                return size
    raise AssertionError("unreachable")


def test_butterfly_min_cut():
    net = builtin_network("butterfly")
    assert [min_cut(net, t) for t in net.targets] == [2, 2]


def test_builtin_min_cuts_match_brute_force():
    for name in BUILTINS:
        net = builtin_network(name)
        for t in net.targets:
            assert min_cut(net, t) == brute_force_min_cut(net, t), (name, t)


def test_min_cut_unknown_target():
    net = builtin_network("butterfly")
    with pytest.raises(UnknownTarget):
        min_cut(net, "nope")


def test_topological_edge_order_is_linear_extension():
    for name in BUILTINS:
        net = builtin_network(name)
        pos = {e: i for i, e in enumerate(topological_edge_order(net))}
        assert sorted(pos) == list(range(len(net.edges)))
        for e_out, (tail, _) in enumerate(net.edges):
            for e_in in net.in_edges(tail):
                assert pos[e_in] < pos[e_out]


def test_parse_round_trip():
    net = builtin_network("butterfly")
    again = parse_network(json.dumps(net.to_document()))
    assert again.to_document() == net.to_document()


def test_parallel_edges_allowed():
    net = NetworkSpec(["s", "t"], [("s", "t"), ("s", "t")], "s", ["t"])
    assert min_cut(net, "t") == 2
    assert net.in_edges("t") == [0, 1]


def test_cycle_rejected():
    with pytest.raises(CyclicGraph):
        NetworkSpec(["s", "a", "b", "t"],
                    [("s", "a"), ("a", "b"), ("b", "a"), ("a", "t")],
                    "s", ["t"])


def test_structure_violations():
    with pytest.raises(StructureViolation):  # unknown edge endpoint
        NetworkSpec(["s", "t"], [("s", "x")], "s", ["t"])
    with pytest.raises(StructureViolation):  # source cannot be a target
        NetworkSpec(["s", "t"], [("s", "t")], "s", ["s"])
    with pytest.raises(StructureViolation):  # edge into the source
        NetworkSpec(["s", "a", "t"], [("s", "a"), ("a", "s"), ("a", "t")],
                    "s", ["t"])
    with pytest.raises(StructureViolation):  # edge out of a target
        NetworkSpec(["s", "t", "u"], [("s", "t"), ("t", "u"), ("s", "u")],
                    "s", ["t", "u"])
    with pytest.raises(StructureViolation):  # dangling intermediate node
        NetworkSpec(["s", "a", "t"], [("s", "a"), ("s", "t")], "s", ["t"])
    with pytest.raises(StructureViolation):  # duplicate node ids
        NetworkSpec(["s", "s", "t"], [("s", "t")], "s", ["t"])


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_network("not json")
    with pytest.raises(ParseError):
        parse_network('{"nodes": ["s"]}')
    with pytest.raises(ParseError):
        parse_network('{"nodes": ["s","t"], "edges": [["s"]], '
                      '"source": "s", "targets": ["t"]}')
    with pytest.raises(ParseError):
        builtin_network("no_such_network")
