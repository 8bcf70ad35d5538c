"""Solvable classical linear multicast network codes.

Construction is seeded random linear coding: local coefficients are drawn
uniformly, global vectors are propagated in topological order, and
solvability is certified by a rank-r check at every target.  Decoders are
then obtained by Gaussian elimination from the global vectors.

Intermediate nodes order their incoming edges by edge-list index; the
exported code document records the same order.
"""

from __future__ import annotations

import json
import random
from typing import Sequence

from . import gf
from .errors import DimMismatch, InfeasibleRate, ParseError, SearchExhausted
from .gf import FieldElement, FieldSpec, make_field
from .network import NetworkSpec, min_cut, parse_network, topological_edge_order


class LinearMulticastCode:
    """A solvable linear multicast code {f_e} with decoders {g_i}."""

    def __init__(self, net: NetworkSpec, field: FieldSpec, r: int,
                 local_maps: Sequence[Sequence[FieldElement]],
                 global_vectors: Sequence[Sequence[FieldElement]],
                 decoders: Sequence[Sequence[Sequence[FieldElement]]]):
        self.net = net
        self.field = field
        self.r = r
        self.local_maps = [list(m) for m in local_maps]
        self.global_vectors = [list(v) for v in global_vectors]
        self.decoders = [[list(row) for row in d] for d in decoders]

    def in_edges_of_edge(self, e: int) -> list[int]:
        """Incoming edges of the tail of edge e, in edge-index order."""
        return self.net.in_edges(self.net.edges[e][0])

    def is_source_edge(self, e: int) -> bool:
        return self.net.edges[e][0] == self.net.source

    def target_rank(self, i: int) -> int:
        rows = [self.global_vectors[e] for e in self.net.in_edges(self.net.targets[i])]
        return gf.matrix_rank(rows)

    def to_document(self) -> dict:
        as_idx = lambda seq: [el.index for el in seq]
        return {
            "network": self.net.to_document(),
            "field": {"p": self.field.p, "t": self.field.t,
                      "modulus": list(self.field.modulus)},
            "rate": self.r,
            "incoming_order": "edge-list index",
            "local_maps": [as_idx(m) for m in self.local_maps],
            "global_vectors": [as_idx(v) for v in self.global_vectors],
            "decoders": [[as_idx(row) for row in d] for d in self.decoders],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2)


def code_from_document(doc: dict) -> LinearMulticastCode:
    """Rebuild a code from its exported document, revalidating everything."""
    try:
        net = NetworkSpec(**{k: doc["network"][k]
                             for k in ("nodes", "edges", "source", "targets")})
        f = doc["field"]
        field = FieldSpec(f["p"], f["t"], f["modulus"])
        r = int(doc["rate"])
        elem = field.from_int
        local_maps = [[elem(i) for i in m] for m in doc["local_maps"]]
        decoders = [[[elem(i) for i in row] for row in d] for d in doc["decoders"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad code document: {exc}") from exc
    global_vectors = _propagate(net, field, r, local_maps)
    code = LinearMulticastCode(net, field, r, local_maps, global_vectors, decoders)
    _check_solvable(code)
    return code


def code_from_json(text: str) -> LinearMulticastCode:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return code_from_document(doc)


def _propagate(net: NetworkSpec, field: FieldSpec, r: int,
               local_maps) -> list[list[FieldElement]]:
    """Global vectors from local maps, by the propagation recurrence."""
    order = topological_edge_order(net)
    global_vectors: list = [None] * len(net.edges)
    for e in order:
        tail = net.edges[e][0]
        if tail == net.source:
            global_vectors[e] = list(local_maps[e])
        else:
            ins = net.in_edges(tail)
            acc = [field.zero()] * r
            for coeff, e_in in zip(local_maps[e], ins):
                acc = [a + coeff * g for a, g in zip(acc, global_vectors[e_in])]
            global_vectors[e] = acc
    return global_vectors


def _solve_decoders(net: NetworkSpec, field: FieldSpec, r: int,
                    global_vectors) -> list:
    """Per-target r x m_i decoder matrices with D_i . G_i = I_r."""
    decoders = []
    for t in net.targets:
        ins = net.in_edges(t)
        g_t = [[global_vectors[e][k] for e in ins] for k in range(r)]  # r x m_i
        rows = []
        for k in range(r):
            unit = [field.one() if j == k else field.zero() for j in range(r)]
            sol, _ = gf.solve_linear(g_t, unit)
            rows.append(sol)
        decoders.append(rows)
    return decoders


def _check_solvable(code: LinearMulticastCode) -> None:
    for i in range(len(code.net.targets)):
        if code.target_rank(i) < code.r:
            raise SearchExhausted(f"target {code.net.targets[i]!r} has rank < r")
        ins = code.net.in_edges(code.net.targets[i])
        g_t = [code.global_vectors[e] for e in ins]  # m_i x r
        prod = gf.mat_mul(code.decoders[i], g_t)
        if prod != gf.identity_matrix(code.field, code.r):
            raise SearchExhausted(f"decoder at target {code.net.targets[i]!r} is wrong")


def construct_code(net: NetworkSpec, r: int, field: FieldSpec, seed: int,
                   retry_budget: int = 1000) -> LinearMulticastCode:
    """Find a solvable rate-r code by seeded random sampling.

    Raises InfeasibleRate when some min-cut is below r (before sampling)
    and SearchExhausted when sampling fails within the budget (a larger
    field usually fixes that).
    """
    if r < 1:
        raise ValueError("rate must be >= 1")
    for t in net.targets:
        c = min_cut(net, t)
        if c < r:
            raise InfeasibleRate(f"min-cut to {t!r} is {c} < r={r}")

    rng = random.Random(seed)
    for _ in range(retry_budget):
        local_maps = []
        for e in range(len(net.edges)):
            tail = net.edges[e][0]
            n_in = r if tail == net.source else len(net.in_edges(tail))
            local_maps.append([field.from_int(rng.randrange(field.q)) for _ in range(n_in)])
        global_vectors = _propagate(net, field, r, local_maps)
        ok = all(
            gf.matrix_rank([global_vectors[e] for e in net.in_edges(t)]) == r
            for t in net.targets
        )
        if ok:
            decoders = _solve_decoders(net, field, r, global_vectors)
            code = LinearMulticastCode(net, field, r, local_maps, global_vectors, decoders)
            _check_solvable(code)
            return code
    raise SearchExhausted(
        f"no solvable code in {retry_budget} samples over GF({field.q}); try a larger field")


def encode_session(code: LinearMulticastCode, x: Sequence[FieldElement]) -> dict:
    """Edge alphabets for input message x, computed in topological order."""
    if len(x) != code.r:
        raise DimMismatch(f"message length {len(x)} != rate {code.r}")
    y: dict[int, FieldElement] = {}
    for e in topological_edge_order(code.net):
        if code.is_source_edge(e):
            y[e] = gf.vec_dot(code.local_maps[e], x)
        else:
            ins = code.in_edges_of_edge(e)
            y[e] = gf.vec_dot(code.local_maps[e], [y[j] for j in ins])
    return y


def decode_at_target(code: LinearMulticastCode, i: int,
                     y: Sequence[FieldElement]) -> list[FieldElement]:
    """Apply decoder g_i to the incoming alphabets of target i."""
    m_i = len(code.net.in_edges(code.net.targets[i]))
    if len(y) != m_i:
        raise DimMismatch(f"expected {m_i} incoming alphabets, got {len(y)}")
    return gf.mat_vec(code.decoders[i], y)
