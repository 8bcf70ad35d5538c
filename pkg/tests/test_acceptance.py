"""End-to-end acceptance gate.

Each test covers one release criterion and prints a single PASS line; the
pinned tolerances are stated inline.  Run with -s (or read the -v status
column) for the per-criterion summary.
"""

import math
import time

import numpy as np
import pytest

import qmcast.mcast12
import qmcast.mcast13
from qmcast.code import construct_code, decode_at_target, encode_session
from qmcast.errors import InfeasibleRate, QmcastError
from qmcast.gf import make_field
from qmcast.kobayashi import ghz_reference, run_protocol1
from qmcast.mcast12 import build_upsilon, verify_12
from qmcast.mcast13 import EBIT_BUDGET_13, verify_13
from qmcast.network import builtin_network, min_cut
from qmcast.sim import PureState, fidelity, int_to_field_vector, partial_trace
from qmcast.uqcm import (CloneParams12, CloneParams13, analytic_fidelities_12,
                         channel_12_oracle, haar_random_state)

PAIRS_12 = [(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.7, 0.4), (0.3, 0.9)]
TRIPLES_13 = [(1, 1, 1), (1, 0, 0), (0.8, 0.5, 0.3), (0.2, 0.9, 0.4), (1, 0.6, 0.2)]


def _report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE {name}: PASS ({detail})")


def test_criterion_1_ghz_butterfly_all_branches():
    """Butterfly, GF(2), rate 2: every measurement branch of 20 seeded
    input states reaches the GHZ state with fidelity >= 1 - 1e-9, in < 10 s."""
    start = time.time()
    code = construct_code(builtin_network("butterfly"), 2, make_field(2, 1), 0)
    worst = 1.0
    for seed in range(20):
        psi = haar_random_state(4, np.random.default_rng(seed))
        res = run_protocol1(code, psi)
        ref = ghz_reference(code, psi)
        worst = min(worst, min(br.state.fidelity_upto_phase(ref)
                               for br in res.branches))
    elapsed = time.time() - start
    assert worst >= 1 - 1e-9
    assert elapsed < 10.0
    _report("1 (GHZ distribution)",
            f"min branch fidelity {worst:.3e}, {elapsed:.1f}s")


def test_criterion_2_clone12_multicast():
    """1->2 clone multicast on the butterfly (d = 4) and the two-target
    tree (d = 2 and 3): 10 states x 5 asymmetries each, channel trace
    distance < 1e-9 and per-branch fidelity >= 1 - 1e-9, in < 60 s."""
    start = time.time()
    configs = [
        (construct_code(builtin_network("butterfly"), 2, make_field(2, 1), 0), 4),
        (construct_code(builtin_network("tree2"), 1, make_field(2, 1), 0), 2),
        (construct_code(builtin_network("tree2"), 1, make_field(3, 1), 0), 3),
    ]
    worst_td, worst_f = 0.0, 1.0
    rng = np.random.default_rng(42)
    for code, d in configs:
        for seed in range(10):
            psi = haar_random_state(d, np.random.default_rng(seed))
            for ra, rb in PAIRS_12:
                params = CloneParams12.from_ratio(ra, rb, d)
                rep = verify_12(code, params, psi, rng=rng)
                worst_td = max(worst_td, rep["trace_distance"])
                worst_f = min(worst_f, rep["min_branch_fidelity"])
    elapsed = time.time() - start
    assert worst_td < 1e-9
    assert worst_f >= 1 - 1e-9
    assert elapsed < 60.0
    _report("2 (1->2 multicast)",
            f"max trace distance {worst_td:.3e}, {elapsed:.1f}s")


def test_criterion_3_fidelity_sweep():
    """21-point asymmetry sweep at d = 2 and d = 4: simulated clone
    fidelities match the closed forms within 1e-9; the symmetric qubit
    point gives exactly 5/6."""
    worst = 0.0
    for d in (2, 4):
        psi = haar_random_state(d, np.random.default_rng(d))
        for b in np.linspace(0.0, 1.0, 21):
            a = -b / d + math.sqrt(b * b / (d * d) + 1 - b * b)
            params = CloneParams12(a, b, d)
            fa, fb = analytic_fidelities_12(params)
            rho = channel_12_oracle(psi, params)
            sa = fidelity(partial_trace(rho, ["A"]),
                          PureState.from_vector([("A", d)], psi))
            sb = fidelity(partial_trace(rho, ["B"]),
                          PureState.from_vector([("B", d)], psi))
            worst = max(worst, abs(sa - fa), abs(sb - fb))
    assert worst < 1e-9
    sym = analytic_fidelities_12(CloneParams12.from_ratio(1, 1, 2))
    assert sym == pytest.approx((5 / 6, 5 / 6), abs=1e-12)
    _report("3 (fidelity sweep)", f"max deviation {worst:.3e}")


def test_criterion_4_clone13_multicast():
    """1->3 clone multicast on the three-target tree over GF(2) and GF(3):
    10 states x 5 asymmetries each, trace distance < 1e-9; the symmetric
    qubit cloner reaches 7/9 at every target; all in < 5 min."""
    start = time.time()
    worst_td, worst_f = 0.0, 1.0
    rng = np.random.default_rng(43)
    for p in (2, 3):
        code = construct_code(builtin_network("tree3"), 1, make_field(p, 1), 0)
        for seed in range(10):
            psi = haar_random_state(p, np.random.default_rng(100 + seed))
            for ra, rb, rc in TRIPLES_13:
                params = CloneParams13.from_ratio(ra, rb, rc, p)
                rep = verify_13(code, params, psi, rng=rng)
                worst_td = max(worst_td, rep["trace_distance"])
                worst_f = min(worst_f, rep["min_branch_fidelity"])
    sym = verify_13(construct_code(builtin_network("tree3"), 1, make_field(2, 1), 0),
                    CloneParams13.from_ratio(1, 1, 1, 2),
                    haar_random_state(2, np.random.default_rng(7)),
                    rng=np.random.default_rng(8))
    elapsed = time.time() - start
    assert worst_td < 1e-9
    assert worst_f >= 1 - 1e-9
    for f in sym["fidelities"]:
        assert f == pytest.approx(7 / 9, abs=1e-9)
    assert elapsed < 300.0
    _report("4 (1->3 multicast)",
            f"max trace distance {worst_td:.3e}, {elapsed:.1f}s")


def test_criterion_5_resource_accounting():
    """Entanglement budgets: <= 2 ebits per 1->2 run, <= 2 + 4 log2(3) per
    1->3 run with equality on unequal ancilla outcomes; every network edge
    is used exactly once per distribution."""
    code2 = construct_code(builtin_network("tree2"), 1, make_field(2, 1), 0)
    psi2 = haar_random_state(2, np.random.default_rng(0))
    rep2 = verify_12(code2, CloneParams12.from_ratio(0.7, 0.4, 2), psi2,
                     rng=np.random.default_rng(1))
    assert rep2["max_ebits"] <= 2.0 + 1e-9

    code3 = construct_code(builtin_network("tree3"), 1, make_field(2, 1), 0)
    rep3 = verify_13(code3, CloneParams13.from_ratio(0.8, 0.5, 0.3, 2), psi2,
                     rng=np.random.default_rng(2))
    assert rep3["max_ebits"] <= EBIT_BUDGET_13 + 1e-9
    assert rep3["ebits_unequal"] == pytest.approx(EBIT_BUDGET_13, abs=1e-9)
    assert rep3["ebits_equal"] == pytest.approx(4.0, abs=1e-9)

    for name, r, field in [("butterfly", 2, make_field(2, 1)),
                           ("tree3", 1, make_field(2, 1))]:
        code = construct_code(builtin_network(name), r, field, 0)
        psi = haar_random_state(field.q ** r, np.random.default_rng(3))
        res = run_protocol1(code, psi)
        assert res.transcript.edge_uses == {
            e: 1 for e in range(len(code.net.edges))}
    _report("5 (resource accounting)",
            f"1->2 max {rep2['max_ebits']:.4f} <= 2, "
            f"1->3 unequal {rep3['ebits_unequal']:.6f} = 2 + 4 log2 3")


def test_criterion_6_classical_round_trip():
    """Exhaustive encode/decode round trip on every shipped network and the
    min-cut feasibility gate on the butterfly."""
    configs = [("butterfly", 2, 1, 2), ("chain", 2, 1, 1),
               ("tree2", 3, 1, 1), ("tree3", 2, 1, 1), ("butterfly", 2, 2, 2)]
    checked = 0
    for name, p, t, r in configs:
        net = builtin_network(name)
        field = make_field(p, t)
        code = construct_code(net, r, field, 0)
        for n in range(field.q ** r):
            x = int_to_field_vector(field, r, n)
            y = encode_session(code, x)
            for i, tgt in enumerate(net.targets):
                assert decode_at_target(
                    code, i, [y[e] for e in net.in_edges(tgt)]) == x
            checked += 1
    net = builtin_network("butterfly")
    assert [min_cut(net, tgt) for tgt in net.targets] == [2, 2]
    with pytest.raises(InfeasibleRate):
        construct_code(net, 3, make_field(2, 1), 0)
    _report("6 (classical codes)", f"{checked} messages round-tripped")


def test_criterion_7_universality():
    """Clone fidelity is input-independent: variance over 50 Haar-random
    inputs below 1e-18."""
    d = 3
    params = CloneParams12.from_ratio(0.6, 0.5, d)
    rng = np.random.default_rng(5)
    vals = []
    for _ in range(50):
        psi = haar_random_state(d, rng)
        rho = channel_12_oracle(psi, params)
        vals.append(fidelity(partial_trace(rho, ["A"]),
                             PureState.from_vector([("A", d)], psi)))
    var = float(np.var(vals))
    assert var < 1e-18
    _report("7 (universality)", f"fidelity variance {var:.3e}")


def _detects_mutation(run) -> tuple[bool, str]:
    """A mutated protocol must either fail verification by more than 1e-3
    in trace distance or trip an internal consistency guard."""
    try:
        rep = run()
    except (QmcastError, AssertionError) as exc:
        return True, f"guard tripped: {type(exc).__name__}"
    if not rep["passed"] and rep["trace_distance"] > 1e-3:
        return True, f"trace distance {rep['trace_distance']:.3e}"
    return False, "undetected"


def test_criterion_8_mutation_detection(monkeypatch):
    """Injected faults are caught: flipping the compression angle sign in
    the 1->2 protocol and dropping the helper swap in the 1->3 protocol."""
    code2 = construct_code(builtin_network("tree2"), 1, make_field(2, 1), 0)
    psi = haar_random_state(2, np.random.default_rng(1))
    params2 = CloneParams12.from_ratio(0.7, 0.4, 2)

    def flipped_upsilon(params, r):
        u = build_upsilon(params, r)
        d = params.d
        se = math.sin(params.eta)
        for j in range(d):
            if j == r:
                continue
            u[j * d + r, r * d + j] = -se
            u[r * d + j, j * d + r] = -se
        return u

    monkeypatch.setattr(qmcast.mcast12, "build_upsilon", flipped_upsilon)
    caught_a, how_a = _detects_mutation(
        lambda: verify_12(code2, params2, psi, rng=np.random.default_rng(2)))
    monkeypatch.undo()
    assert caught_a, "sign-flipped compression went unnoticed"

    code3 = construct_code(builtin_network("tree3"), 1, make_field(2, 1), 0)
    params3 = CloneParams13.from_ratio(0.8, 0.5, 0.3, 2)
    monkeypatch.setattr(qmcast.mcast13, "build_u6",
                        lambda d, dw, controls: np.eye(d * dw * dw, dtype=complex))
    caught_b, how_b = _detects_mutation(
        lambda: verify_13(code3, params3, psi, rng=np.random.default_rng(3)))
    monkeypatch.undo()
    assert caught_b, "omitted helper swap went unnoticed"
    _report("8 (mutation detection)", f"1->2 {how_a}; 1->3 {how_b}")
