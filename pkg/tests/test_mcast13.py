"""1->3 clone multicast tests: unitary completion helpers, the local
reconstruction blocks, and full runs against the channel oracle."""

import math

import numpy as np
import pytest

from qmcast.code import construct_code
from qmcast.errors import DegenerateParams, DimMismatch
from qmcast.gf import make_field
from qmcast.mcast13 import (EBIT_BUDGET_13, build_compressor_rr,
                            build_compressor_rs, build_sign_fix_13, build_u5_rs,
                            build_u5_rr, build_u6, build_u7_rr, build_u7_rs,
                            build_u8_rr, build_u8_rs, embed_block,
                            permutation_matrix, run_protocol3,
                            unitary_from_images, verify_13)
from qmcast.network import builtin_network
from qmcast.uqcm import CloneParams13, haar_random_state, psi2_rs


def tree3_code(p=2, t=1, seed=0):
    return construct_code(builtin_network("tree3"), 1, make_field(p, t), seed)


# -- completion helpers -------------------------------------------------------

def test_unitary_from_images_basic():
    v = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
    u = unitary_from_images([(v, 0)], 3)
    assert np.allclose(u @ u.conj().T, np.eye(3))
    assert np.allclose(u @ v, [1.0, 0.0, 0.0])


def test_unitary_from_images_rejects_degenerate():
    v = np.array([1.0, 0.0])
    with pytest.raises(DegenerateParams):
        unitary_from_images([(v, 0), (v, 1)], 2)
    with pytest.raises(DegenerateParams):
        unitary_from_images([(np.zeros(2), 0)], 2)


def test_permutation_matrix_completion():
    u = permutation_matrix({0: 2, 1: 0}, 4)
    # remaining inputs 2, 3 go to remaining outputs 1, 3 in order
    assert u[2, 0] == u[0, 1] == u[1, 2] == u[3, 3] == 1.0
    with pytest.raises(ValueError):
        permutation_matrix({0: 1, 1: 1}, 3)


def test_embed_block():
    small = np.array([[0, 1], [1, 0]], dtype=complex)
    big = embed_block(small, 2, 3, 1)
    assert big[2, 2] == 1.0 and big[0, 1] == 1.0
    two = embed_block(np.kron(small, small), 2, 3, 2)
    assert np.allclose(two @ two.conj().T, np.eye(9))
    assert two[8, 8] == 1.0  # outside the embedded block: identity


# -- protocol blocks ----------------------------------------------------------

@pytest.mark.parametrize("d", [2, 3])
def test_compressor_maps_outcome_sector(d):
    """The compressor sends the (r, s) post-outcome state to kappa x |00>."""
    p = CloneParams13.from_ratio(0.8, 0.5, 0.3, d)
    psi = haar_random_state(d, np.random.default_rng(0))
    for r in range(d):
        for s in range(d):
            comp = build_compressor_rr(p, r) if r == s else build_compressor_rs(p, r, s)
            assert np.allclose(comp @ comp.conj().T, np.eye(d ** 3), atol=1e-9)
            st = psi2_rs(psi, p, r, s).apply(comp, ["A", "B", "C"], check=False)
            vec = st.vector_in_order(["A", "B", "C"]).reshape(d, d * d)
            assert np.allclose(vec[:, 1:], 0.0, atol=1e-12)
            assert np.sum(np.abs(vec[:, 0]) ** 2) == pytest.approx(st.norm2, abs=1e-12)


def test_u5_relabels_from_zero():
    d, dw, r, s = 3, 3, 1, 2
    u5 = build_u5_rs(d, dw, r, s)
    # control j = 0 (not in {r, s}): 0 -> j, 1 -> r, 2 -> s
    assert u5[0 * dw + 0, 0 * dw + 0] == 1.0
    assert u5[0 * dw + r, 0 * dw + 1] == 1.0
    assert u5[0 * dw + s, 0 * dw + 2] == 1.0
    # controls r, s untouched
    for c in (r, s):
        for x in range(dw):
            assert u5[c * dw + x, c * dw + x] == 1.0


def test_u5_rr_relabels():
    d, dw, r = 2, 3, 0
    u5 = build_u5_rr(d, dw, r)
    assert u5[1 * dw + 1, 1 * dw + 1] == 0.0  # j = 1 block permutes
    assert u5[1 * dw + 1, 1 * dw + 0] == 1.0  # 0 -> j = 1
    assert u5[1 * dw + 0, 1 * dw + 1] == 1.0  # 1 -> r = 0


def test_u6_swaps_on_controls_only():
    d, dw = 3, 3
    u6 = build_u6(d, dw, (1, 2))
    dim_pair = dw * dw
    for c in range(d):
        blk = u6[c * dim_pair:(c + 1) * dim_pair, c * dim_pair:(c + 1) * dim_pair]
        if c in (1, 2):
            assert blk[1 * dw + 2, 2 * dw + 1] == 1.0  # |21> -> |12|
        else:
            assert np.allclose(blk, np.eye(dim_pair))


def test_u7_blocks():
    u7 = build_u7_rs(3, 3, 0, 2)
    # control 0: 0 -> 0, 1 -> 2; control 2: 0 -> 2, 1 -> 0
    assert u7[0 * 3 + 2, 0 * 3 + 1] == 1.0
    assert u7[2 * 3 + 2, 2 * 3 + 0] == 1.0
    u7rr = build_u7_rr(2, 3, 1)
    assert u7rr[1 * 3 + 1, 1 * 3 + 0] == 1.0  # X^r on control r


def test_u8_merges_resources():
    p = CloneParams13.from_ratio(0.8, 0.5, 0.3, 3)
    dw = 3
    u8 = build_u8_rs(p, dw)
    a2, b2, g2 = p.double_primed()
    v = np.zeros((dw, dw, dw), dtype=complex)
    v[0, 0, 1], v[1, 0, 0], v[0, 1, 0] = a2, b2, g2
    out = u8 @ v.reshape(-1)
    assert abs(out[0]) == pytest.approx(1.0, abs=1e-12)
    a1, b1, g1 = p.primed()
    w = np.zeros((dw, dw, dw), dtype=complex)
    w[0, 1, 2] = w[0, 2, 1] = a1
    w[1, 0, 2] = w[2, 0, 1] = b1
    w[1, 2, 0] = w[2, 1, 0] = g1
    out = u8 @ w.reshape(-1)
    assert abs(out[9]) == pytest.approx(1.0, abs=1e-12)  # |100> in base 3


def test_u8_rr_merges_resources():
    p = CloneParams13.from_ratio(0.8, 0.5, 0.3, 2)
    u8 = build_u8_rr(p, 3)
    a2, b2, g2 = p.primed2()
    w = np.zeros((3, 3, 3), dtype=complex)
    w[0, 1, 1], w[1, 0, 1], w[1, 1, 0] = a2, b2, g2
    out = u8 @ w.reshape(-1)
    assert abs(out[9]) == pytest.approx(1.0, abs=1e-12)


def test_sign_fix_identity_at_k_zero():
    assert np.allclose(build_sign_fix_13(3, (0, 2), 0), np.eye(3))
    u = build_sign_fix_13(3, (0, 2), 1)
    assert np.allclose(np.diag(u), [-1.0, 1.0, -1.0])


# -- full runs ----------------------------------------------------------------

@pytest.mark.parametrize("p,t", [(2, 1), (3, 1)])
def test_protocol3_matches_oracle(p, t):
    code = tree3_code(p, t)
    d = p ** t
    params = CloneParams13.from_ratio(0.8, 0.5, 0.3, d)
    psi = haar_random_state(d, np.random.default_rng(20))
    report = verify_13(code, params, psi, rng=np.random.default_rng(21))
    assert report["passed"]
    assert report["trace_distance"] < 1e-9
    assert report["min_branch_fidelity"] >= 1 - 1e-9
    for f_sim, f_expect in zip(report["fidelities"], report["analytic_fidelities"]):
        assert f_sim == pytest.approx(f_expect, abs=1e-9)


def test_protocol3_symmetric_qubit_seven_ninths():
    code = tree3_code()
    params = CloneParams13.from_ratio(1, 1, 1, 2)
    psi = haar_random_state(2, np.random.default_rng(22))
    report = verify_13(code, params, psi, rng=np.random.default_rng(23))
    assert report["passed"]
    for f in report["fidelities"]:
        assert f == pytest.approx(7 / 9, abs=1e-9)


def test_protocol3_ebit_accounting():
    code = tree3_code()
    params = CloneParams13.from_ratio(0.8, 0.5, 0.3, 2)
    psi = haar_random_state(2, np.random.default_rng(24))
    report = verify_13(code, params, psi, rng=np.random.default_rng(25))
    # unequal ancilla outcomes: exactly 2 + 4 log2(3); equal: 4 ebits
    assert report["ebits_unequal"] == pytest.approx(EBIT_BUDGET_13, abs=1e-9)
    assert report["ebits_equal"] == pytest.approx(4.0, abs=1e-9)
    assert report["max_ebits"] <= EBIT_BUDGET_13 + 1e-9


def test_protocol3_probabilities_sum_to_one():
    code = tree3_code()
    params = CloneParams13.from_ratio(1, 0.6, 0.2, 2)
    psi = haar_random_state(2, np.random.default_rng(26))
    res = run_protocol3(code, params, psi, rng=np.random.default_rng(27))
    assert sum(br.probability for br in res.branches) == pytest.approx(1.0, abs=1e-9)
    assert res.rho.trace() == pytest.approx(1.0, abs=1e-9)
    # the remainder projector never fires: only outcomes 0 and 1 appear
    assert set(br.k for br in res.branches) <= {0, 1}


def test_protocol3_dimension_guards():
    code = tree3_code()
    with pytest.raises(DimMismatch):
        run_protocol3(code, CloneParams13.from_ratio(1, 1, 1, 3),
                      np.array([1.0, 0, 0]))
    two_targets = construct_code(builtin_network("tree2"), 1, make_field(2, 1), 0)
    with pytest.raises(DimMismatch):
        run_protocol3(two_targets, CloneParams13.from_ratio(1, 1, 1, 2),
                      np.array([1.0, 0]))
