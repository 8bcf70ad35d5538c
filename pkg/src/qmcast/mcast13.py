"""Multicast of 1->3 asymmetric universal clones over a quantum network.

The source applies the 1->3 cloning isometry, measures both ancillas
(outcomes r, s), compresses the three-clone state into one d-dim register
and distributes it as a GHZ-type state to the three targets.  The targets
rebuild the clones on registers M1 M2 M3 from two small pre-shared
entangled resources using local controlled permutations, subspace
teleportations into target 1, a three-outcome projective measurement, and
Fourier measurements with a collective phase correction.

The reconstruction branches on r != s versus r == s; the entanglement
consumed is exactly 2 + 4 log2(3) ebits on the unequal branch and 4 ebits
on the equal branch, both within the 2 + 4 log2(3) budget.

The working dimension of the M/N registers is max(d, 3) because the
resource states temporarily occupy levels {0, 1, 2} even when d = 2; the
final clone registers are truncated back to d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .code import LinearMulticastCode
from .errors import DegenerateParams, DimMismatch
from .kobayashi import verified_ghz
from .sim import (DensityMatrix, PureState, Register, fidelity, measure_in_basis,
                  partial_trace, pauli_X, pauli_Z, teleport, trace_distance)
from .transcript import RunTranscript
from .uqcm import (CloneParams13, analytic_fidelities_13, apply_isometry_13,
                   channel_13_oracle, psi2_rs)

_PRUNE = 1e-14
LOG2_3 = math.log2(3)
EBIT_BUDGET_13 = 2 + 4 * LOG2_3


# -- unitary completion ------------------------------------------------------

def unitary_from_images(pairs: list[tuple[np.ndarray, int]], dim: int) -> np.ndarray:
    """Unitary mapping each given unit vector to the given basis state,
    completed deterministically.

    The remaining standard basis vectors are Gram-Schmidt reduced against
    the inputs (in increasing index order) and paired, in order, with the
    unused output basis states.
    """
    vs, outs = [], []
    for vec, out in pairs:
        vec = np.asarray(vec, dtype=complex)
        n = np.linalg.norm(vec)
        if n < 1e-9:
            raise DegenerateParams("defining vector has (near) zero norm")
        vec = vec / n
        for prev in vs:
            if abs(np.vdot(prev, vec)) > 1e-9:
                raise DegenerateParams("defining vectors are not orthogonal")
        vs.append(vec)
        outs.append(out)
    u = np.zeros((dim, dim), dtype=complex)
    for vec, out in zip(vs, outs):
        u[out, :] += vec.conj()
    free_out = [k for k in range(dim) if k not in outs]
    basis = list(vs)
    idx = 0
    for k in range(dim):
        w = np.zeros(dim, dtype=complex)
        w[k] = 1.0
        for prev in basis:
            w = w - prev * np.vdot(prev, w)
        n = np.linalg.norm(w)
        if n < 1e-9:
            continue
        w = w / n
        basis.append(w)
        u[free_out[idx], :] += w.conj()
        idx += 1
    if idx != len(free_out):
        raise DegenerateParams("could not complete unitary")
    return u


def permutation_matrix(images: dict[int, int], dim: int) -> np.ndarray:
    """Permutation sending x -> images[x] for the pinned points and the
    remaining domain values, in increasing order, to the remaining
    codomain values in increasing order."""
    used = set(images.values())
    if len(used) != len(images):
        raise ValueError("pinned images collide")
    free = iter(sorted(set(range(dim)) - used))
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y = images[x] if x in images else next(free)
        u[y, x] = 1.0
    return u


def _controlled(d_ctrl: int, blocks: dict[int, np.ndarray], d_tgt: int) -> np.ndarray:
    u = np.zeros((d_ctrl * d_tgt, d_ctrl * d_tgt), dtype=complex)
    for c in range(d_ctrl):
        blk = blocks.get(c)
        u[c * d_tgt:(c + 1) * d_tgt, c * d_tgt:(c + 1) * d_tgt] = (
            np.eye(d_tgt) if blk is None else blk)
    return u


def embed_block(u_small: np.ndarray, small: int, big: int, arity: int) -> np.ndarray:
    """Embed a unitary on (C^small)^arity as a block of (C^big)^arity,
    identity on the complement."""
    if small == big:
        return u_small
    dim = big ** arity
    u = np.eye(dim, dtype=complex)
    idx = []
    for flat in range(small ** arity):
        digits, rem = [], flat
        for k in range(arity):
            digits.append(rem // small ** (arity - 1 - k))
            rem %= small ** (arity - 1 - k)
        big_flat = 0
        for dgt in digits:
            big_flat = big_flat * big + dgt
        idx.append(big_flat)
    for i, bi in enumerate(idx):
        for j, bj in enumerate(idx):
            u[bi, bj] = u_small[i, j]
    return u


# -- protocol unitaries ------------------------------------------------------

def build_compressor_rs(p: CloneParams13, r: int, s: int) -> np.ndarray:
    """U on (A, B, C) taking each (r, s)-outcome sector onto |j00>."""
    d = p.d
    a, b, g = p.alpha, p.beta, p.gamma
    pairs = []
    for j in range(d):
        vec = np.zeros((d, d, d), dtype=complex)
        if j == r:
            vec[r, r, s] += a + b
            vec[s, r, r] += b + g
            vec[r, s, r] += g + a
        elif j == s:
            vec[s, s, r] += a + b
            vec[r, s, s] += b + g
            vec[s, r, s] += g + a
        else:
            vec[j, r, s] += a
            vec[r, j, s] += b
            vec[r, s, j] += g
            vec[j, s, r] += a
            vec[s, j, r] += b
            vec[s, r, j] += g
        pairs.append((vec.reshape(-1), j * d * d))
    return unitary_from_images(pairs, d ** 3)


def build_compressor_rr(p: CloneParams13, r: int) -> np.ndarray:
    """U on (A, B, C) taking each (r, r)-outcome sector onto |j00>."""
    d = p.d
    pairs = []
    for j in range(d):
        vec = np.zeros((d, d, d), dtype=complex)
        if j == r:
            vec[r, r, r] = 1.0
        else:
            vec[j, r, r] += p.alpha
            vec[r, j, r] += p.beta
            vec[r, r, j] += p.gamma
        pairs.append((vec.reshape(-1), j * d * d))
    return unitary_from_images(pairs, d ** 3)


def build_u5_rs(d: int, dw: int, r: int, s: int) -> np.ndarray:
    """Controlled on the GHZ register = j (j != r, s): relabel the clone
    register by 0 -> j, 1 -> r, 2 -> s."""
    blocks = {}
    for j in range(d):
        if j in (r, s):
            continue
        blocks[j] = permutation_matrix({0: j, 1: r, 2: s}, dw)
    return _controlled(d, blocks, dw)


def build_u5_rr(d: int, dw: int, r: int) -> np.ndarray:
    blocks = {}
    for j in range(d):
        if j == r:
            continue
        blocks[j] = permutation_matrix({0: j, 1: r}, dw)
    return _controlled(d, blocks, dw)


def build_u6(d: int, dw: int, controls: tuple[int, ...]) -> np.ndarray:
    """Controlled on the GHZ register in `controls`: swap the clone and
    helper registers (both dim dw)."""
    swap = np.zeros((dw * dw, dw * dw), dtype=complex)
    for i in range(dw):
        for j in range(dw):
            swap[j * dw + i, i * dw + j] = 1.0
    return _controlled(d, {c: swap for c in controls}, dw * dw)


def build_u7_rs(d: int, dw: int, r: int, s: int) -> np.ndarray:
    blocks = {r: permutation_matrix({0: r, 1: s}, dw),
              s: permutation_matrix({0: s, 1: r}, dw)}
    return _controlled(d, blocks, dw)


def build_u7_rr(d: int, dw: int, r: int) -> np.ndarray:
    return _controlled(d, {r: pauli_X(dw, r)}, dw)


def build_u8_rs(p: CloneParams13, dw: int) -> np.ndarray:
    """Merges the two helper-register resource states onto |000> / |100>."""
    a1p, b1p, g1p = p.primed()
    a1pp, b1pp, g1pp = p.double_primed()
    v0 = np.zeros((3, 3, 3), dtype=complex)
    v0[0, 0, 1], v0[1, 0, 0], v0[0, 1, 0] = a1pp, b1pp, g1pp
    v1 = np.zeros((3, 3, 3), dtype=complex)
    v1[0, 1, 2] = v1[0, 2, 1] = a1p
    v1[1, 0, 2] = v1[2, 0, 1] = b1p
    v1[1, 2, 0] = v1[2, 1, 0] = g1p
    u = unitary_from_images([(v0.reshape(-1), 0), (v1.reshape(-1), 9)], 27)
    return embed_block(u, 3, dw, 3)


def build_u8_rr(p: CloneParams13, dw: int) -> np.ndarray:
    a2p, b2p, g2p = p.primed2()
    v0 = np.zeros(8, dtype=complex)
    v0[0] = 1.0
    v1 = np.zeros((2, 2, 2), dtype=complex)
    v1[0, 1, 1], v1[1, 0, 1], v1[1, 1, 0] = a2p, b2p, g2p
    u = unitary_from_images([(v0, 0), (v1.reshape(-1), 4)], 8)
    return embed_block(u, 2, dw, 3)


def build_sign_fix_13(d: int, levels: tuple[int, ...], k: int) -> np.ndarray:
    """(-1)^k on the listed levels of the GHZ register."""
    u = np.eye(d, dtype=complex)
    for lvl in set(levels):
        u[lvl, lvl] = (-1.0) ** k
    return u


# -- the protocol ------------------------------------------------------------

@dataclass
class Protocol3Branch:
    r: int
    s: int
    k: int
    phases: tuple[int, int, int]
    state: PureState  # on (M1, M2, M3), dim d each, unnormalized
    probability: float
    ebits_used: float


@dataclass
class Protocol3Result:
    params: CloneParams13
    rho: DensityMatrix  # aggregated channel output on (M1, M2, M3)
    branches: list[Protocol3Branch]


def _share_resource(state: PureState, vec: np.ndarray, labels: list[str],
                    dims: list[int], m: int, transcript, rng) -> PureState:
    """Prepare a three-party resource at target 1 and teleport the second
    and third shares out, consuming log2(m) ebits per share."""
    res = PureState.from_vector(
        [(l + "_src" if i else l, dim) for i, (l, dim) in enumerate(zip(labels, dims))],
        vec)
    state = state.tensor(res)
    for i, l in enumerate(labels[1:], start=2):
        state = teleport(state, l + "_src", l, transcript, rng, "t1", f"t{i}", m=m)
    return state


def run_protocol3(code: LinearMulticastCode, params: CloneParams13, psi,
                  rng=None, ghz_tol: float = 1e-9) -> Protocol3Result:
    """Run every measurement branch of the 1->3 clone multicast.

    The branch states live on registers M1, M2, M3 (one per target); their
    outer products sum to the 1->3 cloner channel output.
    """
    d = params.d
    if code.field.q ** code.r != d:
        raise DimMismatch(f"code carries q^r = {code.field.q**code.r}, clones need {d}")
    if len(code.net.targets) != 3:
        raise DimMismatch("1->3 multicast needs exactly three targets")
    rng = np.random.default_rng(0) if rng is None else rng
    psi = np.asarray(psi, dtype=complex)
    dw = max(d, 3)

    src = apply_isometry_13(psi, params)
    branches: list[Protocol3Branch] = []
    rho_acc = np.zeros((d ** 3, d ** 3), dtype=complex)

    for anc_r in measure_in_basis(src, "R", "computational"):
        if anc_r.probability < _PRUNE:
            continue
        for anc_s in measure_in_basis(anc_r.state, "S", "computational"):
            if anc_s.probability < _PRUNE:
                continue
            r, s = anc_r.outcome, anc_s.outcome
            _run_branch(code, params, anc_s.state, r, s, dw, rng, ghz_tol,
                        branches, rho_acc)

    rho = DensityMatrix([Register(f"M{i}", d) for i in (1, 2, 3)], rho_acc)
    return Protocol3Result(params, rho, branches)


def _run_branch(code, params, st, r, s, dw, rng, ghz_tol, branches, rho_acc):
    d = params.d
    equal = (r == s)

    # step 3: compress the three clones into register A
    comp = build_compressor_rr(params, r) if equal else build_compressor_rs(params, r, s)
    st = st.apply(comp, ["A", "B", "C"], check=False)
    st = st.remove_register("B", expect_index=0)
    st = st.remove_register("C", expect_index=0)
    kappa = st.amps

    # step 4: network distribution plus pre-shared resources
    ghz, net_transcript = verified_ghz(code, kappa, ["D", "E", "F"], tol=ghz_tol)
    transcript = RunTranscript(ebit_budget=EBIT_BUDGET_13)
    transcript.edge_uses = dict(net_transcript.edge_uses)

    m_labels, n_labels = ["M1", "M2", "M3"], ["N1", "N2", "N3"]
    if equal:
        a2p, b2p, g2p = params.primed2()
        mvec = np.zeros((dw, dw, dw), dtype=complex)
        mvec[0, 1, 1], mvec[1, 0, 1], mvec[1, 1, 0] = a2p, b2p, g2p
        st = _share_resource(ghz, mvec.reshape(-1), m_labels, [dw] * 3, 2,
                             transcript, rng)
        st = st.tensor(PureState.basis([(l, dw) for l in n_labels], [0, 0, 0]))
    else:
        a1p, b1p, g1p = params.primed()
        mvec = np.zeros((dw, dw, dw), dtype=complex)
        mvec[0, 1, 2] = mvec[0, 2, 1] = a1p
        mvec[1, 0, 2] = mvec[2, 0, 1] = b1p
        mvec[1, 2, 0] = mvec[2, 1, 0] = g1p
        st = _share_resource(ghz, mvec.reshape(-1), m_labels, [dw] * 3, 3,
                             transcript, rng)
        a1pp, b1pp, g1pp = params.double_primed()
        nvec = np.zeros((dw, dw, dw), dtype=complex)
        nvec[0, 0, 1], nvec[1, 0, 0], nvec[0, 1, 0] = a1pp, b1pp, g1pp
        st = _share_resource(st, nvec.reshape(-1), n_labels, [dw] * 3, 2,
                             transcript, rng)

    # steps 5-7: controlled relabelings at each target
    u5 = build_u5_rr(d, dw, r) if equal else build_u5_rs(d, dw, r, s)
    u6 = build_u6(d, dw, (r,) if equal else (r, s))
    u7 = build_u7_rr(d, dw, r) if equal else build_u7_rs(d, dw, r, s)
    for ghz_reg, m_reg, n_reg in zip(["D", "E", "F"], m_labels, n_labels):
        st = st.apply(u5, [ghz_reg, m_reg], check=False)
    for ghz_reg, m_reg, n_reg in zip(["D", "E", "F"], m_labels, n_labels):
        st = st.apply(u6, [ghz_reg, m_reg, n_reg], check=False)
    for ghz_reg, m_reg, n_reg in zip(["D", "E", "F"], m_labels, n_labels):
        st = st.apply(u7, [ghz_reg, m_reg], check=False)

    # step 8: gather the helper registers at target 1 and merge them
    m_tp = 2 if equal else 3
    st = teleport(st, "N2", "N2@t1", transcript, rng, "t2", "t1", m=m_tp)
    st = teleport(st, "N3", "N3@t1", transcript, rng, "t3", "t1", m=m_tp)
    u8 = build_u8_rr(params, dw) if equal else build_u8_rs(params, dw)
    st = st.apply(u8, ["N1", "N2@t1", "N3@t1"], check=False)
    st = st.remove_register("N2@t1", expect_index=0)
    st = st.remove_register("N3@t1", expect_index=0)

    # step 9: three-outcome measurement; the remainder outcome cannot occur
    sign_levels = (r,) if equal else (r, s)
    for br_k in measure_in_basis(st, "N1", "pk_family"):
        if br_k.outcome == 2:
            if br_k.probability > 1e-12:
                raise AssertionError(
                    f"remainder projector fired with probability {br_k.probability}")
            continue
        if br_k.probability < _PRUNE:
            continue
        k = br_k.outcome
        s2 = br_k.state.apply(build_sign_fix_13(d, sign_levels, k), ["D"], check=False)

        # step 10: Fourier measurements and the collective phase fix
        for br1 in measure_in_basis(s2, "D", "zd_fourier"):
            if br1.probability < _PRUNE:
                continue
            for br2 in measure_in_basis(br1.state, "E", "zd_fourier"):
                if br2.probability < _PRUNE:
                    continue
                for br3 in measure_in_basis(br2.state, "F", "zd_fourier"):
                    if br3.probability < _PRUNE:
                        continue
                    p1, p2, p3 = br1.outcome, br2.outcome, br3.outcome
                    out = br3.state
                    for m_reg in m_labels:
                        out = out.truncate_register(m_reg, d)
                        out = out.apply(pauli_Z(d, p1 + p2 + p3), [m_reg],
                                        check=False)
                    vec = out.vector_in_order(m_labels)
                    rho_acc += np.outer(vec, vec.conj())
                    branches.append(Protocol3Branch(
                        r, s, k, (p1, p2, p3), out, out.norm2,
                        transcript.ebit_ledger.total))


def verify_13(code: LinearMulticastCode, params: CloneParams13, psi,
              rng=None, tol: float = 1e-9) -> dict:
    """Run the protocol and compare against the 1->3 cloner-channel oracle."""
    psi = np.asarray(psi, dtype=complex)
    res = run_protocol3(code, params, psi, rng=rng)
    oracle = channel_13_oracle(psi, params)
    td = trace_distance(res.rho, oracle)
    min_f = min(br.state.fidelity_upto_phase(
        psi2_rs(psi, params, br.r, br.s).rename_register("A", "M1")
        .rename_register("B", "M2").rename_register("C", "M3"))
        for br in res.branches)
    d = params.d
    fids = []
    for i, reg in enumerate(["M1", "M2", "M3"]):
        fids.append(fidelity(partial_trace(res.rho, [reg]),
                             PureState.from_vector([(reg, d)], psi)))
    fa, fb, fc = analytic_fidelities_13(params)
    unequal = [br.ebits_used for br in res.branches if br.r != br.s]
    equal = [br.ebits_used for br in res.branches if br.r == br.s]
    return {
        "trace_distance": td,
        "min_branch_fidelity": min_f,
        "fidelities": tuple(fids),
        "analytic_fidelities": (fa, fb, fc),
        "max_ebits": max(br.ebits_used for br in res.branches),
        "ebits_unequal": max(unequal) if unequal else None,
        "ebits_equal": max(equal) if equal else None,
        "passed": bool(td < tol and min_f >= 1 - tol),
    }
