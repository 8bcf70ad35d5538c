"""Coherent GHZ distribution over a classical linear multicast code.

The source state sum_x alpha_x |x> (x in F_q^r) is spread through the
network by simulating the classical code coherently: each edge carries a
fresh q-dim register into which the edge's linear function of x is added,
each target adds its decoded message into a fresh output register, and
the source symbols plus every edge register are measured in the GF
Fourier basis.  Each outcome branch differs from the GHZ state
sum_x alpha_x |x>^(x N) only by the phase omega^(-Tr<x, c>) with

    c = z_s + sum_e z_e * (global vector of e),

where z_s is the source outcome (an r-vector over F_q) and z_e the edge
outcomes.  The branch is fixed by applying Z(c_1) x ... x Z(c_r) at a
single target: applying it at every target, each copy contributes the
full phase, so one application already cancels it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gf
from .code import LinearMulticastCode
from .errors import EdgeNotAtSource, MissingOutcome
from .gf import FieldElement
from .network import topological_edge_order
from .sim import PureState, Register, gf_Z, gf_fourier_matrix
from .transcript import RunTranscript


@dataclass
class Protocol1Branch:
    outcomes: dict[str, int]
    state: PureState
    probability: float


@dataclass
class Protocol1Result:
    code: LinearMulticastCode
    branches: list[Protocol1Branch]
    transcript: RunTranscript
    target_registers: dict[str, list[str]] = dc_field(default_factory=dict)


# -- permutation unitaries ---------------------------------------------------

def build_edge_adder(coeffs: list[FieldElement]) -> np.ndarray:
    """Permutation |y_1..y_n, z> -> |y_1..y_n, z + sum_k coeffs_k y_k> on
    n + 1 q-dim registers (inputs first, accumulator last)."""
    spec = coeffs[0].spec
    q = spec.q
    n = len(coeffs)
    dim = q ** (n + 1)
    u = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        digits = []
        rem = idx
        for k in range(n + 1):
            digits.append(rem // q ** (n - k))
            rem %= q ** (n - k)
        val = spec.zero()
        for c, y in zip(coeffs, digits[:n]):
            val = val + c * spec.from_int(y)
        new_z = (spec.from_int(digits[n]) + val).index
        u[(idx - digits[n]) + new_z, idx] = 1.0
    return u


def build_source_edge_unitary(code: LinearMulticastCode, e: int) -> np.ndarray:
    """Adder of f_e(message) into the edge register, acting on the r source
    symbol registers plus the edge register."""
    if not code.is_source_edge(e):
        raise EdgeNotAtSource(f"edge {e} does not leave the source")
    return build_edge_adder(code.local_maps[e])


def build_intermediate_edge_unitary(code: LinearMulticastCode, e: int) -> np.ndarray:
    """Adder of f_e over the incoming-edge registers into the edge register."""
    if code.is_source_edge(e):
        raise ValueError(f"edge {e} leaves the source; use the source form")
    return build_edge_adder(code.local_maps[e])


def build_target_decoder(code: LinearMulticastCode, i: int) -> np.ndarray:
    """Permutation |y, x> -> |y, x + g_i(y)> on the m_i incoming edge
    registers plus the r output symbol registers of target i."""
    q = code.field.q
    r = code.r
    m_i = len(code.net.in_edges(code.net.targets[i]))
    dim = q ** (m_i + r)
    u = np.zeros((dim, dim), dtype=complex)
    for idx in range(dim):
        y_idx, x_idx = divmod(idx, q ** r)
        y = _digits(code.field, y_idx, m_i)
        x = _digits(code.field, x_idx, r)
        gx = gf.mat_vec(code.decoders[i], y)
        out_x = 0
        for a, b in zip(x, gx):
            out_x = out_x * q + (a + b).index
        u[y_idx * q ** r + out_x, idx] = 1.0
    return u


def _digits(field, n: int, length: int) -> list[FieldElement]:
    return [field.from_int((n // field.q ** (length - 1 - k)) % field.q)
            for k in range(length)]


# -- phase bookkeeping -------------------------------------------------------

def compute_phase_correction(code: LinearMulticastCode,
                             outcomes: dict[str, int],
                             vectors: dict[str, list[FieldElement]]) -> list[FieldElement]:
    """c = sum z * v over all measured registers; `vectors` maps each
    measured register to the F_q^r coefficient vector of the linear
    function of the message it held."""
    field = code.field
    c = [field.zero()] * code.r
    for label, v in vectors.items():
        if label not in outcomes:
            raise MissingOutcome(f"no Fourier outcome recorded for {label!r}")
        z = field.from_int(outcomes[label])
        c = [ck + z * vk for ck, vk in zip(c, v)]
    return c


def measured_register_vectors(code: LinearMulticastCode) -> dict[str, list[FieldElement]]:
    """Coefficient vectors for the source symbol and edge registers."""
    field, r = code.field, code.r
    vectors = {}
    for k in range(r):
        vectors[f"S_{k}"] = [field.one() if j == k else field.zero()
                             for j in range(r)]
    for e in range(len(code.net.edges)):
        vectors[f"E_{e}"] = list(code.global_vectors[e])
    return vectors


# -- the protocol ------------------------------------------------------------

_OP_TABLE_CACHE: dict = {}


def _op_tables(field) -> tuple[np.ndarray, np.ndarray]:
    """q x q index tables for + and * (used to batch phase corrections)."""
    key = (field.p, field.t, field.modulus)
    if key not in _OP_TABLE_CACHE:
        q = field.q
        els = [field.from_int(n) for n in range(q)]
        add = np.array([[(a + b).index for b in els] for a in els])
        mul = np.array([[(a * b).index for b in els] for a in els])
        _OP_TABLE_CACHE[key] = (add, mul)
    return _OP_TABLE_CACHE[key]


def _enumerate_branches(code: LinearMulticastCode, psi):
    """Run the coherent encoding and all Fourier measurements at once.

    Returns (measured labels, outcome digit array, corrected branch
    matrix with one row per outcome combination, target register labels,
    transcript).
    """
    net, field, r = code.net, code.field, code.r
    q = field.q
    psi = np.asarray(psi, dtype=complex)
    if psi.size != q ** r:
        raise ValueError(f"need q^r = {q**r} amplitudes, got {psi.size}")

    transcript = RunTranscript()
    src_regs = [f"S_{k}" for k in range(r)]
    state = PureState.from_vector([(l, q) for l in src_regs], psi)

    # step 2: add each edge's alphabet coherently, in topological order
    for e in topological_edge_order(net):
        state = state.tensor(PureState.basis([(f"E_{e}", q)], [0]))
        if code.is_source_edge(e):
            ins = list(src_regs)
            u = build_source_edge_unitary(code, e)
        else:
            ins = [f"E_{j}" for j in code.in_edges_of_edge(e)]
            u = build_intermediate_edge_unitary(code, e)
        state = state.apply(u, ins + [f"E_{e}"], check=False)
        transcript.use_edge(e)

    # targets decode into fresh output registers
    target_registers = {}
    for i, t in enumerate(net.targets):
        out_labels = [f"T{i}_{k}" for k in range(r)]
        target_registers[t] = out_labels
        state = state.tensor(PureState.basis([(l, q) for l in out_labels],
                                             [0] * r))
        ins = [f"E_{e}" for e in net.in_edges(t)]
        state = state.apply(build_target_decoder(code, i), ins + out_labels,
                            check=False)

    # step 3: GF Fourier measurement of the source and all edge registers,
    # every outcome at once (contract the conjugate basis on each axis)
    vectors = measured_register_vectors(code)
    measured = list(vectors.keys())
    fourier = gf_fourier_matrix(field, 1)
    tens = state.amps.reshape(state.dims)
    for label in measured:
        ax = state.axis(label)
        tens = np.moveaxis(
            np.tensordot(fourier.conj().T, tens, axes=(1, ax)), 0, ax)
    m_axes = [state.axis(l) for l in measured]
    t_labels = [l for t in net.targets for l in target_registers[t]]
    t_axes = [state.axis(l) for l in t_labels]
    flat = np.transpose(tens, m_axes + t_axes).reshape(q ** len(measured), -1)

    # step 4: the phase fix c = sum z v per branch, batched over branches
    n_b = flat.shape[0]
    outcomes = np.stack(np.unravel_index(np.arange(n_b),
                                         (q,) * len(measured)), axis=1)
    add, mul = _op_tables(field)
    c = np.zeros((n_b, r), dtype=int)
    for j, label in enumerate(measured):
        for k in range(r):
            vk = vectors[label][k].index
            c[:, k] = add[c[:, k], mul[outcomes[:, j], vk]]
    zdiag = np.array([np.diag(gf_Z(field.from_int(n))) for n in range(q)])
    phase = zdiag[c[:, 0]]
    for k in range(1, r):
        phase = (phase[:, :, None] * zdiag[c[:, k]][:, None, :]).reshape(n_b, -1)
    flat = (flat.reshape(n_b, q ** r, -1) * phase[:, :, None]).reshape(n_b, -1)
    return measured, outcomes, flat, t_labels, target_registers, transcript


def run_protocol1(code: LinearMulticastCode, psi) -> Protocol1Result:
    """Distribute sum_x psi_x |x>^(x N), enumerating every Fourier-outcome
    branch (q^(r + |E|) of them, all with equal probability).

    `psi` has q^r amplitudes (big-endian symbol index).  Each returned
    branch holds the corrected state on the N*r output symbol registers
    T{i}_{k} of the targets.
    """
    measured, outcomes, flat, t_labels, target_registers, transcript = \
        _enumerate_branches(code, psi)
    t_regs = [Register(l, code.field.q) for l in t_labels]
    branches = []
    for b in range(flat.shape[0]):
        st = PureState(t_regs, flat[b])
        branches.append(Protocol1Branch(
            dict(zip(measured, (int(z) for z in outcomes[b]))), st, st.norm2))
    transcript.branch_log = [br.outcomes for br in branches]
    return Protocol1Result(code, branches, transcript, target_registers)


def ghz_reference(code: LinearMulticastCode, psi) -> PureState:
    """sum_x psi_x |x>^(x N) on the protocol's output symbol registers."""
    net, r, q = code.net, code.r, code.field.q
    psi = np.asarray(psi, dtype=complex)
    n = len(net.targets)
    vec = np.zeros((q ** r,) * n, dtype=complex)
    for x in range(q ** r):
        vec[(x,) * n] = psi[x]
    regs = []
    for i in range(n):
        regs.extend((f"T{i}_{k}", q) for k in range(r))
    return PureState.from_vector(regs, vec.reshape(-1))


def verified_ghz(code: LinearMulticastCode, psi, labels: list[str],
                 tol: float = 1e-9) -> tuple[PureState, RunTranscript]:
    """Run the distribution protocol, check every branch reproduces the GHZ
    state to fidelity >= 1 - tol, and return the (exact) shared state with
    one dim-q^r register per target under the given labels."""
    net = code.net
    if len(labels) != len(net.targets):
        raise ValueError("need one register label per target")
    _, _, flat, t_labels, _, transcript = _enumerate_branches(code, psi)
    ref = ghz_reference(code, psi).vector_in_order(t_labels)
    overlaps = np.abs(flat @ ref.conj()) ** 2
    norms2 = np.einsum("ij,ij->i", flat, flat.conj()).real
    ref_n2 = float(np.vdot(ref, ref).real)
    live = norms2 > 1e-14 * max(float(norms2.max()), 1e-300)
    fids = overlaps[live] / (norms2[live] * ref_n2)
    if fids.size and float(fids.min()) < 1 - tol:
        raise AssertionError(
            f"a branch has GHZ fidelity {float(fids.min())} < 1 - {tol}")
    d = code.field.q ** code.r
    psi = np.asarray(psi, dtype=complex)
    n = len(labels)
    vec = np.zeros((d,) * n, dtype=complex)
    for x in range(d):
        vec[(x,) * n] = psi[x]
    state = PureState.from_vector([(l, d) for l in labels], vec.reshape(-1))
    return state, transcript
