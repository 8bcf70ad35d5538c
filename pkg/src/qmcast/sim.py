"""Dense pure-state simulator over labelled qudit registers.

States may be unnormalized: the squared norm of a post-measurement branch
is that branch's probability, and branch states stay unnormalized until a
fidelity is computed.  Register dimensions are heterogeneous; registers
are removed eagerly after rank-1 measurement outcomes to bound memory.

Measurement bases:
  computational   index basis
  gf_fourier      GF(q)-indexed Fourier basis, omega = exp(-2 pi i / p)
  zd_fourier      Z_d Fourier basis, omega = exp(2 pi i / d)
  pk_family       {P0, P1, P2} with P0/P1 the +/- states of the {0,1} block

State equality throughout the protocol checks is phase-free:
|<a|b>| = ||a|| ||b|| within tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (DimMismatch, NonIsometry, UnknownRegister)
from .gf import FieldElement, FieldSpec

ATOL_ISO = 1e-10
ATOL_MEAS = 1e-10


@dataclass(frozen=True)
class Register:
    label: str
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise DimMismatch(f"register {self.label!r} needs dim >= 2, got {self.dim}")


class PureState:
    """Complex amplitude vector over an ordered registry of registers."""

    def __init__(self, registry: Sequence[Register], amps: np.ndarray):
        self.registry = list(registry)
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        expected = math.prod(r.dim for r in self.registry)
        if amps.size != expected:
            raise DimMismatch(f"{amps.size} amplitudes for dims {self.dims}")
        labels = [r.label for r in self.registry]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate register labels: {labels}")
        self.amps = amps

    # -- constructors --------------------------------------------------------

    @classmethod
    def basis(cls, regs: Sequence[tuple[str, int]], indices: Sequence[int]) -> "PureState":
        registry = [Register(l, d) for l, d in regs]
        amps = np.zeros(math.prod(d for _, d in regs), dtype=complex)
        amps[int(np.ravel_multi_index(tuple(indices), tuple(d for _, d in regs)))] = 1.0
        return cls(registry, amps)

    @classmethod
    def from_vector(cls, regs: Sequence[tuple[str, int]], vec) -> "PureState":
        return cls([Register(l, d) for l, d in regs], np.asarray(vec, dtype=complex))

    # -- registry helpers ----------------------------------------------------

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registry)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.registry]

    def axis(self, label: str) -> int:
        for i, r in enumerate(self.registry):
            if r.label == label:
                return i
        raise UnknownRegister(f"no register {label!r} in {self.labels}")

    def dim_of(self, label: str) -> int:
        return self.registry[self.axis(label)].dim

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(self.registry + other.registry,
                         np.kron(self.amps, other.amps))

    def scaled(self, factor: complex) -> "PureState":
        return PureState(self.registry, self.amps * factor)

    def _tensorized(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def vector_in_order(self, labels: Sequence[str]) -> np.ndarray:
        """Amplitude vector with registers permuted to the given order."""
        if sorted(labels) != sorted(self.labels):
            raise UnknownRegister(f"order {labels} does not match {self.labels}")
        perm = [self.axis(l) for l in labels]
        return np.transpose(self._tensorized(), perm).reshape(-1)

    # -- operators -----------------------------------------------------------

    def apply(self, op: np.ndarray, regs: Sequence[str],
              out_regs: Sequence[tuple[str, int]] | None = None,
              check: bool = True) -> "PureState":
        """Apply a unitary or isometry on the listed registers.

        For an isometry, `out_regs` names the (label, dim) pairs that
        replace `regs` in the registry; columns must be orthonormal.
        """
        op = np.asarray(op, dtype=complex)
        in_dims = [self.dim_of(l) for l in regs]
        d_in = math.prod(in_dims)
        if out_regs is None:
            out_regs = [(l, self.dim_of(l)) for l in regs]
        d_out = math.prod(d for _, d in out_regs)
        if op.shape != (d_out, d_in):
            raise DimMismatch(f"operator shape {op.shape}, expected {(d_out, d_in)}")
        if check:
            gram = op.conj().T @ op
            if not np.allclose(gram, np.eye(d_in), atol=ATOL_ISO):
                raise NonIsometry("operator columns are not orthonormal")

        axes = [self.axis(l) for l in regs]
        rest = [i for i in range(len(self.registry)) if i not in axes]
        tens = np.transpose(self._tensorized(), axes + rest)
        mat = tens.reshape(d_in, -1)
        out = op @ mat
        new_front = [Register(l, d) for l, d in out_regs]
        new_rest = [self.registry[i] for i in rest]
        out = out.reshape([d for _, d in out_regs] + [r.dim for r in new_rest])
        return PureState(new_front + new_rest, out.reshape(-1))

    def remove_register(self, label: str, expect_index: int | None = None,
                        atol: float = 1e-9) -> "PureState":
        """Drop a register that is in a product basis state.

        When `expect_index` is given the register must hold that basis
        state (up to `atol` leakage); otherwise the single occupied index
        is detected.  Raises DimMismatch if the register is entangled.
        """
        ax = self.axis(label)
        tens = np.moveaxis(self._tensorized(), ax, 0)
        weights = np.sum(np.abs(tens.reshape(tens.shape[0], -1)) ** 2, axis=1)
        idx = int(np.argmax(weights)) if expect_index is None else expect_index
        leak = float(weights.sum() - weights[idx])
        if leak > atol * max(weights.sum(), 1.0):
            raise DimMismatch(
                f"register {label!r} is not in basis state {idx} (leak {leak:.2e})")
        new_reg = [r for i, r in enumerate(self.registry) if i != ax]
        return PureState(new_reg, tens[idx].reshape(-1))

    def truncate_register(self, label: str, new_dim: int, atol: float = 1e-9) -> "PureState":
        """Shrink a register to its first new_dim levels (support asserted)."""
        ax = self.axis(label)
        tens = np.moveaxis(self._tensorized(), ax, 0)
        tail = float(np.sum(np.abs(tens[new_dim:]) ** 2))
        if tail > atol:
            raise DimMismatch(f"register {label!r} has weight {tail:.2e} above level {new_dim}")
        kept = np.moveaxis(tens[:new_dim], 0, ax)
        reg = list(self.registry)
        reg[ax] = Register(label, new_dim)
        return PureState(reg, kept.reshape(-1))

    def embed_register(self, label: str, new_dim: int) -> "PureState":
        """Grow a register by appending zero-amplitude levels."""
        ax = self.axis(label)
        old = self.dim_of(label)
        if new_dim < old:
            raise DimMismatch("embed cannot shrink; use truncate_register")
        tens = np.moveaxis(self._tensorized(), ax, 0)
        grown = np.zeros((new_dim,) + tens.shape[1:], dtype=complex)
        grown[:old] = tens
        reg = list(self.registry)
        reg[ax] = Register(label, new_dim)
        return PureState(reg, np.moveaxis(grown, 0, ax).reshape(-1))

    def rename_register(self, old: str, new: str) -> "PureState":
        reg = [Register(new, r.dim) if r.label == old else r for r in self.registry]
        return PureState(reg, self.amps)

    # -- comparisons ---------------------------------------------------------

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.vector_in_order(other.labels), other.amps))

    def fidelity_upto_phase(self, other: "PureState") -> float:
        """|<self|other>|^2 / (||self||^2 ||other||^2): 1 iff equal up to
        global phase and normalization."""
        n = self.norm2 * other.norm2
        if n < 1e-300:
            return 0.0
        return abs(self.overlap(other)) ** 2 / n


@dataclass
class MeasurementBranch:
    outcome: object
    state: PureState
    probability: float


class DensityMatrix:
    """Hermitian PSD matrix over a register list; trace <= 1."""

    def __init__(self, registry: Sequence[Register], matrix: np.ndarray,
                 check: bool = True):
        self.registry = list(registry)
        matrix = np.asarray(matrix, dtype=complex)
        d = math.prod(r.dim for r in self.registry)
        if matrix.shape != (d, d):
            raise DimMismatch(f"matrix shape {matrix.shape}, expected {(d, d)}")
        self.matrix = matrix
        if check:
            if not np.allclose(matrix, matrix.conj().T, atol=1e-12):
                raise ValueError("density matrix is not Hermitian")
            tr = float(matrix.trace().real)
            if tr > 1 + 1e-12:
                raise ValueError(f"trace {tr} exceeds 1")
            lo = float(np.linalg.eigvalsh(matrix)[0])
            if lo < -1e-10:
                raise ValueError(f"smallest eigenvalue {lo} below -1e-10")

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.registry]

    def trace(self) -> float:
        return float(self.matrix.trace().real)


def trace_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b)
    eig = np.linalg.eigvalsh(ma - mb)
    return 0.5 * float(np.sum(np.abs(eig)))


def partial_trace(state: PureState | DensityMatrix, keep: Sequence[str]) -> DensityMatrix:
    """Reduced density matrix on `keep`, in the listed order."""
    if isinstance(state, PureState):
        labels, dims = state.labels, state.dims
        tens = state._tensorized()
        for l in keep:
            if l not in labels:
                raise UnknownRegister(f"no register {l!r}")
        keep_ax = [labels.index(l) for l in keep]
        rest_ax = [i for i in range(len(labels)) if i not in keep_ax]
        perm = np.transpose(tens, keep_ax + rest_ax)
        d_keep = math.prod(dims[i] for i in keep_ax)
        mat = perm.reshape(d_keep, -1)
        rho = mat @ mat.conj().T
        registry = [state.registry[i] for i in keep_ax]
        return DensityMatrix(registry, rho)
    # density-matrix input
    labels = state.labels
    dims = [r.dim for r in state.registry]
    for l in keep:
        if l not in labels:
            raise UnknownRegister(f"no register {l!r}")
    keep_ax = [labels.index(l) for l in keep]
    rest_ax = [i for i in range(len(labels)) if i not in keep_ax]
    n = len(dims)
    tens = state.matrix.reshape(dims + dims)
    perm = keep_ax + rest_ax + [n + i for i in keep_ax] + [n + i for i in rest_ax]
    tens = np.transpose(tens, perm)
    d_keep = math.prod(dims[i] for i in keep_ax)
    d_rest = math.prod([dims[i] for i in rest_ax], start=1)
    tens = tens.reshape(d_keep, d_rest, d_keep, d_rest)
    rho = np.einsum("arbr->ab", tens)
    registry = [state.registry[i] for i in keep_ax]
    return DensityMatrix(registry, rho)


def fidelity(rho: DensityMatrix, psi: PureState) -> float:
    """<psi|rho|psi> for a normalized pure reference state."""
    vec = psi.vector_in_order(rho.labels)
    if abs(float(np.vdot(vec, vec).real) - 1.0) > 1e-9:
        raise ValueError("reference state must be normalized")
    val = np.vdot(vec, rho.matrix @ vec)
    if abs(val.imag) > 1e-12:
        raise ValueError(f"fidelity has imaginary part {val.imag}")
    return float(val.real)


# -- operator builders -------------------------------------------------------

def pauli_X(d: int, power: int = 1) -> np.ndarray:
    """Cyclic shift |k> -> |k + power mod d>."""
    m = np.zeros((d, d), dtype=complex)
    for k in range(d):
        m[(k + power) % d, k] = 1.0
    return m


def pauli_Z(d: int, power: int = 1) -> np.ndarray:
    """diag(omega^(k*power)) with omega = exp(2 pi i / d)."""
    omega = np.exp(2j * np.pi / d)
    return np.diag(omega ** (power * np.arange(d)))


def gf_Z(t: FieldElement) -> np.ndarray:
    """Generalized Pauli Z(t) = sum_x omega^Tr(x t) |x><x|, omega = exp(-2 pi i / p)."""
    spec = t.spec
    omega = np.exp(-2j * np.pi / spec.p)
    phases = [omega ** (spec.from_int(x) * t).trace_to_prime() for x in range(spec.q)]
    return np.diag(np.asarray(phases, dtype=complex))


def gf_fourier_matrix(field: FieldSpec, r: int = 1) -> np.ndarray:
    """Columns are the normalized GF(q^r) Fourier vectors |z~>.

    B[x, z] = q^(-r/2) omega^(Tr <x, z>), omega = exp(-2 pi i / p); the
    index <-> F_q^r bijection is big-endian in the coeffs-lex element
    index (first message component most significant).
    """
    q, p = field.q, field.p
    omega = np.exp(-2j * np.pi / p)
    # single-symbol trace table
    tr = np.array([[(field.from_int(x) * field.from_int(z)).trace_to_prime()
                    for z in range(q)] for x in range(q)])
    total = np.zeros((q**r, q**r))
    for k in range(r):
        shift = q ** (r - 1 - k)
        xs = (np.arange(q**r)[:, None] // shift) % q
        zs = (np.arange(q**r)[None, :] // shift) % q
        total = total + tr[xs, zs]
    return omega ** (total % p) / q ** (r / 2)


def zd_fourier_matrix(d: int) -> np.ndarray:
    """Columns |p~> = d^(-1/2) sum_x omega^(p x)|x>, omega = exp(2 pi i / d)."""
    omega = np.exp(2j * np.pi / d)
    x = np.arange(d)
    return omega ** np.outer(x, x) / math.sqrt(d)


def int_to_field_vector(field: FieldSpec, r: int, n: int) -> list[FieldElement]:
    """Big-endian decode of a [0, q^r) index into an F_q^r message."""
    digits = []
    for k in range(r):
        digits.append(field.from_int((n // field.q ** (r - 1 - k)) % field.q))
    return digits


def field_vector_to_int(vec: Sequence[FieldElement]) -> int:
    q = vec[0].spec.q
    n = 0
    for el in vec:
        n = n * q + el.index
    return n


# -- measurements ------------------------------------------------------------

def _measure_orthonormal(state: PureState, reg: str, basis: np.ndarray,
                         outcomes=None) -> list[MeasurementBranch]:
    """Complete rank-1 measurement; the register is removed per branch."""
    d = state.dim_of(reg)
    if basis.shape != (d, d):
        raise DimMismatch(f"basis shape {basis.shape} for dim-{d} register")
    ax = state.axis(reg)
    tens = np.moveaxis(state._tensorized(), ax, 0).reshape(d, -1)
    coeffs = basis.conj().T @ tens
    rest = [r for i, r in enumerate(state.registry) if i != ax]
    branches = []
    for z in range(d):
        branch_state = PureState(rest, coeffs[z].copy())
        out = outcomes[z] if outcomes is not None else z
        branches.append(MeasurementBranch(out, branch_state, branch_state.norm2))
    total = sum(b.probability for b in branches)
    if abs(total - state.norm2) > ATOL_MEAS:
        raise AssertionError("measurement branches do not sum to parent norm")
    return branches


def measure_in_basis(state: PureState, reg: str, basis: str,
                     field: FieldSpec | None = None, r: int = 1) -> list[MeasurementBranch]:
    """Complete measurement of one register.

    basis is one of "computational", "gf_fourier", "zd_fourier",
    "pk_family".  gf_fourier needs the FieldSpec (and r when the register
    holds an F_q^r block).  Outcomes are basis indices; for pk_family the
    P2 branch keeps the (projected) register.
    """
    d = state.dim_of(reg)
    if basis == "computational":
        return _measure_orthonormal(state, reg, np.eye(d))
    if basis == "zd_fourier":
        return _measure_orthonormal(state, reg, zd_fourier_matrix(d))
    if basis == "gf_fourier":
        if field is None:
            raise ValueError("gf_fourier needs a FieldSpec")
        if field.q**r != d:
            raise DimMismatch(f"register dim {d} != q^r = {field.q**r}")
        return _measure_orthonormal(state, reg, gf_fourier_matrix(field, r))
    if basis == "pk_family":
        return _measure_pk(state, reg)
    raise ValueError(f"unknown basis {basis!r}")


def _measure_pk(state: PureState, reg: str) -> list[MeasurementBranch]:
    d = state.dim_of(reg)
    plus = np.zeros(d, dtype=complex)
    minus = np.zeros(d, dtype=complex)
    plus[0] = plus[1] = 1 / math.sqrt(2)
    minus[0], minus[1] = 1 / math.sqrt(2), -1 / math.sqrt(2)
    ax = state.axis(reg)
    tens = np.moveaxis(state._tensorized(), ax, 0).reshape(d, -1)
    rest = [r for i, r in enumerate(state.registry) if i != ax]
    branches = []
    for k, vec in enumerate((plus, minus)):
        s = PureState(rest, vec.conj() @ tens)
        branches.append(MeasurementBranch(k, s, s.norm2))
    # P2 = I - P0 - P1 keeps the register (rank d-2)
    proj = np.eye(d) - np.outer(plus, plus.conj()) - np.outer(minus, minus.conj())
    kept = np.moveaxis((proj @ tens).reshape((d,) + tuple(
        r.dim for r in rest)), 0, ax)
    s2 = PureState(state.registry, kept.reshape(-1))
    branches.append(MeasurementBranch(2, s2, s2.norm2))
    total = sum(b.probability for b in branches)
    if abs(total - state.norm2) > ATOL_MEAS:
        raise AssertionError("P_k branches do not sum to parent norm")
    return branches


# -- teleportation -----------------------------------------------------------

def bell_basis(m: int) -> np.ndarray:
    """Columns |Phi_ab> = (X^a Z^b x I)|Phi+_m>, indexed by a*m + b."""
    basis = np.zeros((m * m, m * m), dtype=complex)
    omega = np.exp(2j * np.pi / m)
    for a in range(m):
        for b in range(m):
            col = np.zeros((m, m), dtype=complex)
            for k in range(m):
                col[(k + a) % m, k] = omega ** (b * k) / math.sqrt(m)
            basis[:, a * m + b] = col.reshape(-1)
    return basis


def teleport(state: PureState, src: str, dst: str, transcript, rng,
             src_party: str, dst_party: str, m: int | None = None) -> PureState:
    """Teleport `src` into a fresh register `dst` consuming log2(m) ebits.

    A maximally entangled dim-m pair is created, a generalized Bell
    measurement is performed on (src, half), the sampled classical outcome
    is recorded, and X/Z corrections are applied at the destination.  When
    m < dim(src) only the first m levels may be occupied (subspace
    teleport); the destination register keeps the source dimension.

    All m^2 outcomes occur with probability exactly 1/m^2 and yield the
    same corrected state, so one outcome is drawn and the state is
    rescaled by m; the channel is exact, not approximate.
    """
    full_dim = state.dim_of(src)
    m = full_dim if m is None else m
    work = state if m == full_dim else state.truncate_register(src, m)

    pre_norm2 = work.norm2
    half, far = f"_tp_h_{dst}", f"_tp_f_{dst}"
    pair = PureState.from_vector(
        [(half, m), (far, m)], np.eye(m).reshape(-1) / math.sqrt(m))
    joint = work.tensor(pair)

    a, b = int(rng.integers(m)), int(rng.integers(m))
    basis = bell_basis(m)
    # project (src, half) onto |Phi_ab| and rescale by 1/sqrt(P) = m
    proj = basis[:, a * m + b].conj()
    axes = [joint.axis(src), joint.axis(half)]
    rest = [i for i in range(len(joint.registry)) if i not in axes]
    tens = np.transpose(joint._tensorized(), axes + rest).reshape(m * m, -1)
    rest_regs = [joint.registry[i] for i in rest]
    collapsed = PureState(rest_regs, (proj @ tens) * m)

    corrected = collapsed.apply(pauli_X(m, a) @ pauli_Z(m, b), [far], check=True)
    corrected = corrected.rename_register(far, dst)
    if m != full_dim:
        corrected = corrected.embed_register(dst, full_dim)
    if abs(corrected.norm2 - pre_norm2) > 1e-9:
        raise AssertionError("teleport failed to preserve the state norm")

    transcript.record_outcome(f"bell:{src}->{dst}", (a, b))
    transcript.ebit_ledger.debit(src_party, dst_party, math.log2(m),
                                 f"teleport {src}->{dst} (m={m})")
    return corrected
