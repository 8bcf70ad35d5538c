"""Optimal asymmetric universal cloning machines as explicit isometries.

The 1->2 cloner maps A -> (A, B, M) with real weights (a, b) on the
constraint surface a^2 + b^2 + 2ab/d = 1; the 1->3 cloner maps
A -> (A, B, C, R, S) with nonnegative weights (alpha, beta, gamma) on
alpha^2 + beta^2 + gamma^2 + (2/d)(alpha beta + beta gamma + alpha gamma) = 1.

channel_12_oracle / channel_13_oracle trace out the ancillas and are the
protocol-independent ground truth the multicast runs are verified against.
The ancilla-outcome decompositions (psi2_r / psi2_rs) are the per-branch
reference states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolated, IndexOutOfRange
from .sim import DensityMatrix, PureState, Register, partial_trace

_CONSTRAINT_ATOL = 1e-12


@dataclass(frozen=True)
class CloneParams12:
    a: float
    b: float
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ConstraintViolated(f"d={self.d} must be >= 2")
        res = self.a**2 + self.b**2 + 2 * self.a * self.b / self.d - 1.0
        if abs(res) > _CONSTRAINT_ATOL:
            raise ConstraintViolated(
                f"a^2 + b^2 + 2ab/d = {1 + res}, off the surface by {res:.3e}")

    @classmethod
    def from_ratio(cls, ra: float, rb: float, d: int) -> "CloneParams12":
        """Scale a direction (ra, rb) onto the constraint surface."""
        norm = ra**2 + rb**2 + 2 * ra * rb / d
        if norm <= 0:
            raise ConstraintViolated(f"ratio ({ra}, {rb}) cannot be normalized")
        s = 1 / math.sqrt(norm)
        return cls(ra * s, rb * s, d)

    @property
    def eta(self) -> float:
        """cos(eta) = a / sqrt(1 - 2ab/d), sin(eta) = b / sqrt(1 - 2ab/d)."""
        return math.atan2(self.b, self.a)


@dataclass(frozen=True)
class CloneParams13:
    alpha: float
    beta: float
    gamma: float
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ConstraintViolated(f"d={self.d} must be >= 2")
        if min(self.alpha, self.beta, self.gamma) < 0:
            raise ConstraintViolated("alpha, beta, gamma must be nonnegative")
        res = (self.alpha**2 + self.beta**2 + self.gamma**2
               + (2 / self.d) * (self.alpha * self.beta + self.beta * self.gamma
                                 + self.alpha * self.gamma) - 1.0)
        if abs(res) > _CONSTRAINT_ATOL:
            raise ConstraintViolated(f"1->3 constraint off by {res:.3e}")

    @classmethod
    def from_ratio(cls, ra: float, rb: float, rc: float, d: int) -> "CloneParams13":
        norm = ra**2 + rb**2 + rc**2 + (2 / d) * (ra * rb + rb * rc + ra * rc)
        if norm <= 0:
            raise ConstraintViolated(f"ratio ({ra}, {rb}, {rc}) cannot be normalized")
        s = 1 / math.sqrt(norm)
        return cls(ra * s, rb * s, rc * s, d)

    # -- derived weights used by the 1->3 reconstruction ---------------------

    def primed(self) -> tuple[float, float, float]:
        """(alpha', beta', gamma'): the j-sector direction, normalized."""
        n = math.sqrt(2 * (self.alpha**2 + self.beta**2 + self.gamma**2))
        return self.alpha / n, self.beta / n, self.gamma / n

    def double_primed(self) -> tuple[float, float, float]:
        """(alpha'', beta'', gamma''): the pairwise-sum direction, normalized."""
        u = self.alpha + self.beta
        v = self.beta + self.gamma
        w = self.gamma + self.alpha
        n = math.sqrt(u * u + v * v + w * w)
        return u / n, v / n, w / n

    def primed2(self) -> tuple[float, float, float]:
        """(alpha_2', beta_2', gamma_2') for the equal-outcome branch."""
        n = math.sqrt(self.alpha**2 + self.beta**2 + self.gamma**2)
        return self.alpha / n, self.beta / n, self.gamma / n


# -- 1 -> 2 ------------------------------------------------------------------

def isometry_12(p: CloneParams12) -> np.ndarray:
    """d^3 x d isometry onto (A, B, M); column j is
    a|j>_A|Phi+>_BM + b|j>_B|Phi+>_AM."""
    d = p.d
    u = np.zeros((d, d, d, d), dtype=complex)  # (A, B, M, input)
    w = 1 / math.sqrt(d)
    for j in range(d):
        for k in range(d):
            u[j, k, k, j] += p.a * w
            u[k, j, k, j] += p.b * w
    return u.reshape(d**3, d)


def apply_isometry_12(psi: np.ndarray, p: CloneParams12) -> PureState:
    out = isometry_12(p) @ np.asarray(psi, dtype=complex)
    return PureState.from_vector([("A", p.d), ("B", p.d), ("M", p.d)], out)


def channel_12_oracle(psi: np.ndarray, p: CloneParams12) -> DensityMatrix:
    """Tr_M of the cloner output: the optimal asymmetric 1->2 channel."""
    _check_normalized(psi)
    return partial_trace(apply_isometry_12(psi, p), ["A", "B"])


def analytic_fidelities_12(p: CloneParams12) -> tuple[float, float]:
    f = (p.d - 1) / p.d
    return 1 - p.b**2 * f, 1 - p.a**2 * f


def psi2_r(psi: np.ndarray, p: CloneParams12, r: int) -> PureState:
    """Unnormalized post-ancilla-outcome state on (A, B) for outcome r."""
    d = p.d
    if not 0 <= r < d:
        raise IndexOutOfRange(f"outcome {r} outside [0, {d})")
    psi = np.asarray(psi, dtype=complex)
    ce, se = math.cos(p.eta), math.sin(p.eta)
    beta_r = psi[r] * (p.a + p.b) / math.sqrt(d)
    scale = math.sqrt(max(1 - 2 * p.a * p.b / d, 0.0)) / math.sqrt(d)
    vec = np.zeros((d, d), dtype=complex)
    vec[r, r] = beta_r
    for j in range(d):
        if j == r:
            continue
        bj = psi[j] * scale
        vec[j, r] += bj * ce
        vec[r, j] += bj * se
    return PureState.from_vector([("A", d), ("B", d)], vec.reshape(-1))


# -- 1 -> 3 ------------------------------------------------------------------

def isometry_13(p: CloneParams13) -> np.ndarray:
    """d^5 x d isometry onto (A, B, C, R, S) with the six |Phi+> pair terms."""
    d = p.d
    u = np.zeros((d, d, d, d, d, d), dtype=complex)  # (A,B,C,R,S, input)
    pref = math.sqrt(d / (2 * d + 2)) / d  # two 1/sqrt(d) pair factors
    for j in range(d):
        for k in range(d):
            for l in range(d):
                # alpha |psi>_A (Phi_BR Phi_CS + Phi_BS Phi_CR)
                u[j, k, l, k, l, j] += p.alpha * pref
                u[j, k, l, l, k, j] += p.alpha * pref
                # beta |psi>_B (Phi_AR Phi_CS + Phi_AS Phi_CR)
                u[k, j, l, k, l, j] += p.beta * pref
                u[k, j, l, l, k, j] += p.beta * pref
                # gamma |psi>_C (Phi_AR Phi_BS + Phi_AS Phi_BR)
                u[k, l, j, k, l, j] += p.gamma * pref
                u[k, l, j, l, k, j] += p.gamma * pref
    return u.reshape(d**5, d)


def apply_isometry_13(psi: np.ndarray, p: CloneParams13) -> PureState:
    out = isometry_13(p) @ np.asarray(psi, dtype=complex)
    regs = [("A", p.d), ("B", p.d), ("C", p.d), ("R", p.d), ("S", p.d)]
    return PureState.from_vector(regs, out)


def channel_13_oracle(psi: np.ndarray, p: CloneParams13) -> DensityMatrix:
    """Tr_RS of the cloner output: the optimal asymmetric 1->3 channel."""
    _check_normalized(psi)
    return partial_trace(apply_isometry_13(psi, p), ["A", "B", "C"])


def analytic_fidelities_13(p: CloneParams13) -> tuple[float, float, float]:
    def one_minus(x: float, y: float) -> float:
        return 1 - (p.d - 1) / p.d * (x * x + y * y + 2 * x * y / (p.d + 1))

    return (one_minus(p.beta, p.gamma),
            one_minus(p.alpha, p.gamma),
            one_minus(p.alpha, p.beta))


def psi2_rs(psi: np.ndarray, p: CloneParams13, r: int, s: int) -> PureState:
    """Unnormalized post-(r, s) ancilla-outcome state on (A, B, C)."""
    d = p.d
    if not (0 <= r < d and 0 <= s < d):
        raise IndexOutOfRange(f"outcomes ({r}, {s}) outside [0, {d})")
    psi = np.asarray(psi, dtype=complex)
    vec = np.zeros((d, d, d), dtype=complex)
    if r != s:
        pref = 1 / math.sqrt(2 * d * (d + 1))
        for j in range(d):
            w = pref * psi[j]
            vec[j, r, s] += p.alpha * w
            vec[r, j, s] += p.beta * w
            vec[r, s, j] += p.gamma * w
            vec[j, s, r] += p.alpha * w
            vec[s, j, r] += p.beta * w
            vec[s, r, j] += p.gamma * w
    else:
        pref = math.sqrt(2 / (d * (d + 1)))
        for j in range(d):
            w = pref * psi[j]
            vec[j, r, r] += p.alpha * w
            vec[r, j, r] += p.beta * w
            vec[r, r, j] += p.gamma * w
    return PureState.from_vector([("A", d), ("B", d), ("C", d)], vec.reshape(-1))


def _check_normalized(psi) -> None:
    n = float(np.vdot(psi, psi).real)
    if abs(n - 1.0) > 1e-9:
        raise ValueError(f"input state norm^2 = {n}, expected 1")


def haar_random_state(d: int, rng) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
