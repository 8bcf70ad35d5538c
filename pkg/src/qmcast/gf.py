"""Exact arithmetic in GF(p^t).

Elements are stored in the polynomial basis: a length-t coefficient vector
over Z_p, with coeffs[i] the coefficient of x^i.  The basis-state index of
an element (used everywhere a field element labels a computational basis
state) is sum(coeffs[i] * p**i), i.e. coeffs-lexicographic with the
constant term least significant.

The modulus is the lexicographically smallest (by that same integer
encoding) monic irreducible polynomial of degree t, so a (p, t) pair
always denotes one concrete field across runs.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterator, Sequence

from .errors import Inconsistent, NonPrime, SpecMismatch, ZeroInverse


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def _poly_mod(coeffs: list[int], modulus: Sequence[int], p: int) -> list[int]:
    """Reduce a polynomial (coeff list, ascending) mod a monic modulus."""
    c = [x % p for x in coeffs]
    deg_m = len(modulus) - 1
    while len(c) > deg_m:
        lead = c.pop()
        if lead == 0:
            continue
        # subtract lead * x^(len(c)-deg_m) * modulus
        shift = len(c) - deg_m
        for i in range(deg_m):
            c[shift + i] = (c[shift + i] - lead * modulus[i]) % p
    while len(c) < deg_m:
        c.append(0)
    return c


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """Trial division by all monic polynomials of degree 1..t//2."""
    t = len(modulus) - 1
    if t == 1:
        return True
    for deg in range(1, t // 2 + 1):
        for idx in range(p**deg):
            div = [(idx // p**i) % p for i in range(deg)] + [1]
            if _poly_divides(div, modulus, p):
                return False
    return True


def _poly_divides(div: Sequence[int], poly: Sequence[int], p: int) -> bool:
    rem = list(poly)
    deg_d = len(div) - 1
    while len(rem) > deg_d:
        lead = rem.pop()
        if lead == 0:
            continue
        shift = len(rem) - deg_d
        for i in range(deg_d):
            rem[shift + i] = (rem[shift + i] - lead * div[i]) % p
    return all(x % p == 0 for x in rem)


class FieldSpec:
    """GF(p^t) with a fixed monic irreducible modulus of degree t."""

    def __init__(self, p: int, t: int, modulus: Sequence[int]):
        self.p = p
        self.t = t
        self.modulus = tuple(int(x) % p for x in modulus[:-1]) + (1,)
        self.q = p**t
        if not _is_prime(p):
            raise NonPrime(f"p={p} is not prime")
        if len(self.modulus) != t + 1:
            raise ValueError("modulus degree must equal t")
        if not _is_irreducible(self.modulus, p):
            raise ValueError(f"modulus {self.modulus} is reducible over GF({p})")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldSpec)
            and (self.p, self.t, self.modulus) == (other.p, other.t, other.modulus)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.t, self.modulus))

    def __repr__(self) -> str:
        return f"FieldSpec(p={self.p}, t={self.t}, modulus={list(self.modulus)})"

    # -- element constructors ------------------------------------------------

    def element(self, coeffs: Sequence[int]) -> "FieldElement":
        return FieldElement(self, coeffs)

    def zero(self) -> "FieldElement":
        return FieldElement(self, [0] * self.t)

    def one(self) -> "FieldElement":
        return FieldElement(self, [1] + [0] * (self.t - 1))

    def from_int(self, n: int) -> "FieldElement":
        """Inverse of FieldElement.index: base-p digits become coeffs."""
        if not 0 <= n < self.q:
            raise ValueError(f"index {n} outside [0, {self.q})")
        return FieldElement(self, [(n // self.p**i) % self.p for i in range(self.t)])

    def from_prime(self, n: int) -> "FieldElement":
        """Embed an integer mod p as a prime-subfield element."""
        return FieldElement(self, [n % self.p] + [0] * (self.t - 1))

    def elements(self) -> Iterator["FieldElement"]:
        for n in range(self.q):
            yield self.from_int(n)


def make_field(p: int, t: int) -> FieldSpec:
    """Build GF(p^t) with the smallest monic irreducible modulus.

    Candidates are scanned in increasing order of their integer encoding
    sum(c_i * p**i), so the choice is deterministic across runs.
    """
    if not _is_prime(p):
        raise NonPrime(f"p={p} is not prime")
    if t < 1:
        raise ValueError(f"t={t} must be >= 1")
    return _make_field_cached(p, t)


@lru_cache(maxsize=None)
def _make_field_cached(p: int, t: int) -> FieldSpec:
    for idx in range(p**t):
        modulus = [(idx // p**i) % p for i in range(t)] + [1]
        if _is_irreducible(modulus, p):
            return FieldSpec(p, t, modulus)
    raise AssertionError("irreducible polynomial must exist")  # pragma: no cover


class FieldElement:
    """Immutable element of a FieldSpec, in polynomial-coefficient form."""

    __slots__ = ("spec", "coeffs")

    def __init__(self, spec: FieldSpec, coeffs: Sequence[int]):
        if len(coeffs) != spec.t:
            raise ValueError(f"need {spec.t} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "coeffs", tuple(int(c) % spec.p for c in coeffs))

    def __setattr__(self, *_):
        raise AttributeError("FieldElement is immutable")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement) or other.spec != self.spec:
            raise SpecMismatch(f"cannot combine {self!r} with {other!r}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldElement)
            and self.spec == other.spec
            and self.coeffs == other.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.spec, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __repr__(self) -> str:
        return f"GF({self.spec.p}^{self.spec.t})[{self.index}]"

    @property
    def index(self) -> int:
        """Basis-state index: coeffs-lexicographic integer encoding."""
        return sum(c * self.spec.p**i for i, c in enumerate(self.coeffs))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        p = self.spec.p
        return FieldElement(self.spec, [(a + b) % p for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, [(-a) % p for a in self.coeffs])

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        prod = _poly_mul(self.coeffs, other.coeffs, self.spec.p)
        return FieldElement(self.spec, _poly_mod(prod, self.spec.modulus, self.spec.p))

    def inv(self) -> "FieldElement":
        """Multiplicative inverse, via a^(q-2)."""
        if not self:
            raise ZeroInverse("0 has no multiplicative inverse")
        result = self.spec.one()
        base = self
        e = self.spec.q - 2
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def pow_p(self, k: int) -> "FieldElement":
        """Frobenius power a^(p^k)."""
        out = self
        for _ in range(k):
            r = out
            acc = self.spec.one()
            e = self.spec.p
            while e:
                if e & 1:
                    acc = acc * r
                r = r * r
                e >>= 1
            out = acc
        return out

    def trace_to_prime(self) -> int:
        """Field trace to GF(p), as an integer in [0, p).

        Computed as the trace of the t x t multiplication matrix of
        x -> self * x in the coefficient basis; equals the Galois-theoretic
        sum self + self^p + ... + self^(p^(t-1)).
        """
        spec = self.spec
        tr = 0
        for i in range(spec.t):
            basis = FieldElement(spec, [1 if j == i else 0 for j in range(spec.t)])
            tr += (self * basis).coeffs[i]
        return tr % spec.p


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def trace_to_prime(z: FieldElement) -> int:
    return z.trace_to_prime()


# -- linear algebra over GF(q) ----------------------------------------------
#
# Vectors are lists of FieldElement, matrices are lists of rows.

FieldVector = list
FieldMatrix = list


def vec_dot(a: Sequence[FieldElement], b: Sequence[FieldElement]) -> FieldElement:
    if len(a) != len(b):
        raise ValueError("length mismatch")
    spec = a[0].spec
    acc = spec.zero()
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def mat_vec(m: Sequence[Sequence[FieldElement]], v: Sequence[FieldElement]) -> list:
    return [vec_dot(row, v) for row in m]


def mat_mul(a, b) -> list:
    cols = list(zip(*b))
    return [[vec_dot(row, col) for col in cols] for row in a]


def identity_matrix(spec: FieldSpec, n: int) -> list:
    return [[spec.one() if i == j else spec.zero() for j in range(n)] for i in range(n)]


def _row_reduce(rows: list, ncols: int):
    """In-place row echelon reduction; returns pivot column list."""
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        scale = rows[r][c].inv()
        rows[r] = [x * scale for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def matrix_rank(m: Sequence[Sequence[FieldElement]]) -> int:
    if not m:
        return 0
    rows = [list(row) for row in m]
    return len(_row_reduce(rows, len(rows[0])))


def solve_linear(a, b):
    """Solve A x = b over GF(q) by Gaussian elimination.

    Returns (solution, rank); free variables are set to zero.
    Raises Inconsistent when no solution exists.
    """
    if len(a) != len(b):
        raise ValueError("row count mismatch")
    if not a:
        return [], 0
    spec = b[0].spec if b else a[0][0].spec
    ncols = len(a[0])
    rows = [list(row) + [bi] for row, bi in zip(a, b)]
    pivots = _row_reduce(rows, ncols)
    for i in range(len(pivots), len(rows)):
        if rows[i][ncols]:
            raise Inconsistent("system has no solution")
    x = [spec.zero()] * ncols
    for r, c in enumerate(pivots):
        x[c] = rows[r][ncols]
    return x, len(pivots)
