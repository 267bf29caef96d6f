"""Exact arithmetic over F_q and F_q[h]/(h^k), and dense linear algebra.

Field elements are integer *codes*: the base-p digits of a code are the
coefficients of the element as a polynomial in the generator ``t``
(little-endian), reduced modulo the declared modulus.  All field arithmetic
runs through precomputed ``q x q`` tables so that numpy fancy indexing can
vectorise row operations.

Elements of a :class:`BaseRing` ``F_q[h]/(h^k)`` are numpy vectors of length
``D = m*k`` holding F_p coordinates; index ``a*m + i`` is the coefficient of
``h^a t^i``.  Tensors elsewhere in the package carry this coordinate vector
as their trailing axis, and ring multiplication is a contraction against
:attr:`BaseRing.structure`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, MalformedInputError, NotInvertibleError

MAX_FIELD_ORDER = 1024


# -- polynomials over F_p (coefficient lists, little-endian) -----------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _poly_divmod(a, b, p):
    a = _trim(a)
    b = _trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        quot[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        a = _trim(a)
    return _trim(quot), a


def _monic_polys(degree, p):
    for tail in product(range(p), repeat=degree):
        yield list(tail) + [1]


def _format_poly(coeffs, var="t"):
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
            continue
        mono = var if i == 1 else f"{var}^{i}"
        terms.append(mono if c == 1 else f"{c}{mono}")
    return "+".join(terms) if terms else "0"


def _is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def factor_poly(poly, p):
    """Factor a monic polynomial over F_p by trial division.

    Returns a list of ``(factor, multiplicity)`` with monic factors listed by
    increasing degree.  Only meant for the tiny moduli used here.
    """
    rest = _trim(poly)
    factors = []
    deg = 1
    while len(rest) - 1 >= 2 * deg:
        for cand in _monic_polys(deg, p):
            mult = 0
            while True:
                quot, rem = _poly_divmod(rest, cand, p)
                if rem:
                    break
                rest = quot
                mult += 1
            if mult:
                factors.append((cand, mult))
        deg += 1
    if len(rest) > 1:
        factors.append((rest, 1))
    return factors


def _format_factorisation(factors):
    parts = []
    for f, mult in factors:
        s = _format_poly(f)
        if len(f) > 2 or (len(f) == 2 and f[0]):
            s = f"({s})"
        if mult > 1:
            s += "²" if mult == 2 else f"^{mult}"
        parts.append(s)
    return "·".join(parts)


# -- fields -------------------------------------------------------------------

class FieldSpec:
    """The finite field F_p[t]/(modulus) with table-driven arithmetic.

    ``modulus`` may be given with or without its leading 1 (length m+1 or m).
    """

    def __init__(self, p: int, m: int, modulus: Sequence[int]):
        if not _is_prime(p):
            raise MalformedInputError(f"p = {p} is not prime")
        if m < 1:
            raise MalformedInputError(f"extension degree m = {m} must be >= 1")
        modulus = [int(c) % p for c in modulus]
        if len(modulus) == m:
            modulus = modulus + [1]
        if len(modulus) != m + 1 or modulus[-1] != 1:
            raise MalformedInputError(
                f"modulus {modulus} is not a monic polynomial of degree {m}")
        if p ** m > MAX_FIELD_ORDER:
            raise CapacityError(f"field order {p}^{m} exceeds {MAX_FIELD_ORDER}")
        if m > 1:
            factors = factor_poly(modulus, p)
            if len(factors) != 1 or factors[0][1] != 1:
                raise MalformedInputError(
                    f"reducible: {_format_factorisation(factors)}")
        self.p = p
        self.m = m
        self.modulus = tuple(modulus)
        self.q = p ** m
        self._build_tables()
        self._spot_check()

    def _build_tables(self):
        p, m, q = self.p, self.m, self.q
        digits = np.array([[(c // p ** i) % p for i in range(m)] for c in range(q)],
                          dtype=np.int64)
        self.digits = digits
        weights = p ** np.arange(m)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(a, q):
                prod = _poly_mul(_trim(digits[a].tolist()), _trim(digits[b].tolist()), p)
                _, rem = _poly_divmod(prod, list(self.modulus), p) if prod else ([], [])
                code = sum(c * p ** i for i, c in enumerate(rem))
                mul[a, b] = mul[b, a] = code
        self.mul = mul
        inv = np.full(q, -1, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv = inv
        self.frob = np.array([self.power(a, p) for a in range(q)], dtype=np.int64)

    def _spot_check(self):
        if self.q == 2:
            return
        rng = random.Random(self.q * 7919 + self.m)
        a = rng.randrange(1, self.q)
        if self.power(a, self.q - 1) != 1:
            raise MalformedInputError("multiplicative group order check failed")

    def power(self, a: int, e: int) -> int:
        result, base = 1, int(a)
        while e:
            if e & 1:
                result = int(self.mul[result, base])
            base = int(self.mul[base, base])
            e >>= 1
        return result

    def sqrt(self, a):
        """Inverse Frobenius x -> x^(1/p); vectorised over code arrays."""
        return self._inv_frob[np.asarray(a)]

    @cached_property
    def _inv_frob(self):
        out = np.empty(self.q, dtype=np.int64)
        out[self.frob] = np.arange(self.q)
        return out

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        coeffs = [int(c) % self.p for c in coeffs]
        _, rem = _poly_divmod(coeffs, list(self.modulus), self.p) if _trim(coeffs) else ([], [])
        return sum(c * self.p ** i for i, c in enumerate(rem))

    def to_coeffs(self, code: int) -> list[int]:
        return self.digits[code].tolist()

    def format(self, code: int) -> str:
        if self.m == 1:
            return str(int(code))
        return _format_poly(self.to_coeffs(int(code)))

    def to_dict(self):
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.m, self.modulus) == (
            other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    def __repr__(self):
        if self.m == 1:
            return f"F_{self.p}"
        return f"F_{self.q}[{_format_poly(list(self.modulus))}]"


def make_field(p: int, m: int = 1, modulus: Sequence[int] | None = None) -> FieldSpec:
    """Build F_{p^m}; the modulus defaults to the first irreducible one."""
    if modulus is None:
        modulus = default_modulus(p, m)
    return FieldSpec(p, m, modulus)


def default_modulus(p: int, m: int) -> list[int]:
    if m == 1:
        return [0, 1]
    for cand in _monic_polys(m, p):
        if cand[0] and len(factor_poly(cand, p)) == 1 and factor_poly(cand, p)[0][1] == 1:
            return cand
    raise MalformedInputError(f"no irreducible polynomial of degree {m} over F_{p}")


# -- truncated rings -----------------------------------------------------------

class BaseRing:
    """F_q[h]/(h^h_trunc); ``h_trunc == 1`` is the field itself."""

    def __init__(self, field: FieldSpec, h_trunc: int = 1):
        if h_trunc < 1:
            raise MalformedInputError("h_trunc must be >= 1")
        self.field = field
        self.h_trunc = h_trunc
        self.p = field.p
        self.m = field.m
        self.D = field.m * h_trunc
        self.structure = self._build_structure()

    def _build_structure(self):
        m, k, p = self.m, self.h_trunc, self.p
        S = np.zeros((self.D, self.D, self.D), dtype=np.int64)
        for a, i, b, j in product(range(k), range(m), range(k), range(m)):
            if a + b >= k:
                continue
            prod = [0] * (i + j) + [1]
            _, rem = _poly_divmod(prod, list(self.field.modulus), p)
            for r, c in enumerate(rem):
                S[a * m + i, b * m + j, (a + b) * m + r] = c
        return S

    @property
    def is_field(self) -> bool:
        return self.h_trunc == 1

    @property
    def order(self) -> int:
        return self.field.q ** self.h_trunc

    # element constructors
    def zero(self):
        return np.zeros(self.D, dtype=np.int64)

    def one(self):
        e = self.zero()
        e[0] = 1
        return e

    def scalar(self, c: int):
        e = self.zero()
        e[0] = c % self.p
        return e

    def h(self):
        if self.h_trunc < 2:
            raise MalformedInputError("ring has no h (h_trunc = 1)")
        e = self.zero()
        e[self.m] = 1
        return e

    def from_field(self, code: int, h_power: int = 0):
        e = self.zero()
        if h_power < self.h_trunc:
            e[h_power * self.m:(h_power + 1) * self.m] = self.field.digits[code]
        return e

    def from_code(self, code: int):
        code = int(code)
        if not 0 <= code < self.order:
            raise MalformedInputError(f"element code {code} out of range for {self!r}")
        return np.array([(code // self.p ** k) % self.p for k in range(self.D)], dtype=np.int64)

    def code(self, e) -> int:
        return int(sum(int(c) * self.p ** k for k, c in enumerate(e)))

    def codes(self, arr):
        """Vectorised :meth:`code` over the trailing axis."""
        return np.asarray(arr) @ (self.p ** np.arange(self.D, dtype=np.int64))

    def from_codes(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        return (codes[..., None] // (self.p ** np.arange(self.D, dtype=np.int64))) % self.p

    def elements(self):
        for c in range(self.order):
            yield self.from_code(c)

    # F_q-block view used by the linear solvers
    def to_field_codes(self, arr):
        arr = np.asarray(arr)
        blocks = arr.reshape(arr.shape[:-1] + (self.h_trunc, self.m))
        return blocks @ (self.p ** np.arange(self.m, dtype=np.int64))

    def from_field_codes(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        digits = self.field.digits[codes]
        return digits.reshape(codes.shape[:-1] + (self.D,))

    # arithmetic
    def add(self, a, b):
        return (np.asarray(a) + np.asarray(b)) % self.p

    def sub(self, a, b):
        return (np.asarray(a) - np.asarray(b)) % self.p

    def neg(self, a):
        return (-np.asarray(a)) % self.p

    def mul(self, a, b):
        return np.einsum("s,t,stu->u", a, b, self.structure) % self.p

    def is_unit(self, a) -> bool:
        return bool(np.any(np.asarray(a)[: self.m] % self.p))

    def pow(self, a, e: int):
        result, base = self.one(), np.asarray(a)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        a = np.asarray(a)
        if not self.is_unit(a):
            raise NotInvertibleError(f"{self.format(a)} is not invertible in {self!r}")
        a0 = self.field.inv[self.field.from_coeffs(a[: self.m].tolist())]
        c = self.from_field(int(a0))
        u = self.mul(c, a)
        nil = self.sub(u, self.one())
        term, total = self.one(), self.one()
        for _ in range(1, self.h_trunc):
            term = self.neg(self.mul(term, nil))
            total = self.add(total, term)
        return self.mul(total, c)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def format(self, a) -> str:
        a = np.asarray(a)
        parts = []
        for k in range(self.h_trunc):
            block = a[k * self.m:(k + 1) * self.m].tolist()
            if not any(block):
                continue
            coeff = _format_poly(_trim(block))
            if k == 0:
                parts.append(coeff)
                continue
            hpow = "h" if k == 1 else f"h^{k}"
            if coeff == "1":
                parts.append(hpow)
            elif "+" in coeff:
                parts.append(f"({coeff}){hpow}")
            else:
                parts.append(f"{coeff}{hpow}")
        return "+".join(parts) if parts else "0"

    def to_dict(self):
        return {**self.field.to_dict(), "h_trunc": self.h_trunc}

    def __eq__(self, other):
        return isinstance(other, BaseRing) and self.field == other.field and (
            self.h_trunc == other.h_trunc)

    def __hash__(self):
        return hash((self.field, self.h_trunc))

    def __repr__(self):
        if self.h_trunc == 1:
            return repr(self.field)
        return f"{self.field!r}[h]/(h^{self.h_trunc})"


def prime_ring(p: int = 2) -> BaseRing:
    return BaseRing(make_field(p, 1, [0, 1]))


def ring_ops(R: BaseRing, op: str, a, b=None):
    """Dispatch one of ``add|mul|inv|frobenius`` on ring elements."""
    if op == "add":
        return R.add(a, b)
    if op == "mul":
        return R.mul(a, b)
    if op == "inv":
        return R.inv(a)
    if op == "frobenius":
        return R.frobenius(a)
    raise MalformedInputError(f"unknown ring operation {op!r}")


# -- linear algebra ------------------------------------------------------------

def rref(field: FieldSpec, A, pivot_cols: int | None = None):
    """Reduced row echelon form over F_q on a code matrix.

    Pivot rule: scan columns left to right; the pivot is the lowest-index
    remaining row with a nonzero entry.  Only the first ``pivot_cols``
    columns are eligible (the rest ride along, e.g. an augmented rhs).
    Returns ``(R, pivots)``.
    """
    R = np.array(A, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise MalformedInputError("rref expects a matrix")
    rows, cols = R.shape
    if pivot_cols is None:
        pivot_cols = cols
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    pivots = []
    r = 0
    for c in range(pivot_cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        lead = int(R[r, c])
        if lead != 1:
            R[r] = mul[inv[lead], R[r]]
        others = np.nonzero(R[:, c])[0]
        others = others[others != r]
        if others.size:
            factors = R[others, c]
            R[others] = add[R[others], neg[mul[factors[:, None], R[r][None, :]]]]
        pivots.append(c)
        r += 1
    return R, pivots


def _field_nullspace(field, R, pivots, cols):
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = field.neg[R[i, f]]
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), cols)


class LinearSolution(NamedTuple):
    solution: np.ndarray
    nullspace: np.ndarray


def _block_system(ring: BaseRing, M, b):
    """Split an F_q[h]/(h^k) system by h-degree into one F_q system."""
    k = ring.h_trunc
    Mc = ring.to_field_codes(M)  # rows x cols x k
    rows, cols = Mc.shape[:2]
    big = np.zeros((k * rows, k * cols), dtype=np.int64)
    for j in range(k):
        for i in range(j + 1):
            big[j * rows:(j + 1) * rows, i * cols:(i + 1) * cols] = Mc[:, :, j - i]
    rhs = None
    if b is not None:
        bc = ring.to_field_codes(b)  # rows x k
        rhs = np.concatenate([bc[:, j] for j in range(k)])
    return big, rhs


def _unblock(ring: BaseRing, vec, cols):
    k = ring.h_trunc
    codes = np.stack([vec[i * cols:(i + 1) * cols] for i in range(k)], axis=-1)
    return ring.from_field_codes(codes)


def solve_linear(ring: BaseRing, M, b) -> LinearSolution | None:
    """Solve ``M x = b`` exactly over ``ring``.

    ``M`` has shape ``(rows, cols, D)`` and ``b`` shape ``(rows, D)``.  Returns
    ``None`` when the system is inconsistent.  The nullspace basis is an
    F_q-basis (for ``h_trunc > 1`` it spans the kernel as an F_q-space).
    """
    M = np.asarray(M, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if M.ndim != 3 or M.shape[2] != ring.D or b.shape != (M.shape[0], ring.D):
        raise MalformedInputError(f"shape mismatch: M {M.shape}, b {b.shape}")
    rows, cols = M.shape[:2]
    big, rhs = _block_system(ring, M, b)
    bigcols = big.shape[1]
    aug = np.concatenate([big, rhs[:, None]], axis=1)
    R, pivots = rref(ring.field, aug, pivot_cols=bigcols)
    rank = len(pivots)
    if np.any(R[rank:, bigcols]):
        return None
    x = np.zeros(bigcols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, bigcols]
    null = _field_nullspace(ring.field, R[:, :bigcols], pivots, bigcols)
    return LinearSolution(
        _unblock(ring, x, cols),
        np.array([_unblock(ring, v, cols) for v in null], dtype=np.int64).reshape(
            len(null), cols, ring.D),
    )


def nullspace(ring: BaseRing, M):
    """F_q-basis of ``{x : M x = 0}``, shape ``(k, cols, D)``."""
    M = np.asarray(M, dtype=np.int64)
    sol = solve_linear(ring, M, np.zeros((M.shape[0], ring.D), dtype=np.int64))
    return sol.nullspace


def rank(ring: BaseRing, M) -> int:
    if not ring.is_field:
        raise MalformedInputError("rank is only defined over a field here")
    M = np.asarray(M, dtype=np.int64)
    if M.size == 0:
        return 0
    _, pivots = rref(ring.field, ring.to_field_codes(M)[..., 0])
    return len(pivots)


def row_basis(ring: BaseRing, vectors):
    """A basis (rref rows) of the span of ``vectors`` (shape ``(k, n, D)``)."""
    vectors = np.asarray(vectors, dtype=np.int64)
    if not ring.is_field:
        raise MalformedInputError("row_basis needs a field")
    n = vectors.shape[1]
    if vectors.shape[0] == 0:
        return np.zeros((0, n, ring.D), dtype=np.int64)
    R, pivots = rref(ring.field, ring.to_field_codes(vectors)[..., 0])
    return ring.from_field_codes(R[: len(pivots), :, None])


def extend_basis(ring: BaseRing, vectors, n: int):
    """Indices of standard basis vectors completing ``vectors`` to a basis.

    Deterministic: standard vectors are tried in increasing index order.
    """
    if not ring.is_field:
        raise MalformedInputError("extend_basis needs a field")
    vectors = np.asarray(vectors, dtype=np.int64).reshape(-1, n, ring.D)
    current = ring.to_field_codes(vectors)[..., 0]
    r = len(rref(ring.field, current)[1]) if len(current) else 0
    chosen = []
    for i in range(n):
        e = np.zeros((1, n), dtype=np.int64)
        e[0, i] = 1
        trial = np.concatenate([current, e]) if len(current) else e
        rt = len(rref(ring.field, trial)[1])
        if rt > r:
            current, r = trial, rt
            chosen.append(i)
        if r == n:
            break
    return chosen


@dataclass(frozen=True)
class ExactMatrix:
    """A dense matrix over a :class:`BaseRing` (entries shape ``(rows, cols, D)``)."""

    ring: BaseRing
    entries: np.ndarray = dc_field(repr=False)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def from_codes(cls, ring: BaseRing, codes) -> "ExactMatrix":
        return cls(ring, ring.from_codes(np.asarray(codes, dtype=np.int64)))

    def solve(self, b) -> LinearSolution | None:
        return solve_linear(self.ring, self.entries, b)

    def nullspace(self):
        return nullspace(self.ring, self.entries)

    def rank(self) -> int:
        return rank(self.ring, self.entries)

    def apply(self, x):
        return np.einsum("rcs,ct,stu->ru", self.entries, x, self.ring.structure) % self.ring.p
