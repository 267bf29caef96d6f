"""Truncated Witt vectors W_n(F_q), Frobenius and the Artin-Schreier-Witt map.

Structure polynomials come from the ghost components

    w_k(x) = sum_{i<=k} p^i x_i^(p^(k-i)),

solved recursively for the k-th coordinate of a sum, product or negative.
Coordinates are stored reduced mod p.  The k-th step only needs the
earlier coordinates mod p (``a = b mod p`` implies
``a^(p^j) = b^(p^j) mod p^(j+1)``), so the numerator is formed modulo
``p^(k+1)`` and divisibility by ``p^k`` is checked coefficientwise before
dividing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from ._groups import exponents_from_orders, factors_from_exponents
from .errors import CapacityError, MalformedInputError, VerificationError
from .exactbase import FieldSpec

MAX_LENGTH = 4
MAX_ENUMERATION = 2 ** 20


# -- integer polynomials as {exponent tuple: coefficient} ----------------------

def _padd(a, b, mod):
    out = dict(a)
    for mono, c in b.items():
        out[mono] = (out.get(mono, 0) + c) % mod
    return {k: v for k, v in out.items() if v}


def _pscale(a, s, mod):
    return {k: v * s % mod for k, v in a.items() if v * s % mod}


def _pmul(a, b, mod):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple(x + y for x, y in zip(ma, mb))
            out[mono] = (out.get(mono, 0) + ca * cb) % mod
    return {k: v for k, v in out.items() if v}


def _ppow(a, e, nvars, mod):
    result = {(0,) * nvars: 1 % mod}
    base = a
    while e:
        if e & 1:
            result = _pmul(result, base, mod)
        e >>= 1
        if e:
            base = _pmul(base, base, mod)
    return result


def _var(i, nvars):
    mono = [0] * nvars
    mono[i] = 1
    return {tuple(mono): 1}


def _ghost(vars_, k, p, nvars, mod):
    total = {}
    for i in range(k + 1):
        total = _padd(total, _pscale(_ppow(_var(vars_[i], nvars), p ** (k - i), nvars, mod),
                                     p ** i, mod), mod)
    return total


def _solve_coordinates(target, p, n, nvars, label):
    """Coordinates c_k with ghost(c)_k == target(k), reduced mod p."""
    coords = []
    for k in range(n):
        mod = p ** (k + 1)
        numer = target(k, mod)
        for i, c in enumerate(coords):
            numer = _padd(numer, _pscale(_ppow(c, p ** (k - i), nvars, mod), -(p ** i), mod), mod)
        bad = [mono for mono, c in numer.items() if c % p ** k]
        if bad:
            raise VerificationError(
                f"{label} polynomial {k} has non-integral coefficient at {bad[0]}")
        coords.append({mono: (c // p ** k) % p for mono, c in numer.items() if (c // p ** k) % p})
    return coords


@dataclass(frozen=True)
class WittContext:
    """Cached structure polynomials for W_n over a field of characteristic p.

    Variables are ordered ``x_0..x_{n-1}, y_0..y_{n-1}``; ``neg_polys`` only
    use the x block.
    """

    p: int
    n: int
    sum_polys: tuple
    prod_polys: tuple
    neg_polys: tuple

    def format_poly(self, poly) -> str:
        names = [f"x{i}" for i in range(self.n)] + [f"y{i}" for i in range(self.n)]
        poly = dict(poly)
        terms = []
        for mono in sorted(poly, key=lambda m: (sum(m), m)):
            c = poly[mono]
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors) or "1"
            terms.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def witt_structure_polynomials(p: int, n: int) -> WittContext:
    if n < 1:
        raise MalformedInputError("Witt length must be >= 1")
    if n > MAX_LENGTH:
        raise CapacityError(f"Witt length {n} exceeds the supported bound {MAX_LENGTH}")
    nv = 2 * n
    xs, ys = list(range(n)), list(range(n, 2 * n))

    def sum_target(k, mod):
        return _padd(_ghost(xs, k, p, nv, mod), _ghost(ys, k, p, nv, mod), mod)

    def prod_target(k, mod):
        return _pmul(_ghost(xs, k, p, nv, mod), _ghost(ys, k, p, nv, mod), mod)

    def neg_target(k, mod):
        return _pscale(_ghost(xs, k, p, nv, mod), -1, mod)

    sums = _solve_coordinates(sum_target, p, n, nv, "sum")
    prods = _solve_coordinates(prod_target, p, n, nv, "product")
    negs = _solve_coordinates(neg_target, p, n, nv, "negation")
    freeze = lambda polys: tuple(tuple(sorted(c.items())) for c in polys)
    return WittContext(p, n, freeze(sums), freeze(prods), freeze(negs))


# -- evaluation on code arrays -------------------------------------------------

class _Evaluator:
    def __init__(self, ctx: WittContext, field: FieldSpec):
        if field.p != ctx.p:
            raise MalformedInputError(f"field characteristic {field.p} != Witt prime {ctx.p}")
        self.ctx = ctx
        self.field = field
        top = 1
        for polys in (ctx.sum_polys, ctx.prod_polys, ctx.neg_polys):
            for poly in polys:
                for mono, _ in poly:
                    top = max(top, *mono)
        q = field.q
        table = np.ones((q, top + 1), dtype=np.int64)
        for e in range(1, top + 1):
            table[:, e] = field.mul[table[:, e - 1], np.arange(q)]
        self.powers = table

    def eval(self, polys, V):
        """Evaluate polynomials at rows of ``V`` (codes, shape ``(N, nvars)``)."""
        f = self.field
        out = np.zeros((V.shape[0], len(polys)), dtype=np.int64)
        for k, poly in enumerate(polys):
            acc = np.zeros(V.shape[0], dtype=np.int64)
            for mono, c in poly:
                term = np.full(V.shape[0], c % f.p, dtype=np.int64)
                for var, e in enumerate(mono):
                    if e:
                        term = f.mul[term, self.powers[V[:, var], e]]
                acc = f.add[acc, term]
            out[:, k] = acc
        return out


@lru_cache(maxsize=None)
def _evaluator(ctx: WittContext, field: FieldSpec) -> _Evaluator:
    return _Evaluator(ctx, field)


def batch_add(ctx, field, X, Y):
    return _evaluator(ctx, field).eval(ctx.sum_polys, np.concatenate([X, Y], axis=1))


def batch_mul(ctx, field, X, Y):
    return _evaluator(ctx, field).eval(ctx.prod_polys, np.concatenate([X, Y], axis=1))


def batch_neg(ctx, field, X):
    pad = np.zeros_like(X)
    return _evaluator(ctx, field).eval(ctx.neg_polys, np.concatenate([X, pad], axis=1))


def batch_frobenius(ctx, field, X):
    return field.frob[X]


def batch_artin_schreier(ctx, field, X):
    return batch_add(ctx, field, batch_frobenius(ctx, field, X), batch_neg(ctx, field, X))


def batch_int_mul(ctx, field, k, X):
    acc = np.zeros_like(X)
    base = X
    k = int(k)
    while k:
        if k & 1:
            acc = batch_add(ctx, field, acc, base)
        base = batch_add(ctx, field, base, base)
        k >>= 1
    return acc


# -- element-level API ---------------------------------------------------------

@dataclass(frozen=True)
class WittVector:
    ctx: WittContext
    field: FieldSpec
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.ctx.n:
            raise MalformedInputError(
                f"Witt vector needs {self.ctx.n} coordinates, got {len(self.coords)}")

    def _row(self):
        return np.array([self.coords], dtype=np.int64)

    def _same(self, other):
        if self.ctx != other.ctx or self.field != other.field:
            raise MalformedInputError("Witt vectors live in different rings")

    def _wrap(self, row):
        return WittVector(self.ctx, self.field, tuple(int(c) for c in row[0]))

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._wrap(batch_int_mul(self.ctx, self.field, other, self._row()))
        return witt_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self):
        return "(" + ", ".join(self.field.format(c) for c in self.coords) + ")"


def witt_vector(ctx: WittContext, field: FieldSpec, coords) -> WittVector:
    return WittVector(ctx, field, tuple(int(c) for c in coords))


def witt_add(x: WittVector, y: WittVector) -> WittVector:
    x._same(y)
    return x._wrap(batch_add(x.ctx, x.field, x._row(), y._row()))


def witt_mul(x: WittVector, y: WittVector) -> WittVector:
    x._same(y)
    return x._wrap(batch_mul(x.ctx, x.field, x._row(), y._row()))


def witt_neg(x: WittVector) -> WittVector:
    return x._wrap(batch_neg(x.ctx, x.field, x._row()))


def witt_frobenius(x: WittVector) -> WittVector:
    return x._wrap(batch_frobenius(x.ctx, x.field, x._row()))


def artin_schreier(x: WittVector) -> WittVector:
    return x._wrap(batch_artin_schreier(x.ctx, x.field, x._row()))


def witt_one(ctx, field) -> WittVector:
    return witt_vector(ctx, field, [1] + [0] * (ctx.n - 1))


def witt_from_int(ctx, field, k: int) -> WittVector:
    return witt_one(ctx, field) * (k % ctx.p ** ctx.n)


def all_coordinates(ctx, field):
    """Every element of W_n(F_q) as a code matrix, lexicographic order."""
    size = field.q ** ctx.n
    if size > MAX_ENUMERATION:
        raise CapacityError(f"|W_{ctx.n}(F_{field.q})| = {size} exceeds {MAX_ENUMERATION}")
    return np.array(list(product(range(field.q), repeat=ctx.n)), dtype=np.int64).reshape(
        size, ctx.n)


def _index(field, X):
    return X @ (field.q ** np.arange(X.shape[1] - 1, -1, -1, dtype=np.int64))


def _additive_orders(ctx, field, X, member):
    """Order of each row of X modulo the subgroup described by ``member``."""
    orders = np.ones(X.shape[0], dtype=np.int64)
    acc = X.copy()
    done = member(acc)
    step = 1
    while not done.all():
        acc = batch_add(ctx, field, acc, X)
        step += 1
        newly = member(acc) & ~done
        orders[newly] = step
        done |= newly
        if step > ctx.p ** ctx.n:
            raise VerificationError("element order exceeds p^n")
    return orders


@dataclass
class CokerResult:
    """Cokernel of the Artin-Schreier-Witt map."""

    invariant_factors: tuple
    representatives: np.ndarray   # canonical coset representatives (codes)
    coset_of: np.ndarray          # element index -> coset number
    image: np.ndarray             # sorted element indices of Im P
    ctx: WittContext
    field: FieldSpec

    @property
    def order(self) -> int:
        return len(self.representatives)

    def section(self, x: WittVector) -> WittVector:
        idx = int(_index(self.field, x._row())[0])
        rep = self.representatives[self.coset_of[idx]]
        return witt_vector(self.ctx, self.field, rep)


@dataclass
class KerResult:
    elements: np.ndarray
    invariant_factors: tuple


def coker_P(ctx: WittContext, field: FieldSpec) -> CokerResult:
    X = all_coordinates(ctx, field)
    image = np.unique(_index(field, batch_artin_schreier(ctx, field, X)))
    in_image = np.zeros(X.shape[0], dtype=bool)
    in_image[image] = True
    image_rows = X[image]
    coset_of = np.full(X.shape[0], -1, dtype=np.int64)
    reps = []
    for idx in range(X.shape[0]):
        if coset_of[idx] >= 0:
            continue
        shifted = batch_add(ctx, field, np.repeat(X[idx:idx + 1], len(image_rows), axis=0),
                            image_rows)
        coset_of[_index(field, shifted)] = len(reps)
        reps.append(X[idx])
    reps = np.array(reps, dtype=np.int64)
    orders = _additive_orders(ctx, field, reps, lambda A: in_image[_index(field, A)])
    factors = factors_from_exponents(exponents_from_orders(orders.tolist(), ctx.p), ctx.p)
    return CokerResult(factors, reps, coset_of, image, ctx, field)


def ker_P(ctx: WittContext, field: FieldSpec) -> KerResult:
    X = all_coordinates(ctx, field)
    kernel = X[~batch_artin_schreier(ctx, field, X).any(axis=1)]
    orders = _additive_orders(ctx, field, kernel, lambda A: ~A.any(axis=1))
    factors = factors_from_exponents(exponents_from_orders(orders.tolist(), ctx.p), ctx.p)
    return KerResult(kernel, factors)


def doubling_identity_check(field: FieldSpec) -> tuple[bool, list]:
    """Check ``2*(x0, x1) == (0, x0^2)`` on all of W_2(F_q), q a power of 2.

    Returns ``(passed, counterexamples)``.
    """
    if field.p != 2:
        raise MalformedInputError("the doubling identity is stated for p = 2")
    ctx = witt_structure_polynomials(2, 2)
    X = all_coordinates(ctx, field)
    doubled = batch_add(ctx, field, X, X)
    expected = np.stack([np.zeros(len(X), dtype=np.int64), field.mul[X[:, 0], X[:, 0]]], axis=1)
    bad = np.nonzero((doubled != expected).any(axis=1))[0]
    return (bad.size == 0, [tuple(X[i]) for i in bad])
