"""Finite abelian p-groups, invariant/Sweedler cohomology and torsors.

Two independent routes to the twist group of K[A]:

* the closed formula ``Hom(A^vee, W_n(K)/P(W_n(K)))`` (:func:`h2_inv_formula`);
* exhaustive enumeration of normalized twists in K[A] (x) K[A] modulo gauge
  (:func:`twist_classes_bruteforce`), which is the degree-2 case of the
  multiplicative Sweedler complex in :func:`sweedler_bruteforce`.

Elements of ``K[A]^(x)i`` are code vectors indexed by ``A^i`` in
lexicographic order; everything here is over a field F_q given as a
:class:`~symtwist.exactbase.FieldSpec`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from ._groups import exponents_from_orders, factors_from_exponents, format_factors
from .errors import CapacityError, MalformedInputError, VerificationError
from .exactbase import FieldSpec, rref
from .witt import coker_P, witt_structure_polynomials

ENUMERATION_BOUND = 2 ** 24
COCHAIN_BOUND = 2 ** 20


@dataclass(frozen=True)
class GroupPresentation:
    """A finite abelian group by its invariant factors (ascending)."""

    factors: tuple = ()

    def __post_init__(self):
        facs = tuple(sorted(int(f) for f in self.factors if int(f) > 1))
        for a, b in zip(facs, facs[1:]):
            if b % a:
                raise MalformedInputError(f"invariant factors {facs} are not a divisor chain")
        object.__setattr__(self, "factors", facs)

    @property
    def order(self) -> int:
        out = 1
        for f in self.factors:
            out *= f
        return out

    @property
    def prime(self):
        if not self.factors:
            return None
        f = self.factors[0]
        p = 2
        while f % p:
            p += 1
        return p

    def __str__(self):
        return format_factors(self.factors)


class AbelianPGroup:
    """``(+)_i Z/p^{r_i}`` with ``r_1 >= r_2 >= ... >= 1``."""

    def __init__(self, p: int, exponents=()):
        exps = [int(r) for r in exponents if int(r) != 0]
        if any(r < 0 for r in exps):
            raise MalformedInputError(f"negative exponent in {exponents}")
        self.p = p
        self.exponents = tuple(sorted(exps, reverse=True))

    @classmethod
    def from_orders(cls, p: int, orders) -> "AbelianPGroup":
        exps = []
        for o in orders:
            o = int(o)
            r = 0
            while o > 1:
                if o % p:
                    raise MalformedInputError(f"{o} is not a power of {p}")
                o //= p
                r += 1
            exps.append(r)
        return cls(p, exps)

    @property
    def moduli(self):
        return tuple(self.p ** r for r in self.exponents)

    @property
    def order(self) -> int:
        out = 1
        for m in self.moduli:
            out *= m
        return out

    @property
    def exponent_log(self) -> int:
        return self.exponents[0] if self.exponents else 0

    def presentation(self) -> GroupPresentation:
        return GroupPresentation(self.moduli)

    @cached_property
    def elements(self):
        return list(product(*[range(m) for m in self.moduli]))

    @cached_property
    def add_table(self):
        elems = self.elements
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i, j] = index[tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))]
        return table

    def __eq__(self, other):
        return isinstance(other, AbelianPGroup) and (self.p, self.exponents) == (
            other.p, other.exponents)

    def __hash__(self):
        return hash((self.p, self.exponents))

    def __str__(self):
        return format_factors(self.moduli)

    def __repr__(self):
        return f"AbelianPGroup({self.p}, {list(self.exponents)})"


def dual_group(A: AbelianPGroup, n: int) -> AbelianPGroup:
    """``Hom(A, Z/p^n)``, isomorphic to A when p^n kills A."""
    if n < A.exponent_log:
        raise MalformedInputError(f"p^{n} does not annihilate {A}")
    return AbelianPGroup(A.p, A.exponents)


def hom_group(A, B) -> GroupPresentation:
    """``Hom(A, B)`` by the min-exponent rule on cyclic summands."""
    a = A.presentation() if isinstance(A, AbelianPGroup) else A
    b = B.presentation() if isinstance(B, AbelianPGroup) else B
    if a.prime and b.prime and a.prime != b.prime:
        raise MalformedInputError(f"groups for different primes {a.prime} and {b.prime}")
    return GroupPresentation(tuple(min(x, y) for x in a.factors for y in b.factors))


def h2_inv_formula(A: AbelianPGroup, field: FieldSpec, n: int | None = None) -> GroupPresentation:
    """Twist classes of F_q[A] via the Witt cokernel."""
    if field.p != A.p:
        raise MalformedInputError(f"char F_{field.q} != {A.p}")
    if n is None:
        n = max(A.exponent_log, 1)
    coker = coker_P(witt_structure_polynomials(A.p, n), field)
    return hom_group(dual_group(A, n), GroupPresentation(coker.invariant_factors))


def sweedler_dims_formula(A: AbelianPGroup, field: FieldSpec, i_max: int) -> list[GroupPresentation]:
    """``[H^1, ..., H^{i_max}]`` of the function algebra of A."""
    out = []
    for i in range(1, i_max + 1):
        if i == 1:
            out.append(A.presentation())
        elif i == 2:
            out.append(h2_inv_formula(A, field))
        else:
            out.append(GroupPresentation())
    return out


# -- the group algebra F_q[A^i] --------------------------------------------------

class GroupAlgebraPowers:
    """Arithmetic in ``F_q[A]^(x)i = F_q[A^i]`` on batches of code vectors."""

    def __init__(self, A: AbelianPGroup, field: FieldSpec):
        if field.p != A.p:
            raise MalformedInputError(f"char F_{field.q} != {A.p}")
        self.A = A
        self.field = field
        self.n = A.order

    def size(self, i: int) -> int:
        return self.n ** i

    def _add_table(self, i):
        # A^i addition on flat lexicographic indices
        n, g = self.n, self.A.add_table
        if i == 0:
            return np.zeros((1, 1), dtype=np.int64)
        idx = np.indices((n,) * i).reshape(i, -1)
        out = np.zeros((n ** i, n ** i), dtype=np.int64)
        for leg in range(i):
            out = out * n + g[idx[leg][:, None], idx[leg][None, :]]
        return out

    def one(self, i: int, batch: int = 1):
        x = np.zeros((batch, self.size(i)), dtype=np.int64)
        x[:, 0] = 1
        return x

    def mul(self, x, y, i: int):
        f = self.field
        table = self._add_table(i)
        out = np.zeros_like(x)
        for a in range(self.size(i)):
            # terms x[a] * y[b] land on a + b
            contrib = f.mul[x[:, a][:, None], y]
            target = table[a]
            order = np.argsort(target)
            out = f.add[out, contrib[:, order]]
        return out

    def counit(self, x):
        f = self.field
        acc = np.zeros(x.shape[0], dtype=np.int64)
        for a in range(x.shape[1]):
            acc = f.add[acc, x[:, a]]
        return acc

    def inverse(self, x, i: int):
        eps = self.counit(x)
        if np.any(eps == 0):
            raise VerificationError("non-invertible element (augmentation zero)")
        f = self.field
        scale = f.inv[eps]
        u = f.mul[scale[:, None], x]
        # u = 1 + nilpotent; u^(p^t) = 1 once p^t exceeds the nilpotency index
        e = 1
        while e < self.size(i):
            e *= self.A.p
        inv = self.power(u, e - 1, i)
        return f.mul[scale[:, None], inv]

    def power(self, x, e: int, i: int):
        result = self.one(i, x.shape[0])
        base = x
        while e:
            if e & 1:
                result = self.mul(result, base, i)
            e >>= 1
            if e:
                base = self.mul(base, base, i)
        return result

    def coface(self, x, i: int, j: int):
        """The j-th coface ``C^i -> C^{i+1}``: unit in front, Delta on leg j, unit behind."""
        n = self.n
        src = np.indices((n,) * i).reshape(i, -1) if i else np.zeros((0, 1), dtype=np.int64)
        if j == 0:
            legs = [np.zeros(src.shape[1], dtype=np.int64)] + list(src)
        elif j == i + 1:
            legs = list(src) + [np.zeros(src.shape[1], dtype=np.int64)]
        else:
            legs = list(src[:j]) + [src[j - 1]] + list(src[j:])
        target = np.zeros(src.shape[1], dtype=np.int64)
        for leg in legs:
            target = target * n + leg
        out = np.zeros((x.shape[0], self.size(i + 1)), dtype=np.int64)
        out[:, target] = x
        return out

    def differential(self, x, i: int):
        """Multiplicative Sweedler differential ``prod_j (coface_j x)^{(-1)^j}``."""
        num = self.one(i + 1, x.shape[0])
        den = self.one(i + 1, x.shape[0])
        for j in range(i + 2):
            term = self.coface(x, i, j)
            if j % 2 == 0:
                num = self.mul(num, term, i + 1)
            else:
                den = self.mul(den, term, i + 1)
        return self.mul(num, self.inverse(den, i + 1), i + 1)

    def normalized_cochains(self, i: int):
        """All elements ``1 + (aug ideal)^(x)i`` as a batch (all invertible)."""
        if i == 0 or self.n == 1:
            return self.one(i)
        k = (self.n - 1) ** i
        count = self.field.q ** k
        if count > COCHAIN_BOUND:
            raise CapacityError(
                f"{count} normalized {i}-cochains for {self.A} over F_{self.field.q}")
        # basis of the augmentation ideal: g - 1 for g != 0
        aug = np.zeros((self.n - 1, self.n), dtype=np.int64)
        for g in range(1, self.n):
            aug[g - 1, g] = 1
            aug[g - 1, 0] = self.field.neg[1]
        basis = aug
        for _ in range(i - 1):
            basis = np.einsum("ab,cd->acbd", basis, aug).reshape(
                basis.shape[0] * aug.shape[0], -1) % self.field.p
        basis = self._codes_from_prime(basis)
        coeffs = np.array(list(product(range(self.field.q), repeat=k)), dtype=np.int64)
        f = self.field
        out = self.one(i, count)
        for b in range(k):
            out = f.add[out, f.mul[coeffs[:, b][:, None], basis[b][None, :]]]
        return out

    def _codes_from_prime(self, arr):
        # entries in F_p embed as the constant codes 0..p-1
        return np.asarray(arr, dtype=np.int64) % self.field.p


def _rows_index(x):
    return {row.tobytes(): k for k, row in enumerate(x)}


@dataclass
class CohomologyEnumeration:
    degree: int
    cocycles: np.ndarray
    coboundaries: np.ndarray
    representatives: np.ndarray
    invariant_factors: tuple

    @property
    def order(self) -> int:
        return len(self.representatives)

    @property
    def group(self) -> GroupPresentation:
        return GroupPresentation(self.invariant_factors)


def sweedler_bruteforce(A: AbelianPGroup, field: FieldSpec, degree: int) -> CohomologyEnumeration:
    """Enumerate ``H^degree`` of the normalized multiplicative Sweedler complex."""
    if degree < 1:
        raise MalformedInputError("degree must be >= 1")
    alg = GroupAlgebraPowers(A, field)
    cands = alg.normalized_cochains(degree)
    one = alg.one(degree + 1)
    dx = alg.differential(cands, degree)
    cocycles = cands[(dx == one).all(axis=1)]
    prev = alg.normalized_cochains(degree - 1)
    bounds = np.unique(alg.differential(prev, degree - 1), axis=0) if degree > 1 else alg.one(1)
    bound_set = set(_rows_index(bounds))
    for row in bounds:
        if not (alg.differential(row[None, :], degree) == one).all():
            raise VerificationError("coboundary is not a cocycle (d o d != 1)")
    # cosets modulo coboundaries; the unit first, then lexicographically least members
    index = _rows_index(cocycles)
    seen = np.full(len(cocycles), -1, dtype=np.int64)
    reps = []
    order_list = []
    sort_keys = list(np.lexsort(cocycles.T[::-1]))
    # the trivial class is represented by the unit itself
    unit_pos = index[alg.one(degree)[0].tobytes()]
    sort_keys.remove(unit_pos)
    for k in [unit_pos] + sort_keys:
        if seen[k] >= 0:
            continue
        coset = alg.mul(np.repeat(cocycles[k:k + 1], len(bounds), axis=0), bounds, degree)
        for row in coset:
            seen[index[row.tobytes()]] = len(reps)
        reps.append(cocycles[k])
        # order of the class: smallest e with x^e in the coboundary group
        acc = cocycles[k:k + 1]
        e = 1
        while acc[0].tobytes() not in bound_set:
            acc = alg.mul(acc, cocycles[k:k + 1], degree)
            e += 1
        order_list.append(e)
    if len(cocycles) % len(bounds):
        raise VerificationError("coboundaries do not form a subgroup of the cocycles")
    exps = exponents_from_orders(order_list, A.p) if reps else []
    reps = np.array(reps, dtype=np.int64).reshape(len(reps), alg.size(degree))
    return CohomologyEnumeration(degree, cocycles, bounds, reps,
                                 factors_from_exponents(exps, A.p))


@dataclass
class TwistClasses:
    count: int
    invariant_factors: tuple
    representatives: list  # each an |A| x |A| code matrix over the group basis

    @property
    def group(self) -> GroupPresentation:
        return GroupPresentation(self.invariant_factors)


def twist_classes_bruteforce(A: AbelianPGroup, field: FieldSpec) -> TwistClasses:
    """Gauge classes of normalized twists for F_q[A], by exhaustion."""
    if field.q ** (A.order ** 2) > ENUMERATION_BOUND:
        raise CapacityError(
            f"|F_{field.q}|^(|A|^2) = {field.q}^{A.order ** 2} exceeds {ENUMERATION_BOUND}")
    h2 = sweedler_bruteforce(A, field, 2)
    n = A.order
    return TwistClasses(h2.order, h2.invariant_factors,
                        [r.reshape(n, n) for r in h2.representatives])


def is_twist(A: AbelianPGroup, field: FieldSpec, J) -> bool:
    alg = GroupAlgebraPowers(A, field)
    J = np.asarray(J, dtype=np.int64).reshape(1, -1)
    if alg.counit(J)[0] == 0:
        return False
    lhs = alg.mul(alg.coface(J, 2, 3), alg.coface(J, 2, 1), 3)
    rhs = alg.mul(alg.coface(J, 2, 0), alg.coface(J, 2, 2), 3)
    return bool((lhs == rhs).all())


# -- torsors ---------------------------------------------------------------------------

def _algebra_mul(field, M, x, y):
    f = field
    n = M.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        if not x[i]:
            continue
        for j in range(n):
            if not y[j]:
                continue
            c = f.mul[x[i], y[j]]
            out = f.add[out, f.mul[c, M[i, j]]]
    return out


def _algebra_pow(field, M, unit, x, e):
    result, base = unit.copy(), x
    while e:
        if e & 1:
            result = _algebra_mul(field, M, result, base)
        e >>= 1
        if e:
            base = _algebra_mul(field, M, base, base)
    return result


def twisted_dual_algebra(A: AbelianPGroup, field: FieldSpec, J):
    """Structure constants of the dual of F_q[A] with coproduct ``Delta(x) J``.

    Basis: delta functions on A.  Returns ``(M, unit)`` with ``M[i, j]`` the
    code vector of ``delta_i * delta_j``.
    """
    n = A.order
    J = np.asarray(J, dtype=np.int64).reshape(n, n)
    g = A.add_table
    f = field
    M = np.zeros((n, n, n), dtype=np.int64)
    # (delta_i * delta_j)(x) = sum_{a,b} J(a,b) [x+a = i][x+b = j]
    for x in range(n):
        for a in range(n):
            for b in range(n):
                if J[a, b]:
                    i, j = g[x, a], g[x, b]
                    M[i, j, x] = f.add[M[i, j, x], J[a, b]]
    unit = _solve_unit(field, M)
    return M, unit


def _solve_unit(field, M):
    n = M.shape[0]
    # unit u: sum_i u_i M[i, j] = e_j for all j  ->  linear system in u
    f = field
    rows = []
    rhs = []
    for j in range(n):
        for k in range(n):
            rows.append(M[:, j, k])
            rhs.append(1 if j == k else 0)
    aug = np.concatenate([np.array(rows), np.array(rhs)[:, None]], axis=1)
    R, piv = rref(f, aug, pivot_cols=n)
    if np.any(R[len(piv):, n]) or len(piv) < n:
        raise VerificationError("twisted dual algebra has no unit")
    u = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(piv):
        u[c] = R[r, n]
    return u


def torsor_decompose(A: AbelianPGroup, field: FieldSpec, J) -> list[int]:
    """Degrees over F_q of the field factors of the twisted dual algebra."""
    if not is_twist(A, field, J):
        raise MalformedInputError("J does not satisfy the twist equation")
    f = field
    n = A.order
    M, unit = twisted_dual_algebra(A, field, J)
    q = f.q
    # Frobenius-fixed subalgebra: kernel of b -> b^q - b (F_q-linear)
    cols = []
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        img = _algebra_pow(f, M, unit, e, q)
        cols.append(f.add[img, f.neg[e]])
    Phi = np.array(cols).T
    R, piv = rref(f, Phi)
    free = [c for c in range(n) if c not in piv]
    split = []
    for c in free:
        v = np.zeros(n, dtype=np.int64)
        v[c] = 1
        for r, pc in enumerate(piv):
            v[pc] = f.neg[R[r, c]]
        split.append(v)
    idems = [unit]
    for s in split:
        refined = []
        for e in idems:
            for c in range(q):
                shifted = f.add[s, f.neg[f.mul[c, unit]]]
                # 1 - (s - c)^(q-1) is the indicator of {s = c}
                ind = f.add[unit, f.neg[_algebra_pow(f, M, unit, shifted, q - 1)]]
                piece = _algebra_mul(f, M, e, ind)
                if piece.any():
                    refined.append(piece)
        idems = refined
    if len(idems) != len(split):
        raise VerificationError("idempotent splitting did not reach the split rank")
    degrees = []
    for e in idems:
        image = np.array([_algebra_mul(f, M, e, np.eye(n, dtype=np.int64)[i]) for i in range(n)])
        degrees.append(len(rref(f, image)[1]))
    if sum(degrees) != n:
        raise VerificationError(f"torsor degrees {degrees} do not sum to |A| = {n}")
    return sorted(degrees)


def class_order(A: AbelianPGroup, field: FieldSpec, J, classes: TwistClasses | None = None) -> int:
    """Order of the gauge class of J in the twist group."""
    alg = GroupAlgebraPowers(A, field)
    bounds = alg.differential(alg.normalized_cochains(1), 1)
    bound_set = set(_rows_index(bounds))
    J = np.asarray(J, dtype=np.int64).reshape(1, -1)
    acc, e = J, 1
    while acc[0].tobytes() not in bound_set:
        acc = alg.mul(acc, J, 2)
        e += 1
    return e


def hom_count_bruteforce(A: AbelianPGroup, B: AbelianPGroup) -> int:
    """Count homomorphisms A -> B by checking all images of the generators."""
    gens = []
    for k in range(len(A.exponents)):
        g = [0] * len(A.exponents)
        g[k] = 1
        gens.append(tuple(g))
    count = 0
    belems = B.elements
    for imgs in product(belems, repeat=len(gens)):
        ok = True
        for g, img, mod in zip(gens, imgs, A.moduli):
            # mod * img must vanish in B
            if any((mod * c) % bm for c, bm in zip(img, B.moduli)):
                ok = False
                break
        count += ok
    return count
