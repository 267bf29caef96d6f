"""Tensor powers of a finite-dimensional (co)algebra over a :class:`BaseRing`.

Raw tensors are integer arrays of shape ``(d,)*arity + (D,)`` where ``D`` is
the number of F_p coordinates of a ring element; leg 1 is the slowest axis.
:class:`TensorKernel` bundles the structure maps and performs products,
inverses and coface maps on such arrays; :class:`TensorElement` is the typed
public wrapper.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Sequence

import numpy as np

from .errors import CapacityError, MalformedInputError, NotInvertibleError, VerificationError
from .exactbase import BaseRing, rref, solve_linear

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
COCHAIN_ENTRY_BOUND = 2 ** 20


# -- ring-aware einsum ---------------------------------------------------------

@lru_cache(maxsize=4096)
def _path(spec, shapes):
    dummies = [np.empty(s, dtype=np.int8) for s in shapes]
    return np.einsum_path(spec, *dummies, optimize="greedy")[0]


def _einsum(spec, *ops):
    path = _path(spec, tuple(o.shape for o in ops))
    return np.einsum(spec, *ops, optimize=path)


def ring_einsum(ring: BaseRing, spec: str, *ops):
    """``np.einsum`` where every operand carries a trailing ring-coordinate axis.

    ``spec`` is written without the ring axes; products of coefficients go
    through the ring's structure tensor.
    """
    p = ring.p
    if ring.D == 1:
        res = _einsum(spec, *[np.asarray(o)[..., 0] for o in ops]) % p
        return np.asarray(res)[..., None]
    ins, out = spec.split("->")
    ins = ins.split(",")
    free = [c for c in _LETTERS if c not in spec]
    if len(ops) == 1:
        s = free[0]
        return _einsum(f"{ins[0]}{s}->{out}{s}", ops[0]) % p
    ring_letters = free[: len(ops)]
    chain = free[len(ops): 2 * len(ops) - 1]
    terms = [i + r for i, r in zip(ins, ring_letters)]
    operands = list(ops)
    prev = ring_letters[0]
    for k in range(1, len(ops)):
        terms.append(prev + ring_letters[k] + chain[k - 1])
        operands.append(ring.structure)
        prev = chain[k - 1]
    full = ",".join(terms) + "->" + out + prev
    return _einsum(full, *operands) % p


# -- typed tensors -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TensorElement:
    """An element of ``H^(x)arity`` with dense coefficients over ``ring``."""

    ring: BaseRing
    dim: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.int64) % self.ring.p
        if data.shape[-1:] != (self.ring.D,) or any(s != self.dim for s in data.shape[:-1]):
            raise MalformedInputError(
                f"tensor shape {data.shape} does not fit dim {self.dim} over {self.ring!r}")
        object.__setattr__(self, "data", data)

    @property
    def arity(self) -> int:
        return self.data.ndim - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficients as a ``(dim**arity, D)`` array, leg 1 slowest."""
        return self.data.reshape(-1, self.ring.D)

    @classmethod
    def from_coeffs(cls, ring, dim, arity, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.int64)
        if coeffs.ndim == 1:
            coeffs = ring.from_codes(coeffs)
        if coeffs.shape != (dim ** arity, ring.D):
            raise MalformedInputError(
                f"expected {dim ** arity} coefficients for arity {arity}, got {coeffs.shape[0]}")
        return cls(ring, dim, coeffs.reshape((dim,) * arity + (ring.D,)))

    def _wrap(self, data):
        return TensorElement(self.ring, self.dim, data)

    def __add__(self, other):
        return self._wrap(self.data + other.data)

    def __sub__(self, other):
        return self._wrap(self.data - other.data)

    def __neg__(self):
        return self._wrap(-self.data)

    def __eq__(self, other):
        return isinstance(other, TensorElement) and self.ring == other.ring and (
            np.array_equal(self.data, other.data))

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.data.any()

    def permute(self, sigma) -> "TensorElement":
        return permute_legs(self, sigma)

    def format(self, names: Sequence[str] | None = None) -> str:
        return format_tensor(self.ring, self.data, names)

    def __repr__(self):
        return f"TensorElement(arity={self.arity}, {self.format()})"


def format_tensor(ring: BaseRing, data, names=None) -> str:
    data = np.asarray(data)
    d = data.shape[0] if data.ndim > 1 else 1
    if names is None:
        names = [f"e{i}" for i in range(d)]
    arity = data.ndim - 1
    terms = []
    for idx in product(range(d), repeat=arity):
        c = data[idx]
        if not c.any():
            continue
        word = "⊗".join(names[i] for i in idx) if arity else "1"
        coeff = ring.format(c)
        if coeff == "1":
            terms.append(word)
        elif "+" in coeff:
            terms.append(f"({coeff})·{word}")
        else:
            terms.append(f"{coeff}·{word}")
    return " + ".join(terms) if terms else "0"


def _raw(x):
    return x.data if isinstance(x, TensorElement) else np.asarray(x)


def _parse_perm(sigma, arity):
    if isinstance(sigma, str):
        sigma = [int(c) for c in sigma]
    sigma = list(sigma)
    if sorted(sigma) == list(range(arity)):
        perm = sigma
    elif sorted(sigma) == list(range(1, arity + 1)):
        perm = [s - 1 for s in sigma]
    else:
        raise MalformedInputError(f"{sigma} is not a permutation of {arity} legs")
    return perm


def permute_legs(x, sigma):
    """Slot j of the result receives leg ``sigma(j)`` of ``x`` (1-based words like ``"312"``)."""
    data = _raw(x)
    arity = data.ndim - 1
    perm = _parse_perm(sigma, arity)
    out = np.transpose(data, perm + [arity])
    if isinstance(x, TensorElement):
        return x._wrap(out)
    return out


def _perm_sum(x, perms, p):
    data = _raw(x)
    if data.ndim != 4:
        raise MalformedInputError("expected a 3-tensor")
    out = sum(np.transpose(data, list(s) + [3]) for s in perms)
    if isinstance(x, TensorElement):
        return x._wrap(out)
    return out % p


def alt3(x, p: int = 2):
    """Sum of all six leg permutations of a 3-tensor (``p`` reduces raw arrays)."""
    return _perm_sum(x, permutations(range(3)), p)


def cyc3(x, p: int = 2):
    """``x_123 + x_312 + x_231``."""
    return _perm_sum(x, ([0, 1, 2], [2, 0, 1], [1, 2, 0]), p)


# -- the kernel ----------------------------------------------------------------

class TensorKernel:
    """Products, inverses and coface maps on tensor powers of one structure.

    ``mul[a, b]`` is the coefficient vector of ``e_a e_b``; ``delta[a]`` the
    2-tensor ``Delta(e_a)``; ``unit`` and ``counit`` are ``(d, D)`` arrays.
    Leg-wise maps accept arbitrary leading batch axes.
    """

    def __init__(self, ring: BaseRing, mul, unit, delta, counit):
        self.ring = ring
        self.mul_table = np.asarray(mul, dtype=np.int64)
        self.unit = np.asarray(unit, dtype=np.int64)
        self.delta = np.asarray(delta, dtype=np.int64)
        self.counit = np.asarray(counit, dtype=np.int64)
        self.d = self.unit.shape[0]
        S = np.asarray(ring.structure, dtype=np.int64)
        p = ring.p
        # structure maps with the ring multiplication folded in: the second
        # index is the ring coordinate of the incoming coefficient
        self._S = S
        self._mul_op = np.einsum("abkw,uwv->abukv", self.mul_table, S) % p
        self._left_op = np.einsum("abkw,swv->asbkv", self.mul_table, S) % p
        self._delta_op = np.einsum("abcw,swv->asbcv", self.delta, S) % p
        self._counit_op = np.einsum("aw,swv->asv", self.counit, S) % p
        self._unit_op = np.einsum("aw,swv->sav", self.unit, S) % p

    def reduce(self, x):
        return np.asarray(x) % self.ring.p

    def zero(self, arity: int):
        return np.zeros((self.d,) * arity + (self.ring.D,), dtype=np.int64)

    def one(self, arity: int):
        out = np.zeros((self.d,) * arity + (self.ring.D,), dtype=np.int64)
        out[(0,) * arity] = self.ring.one()
        if arity == 0:
            return out
        out = self.unit
        for _ in range(arity - 1):
            out = self.outer(out, self.unit)
        return out

    def scalar(self, c, arity: int):
        c = np.asarray(c, dtype=np.int64)
        op = np.tensordot(c, self._S, axes=([0], [1]))  # (s, v)
        return np.tensordot(self.one(arity), op, axes=([-1], [0])) % self.ring.p

    def outer(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        xs = np.tensordot(x, self._S, axes=([-1], [0]))  # (a..., t, u)
        out = np.tensordot(xs, y, axes=([x.ndim - 1], [y.ndim - 1]))  # (a..., u, b...)
        return np.moveaxis(out, x.ndim - 1, -1) % self.ring.p

    def element_tensor(self, elems):
        """``x_1 (x) x_2 (x) ...`` from a list of elements of H."""
        out = np.asarray(elems[0])
        for e in elems[1:]:
            out = self.outer(out, np.asarray(e))
        return out

    def mult(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        n = x.ndim - 1
        p = self.ring.p
        if n == 0:
            return np.tensordot(np.tensordot(x, self._S, axes=([0], [0])), y,
                                axes=([0], [0])) % p
        t = self.outer(x, y)  # (a..., b..., u)
        for j in range(n):
            t = np.tensordot(t, self._mul_op, axes=([0, n - j, t.ndim - 1], [0, 1, 2])) % p
        return t

    def mult_many(self, *xs):
        out = xs[0]
        for x in xs[1:]:
            out = self.mult(out, x)
        return out

    def left_matrix(self, x):
        """Matrix ``M[k, b]`` of ``y -> x y`` on flattened coordinates."""
        x = np.asarray(x, dtype=np.int64)
        n = x.ndim - 1
        p = self.ring.p
        t = x
        for _ in range(n):
            t = np.tensordot(t, self._left_op, axes=([0, t.ndim - 1], [0, 1])) % p
        # axes are now (b1, k1, b2, k2, ..., v)
        order = [2 * j + 1 for j in range(n)] + [2 * j for j in range(n)] + [2 * n]
        size = self.d ** n
        return np.ascontiguousarray(np.transpose(t, order)).reshape(size, size, self.ring.D)

    def inv(self, x):
        arity = x.ndim - 1
        n = self.d ** arity
        sol = solve_linear(self.ring, self.left_matrix(x), self.one(arity).reshape(n, self.ring.D))
        if sol is None:
            raise NotInvertibleError("tensor is not invertible")
        y = sol.solution.reshape(x.shape)
        if not np.array_equal(self.mult(y, x), self.one(arity)):
            raise NotInvertibleError("tensor has a right inverse only")
        return y

    def is_invertible(self, x) -> bool:
        try:
            self.inv(x)
        except NotInvertibleError:
            return False
        return True

    # leg maps; ``arity`` counts the tensor legs, leading axes are batch
    def _axis(self, x, leg, arity):
        return x.ndim - 1 - arity + leg

    def apply_delta(self, x, leg: int, arity: int):
        """Apply Delta to leg ``leg`` (0-based); arity grows by one."""
        x = np.asarray(x, dtype=np.int64)
        ax = self._axis(x, leg, arity)
        out = np.tensordot(x, self._delta_op, axes=([ax, x.ndim - 1], [0, 1]))
        return np.moveaxis(out, [-3, -2], [ax, ax + 1]) % self.ring.p

    def apply_counit(self, x, leg: int, arity: int):
        x = np.asarray(x, dtype=np.int64)
        ax = self._axis(x, leg, arity)
        return np.tensordot(x, self._counit_op, axes=([ax, x.ndim - 1], [0, 1])) % self.ring.p

    def insert_unit(self, x, slot: int, arity: int):
        """Put ``1`` into slot ``slot`` (0-based) of an arity-``arity`` tensor."""
        x = np.asarray(x, dtype=np.int64)
        out = np.tensordot(x, self._unit_op, axes=([-1], [0]))
        return np.moveaxis(out, -2, self._axis(x, slot, arity)) % self.ring.p

    def apply_map(self, x, leg: int, arity: int, matrix):
        """Apply a linear map ``matrix[a, b]`` (e_a -> sum_b matrix[a,b] e_b) on one leg."""
        x = np.asarray(x, dtype=np.int64)
        op = np.einsum("abw,swv->asbv", np.asarray(matrix, dtype=np.int64), self._S)
        ax = self._axis(x, leg, arity)
        out = np.tensordot(x, op, axes=([ax, x.ndim - 1], [0, 1]))
        return np.moveaxis(out, -2, ax) % self.ring.p

    def coface(self, x, j: int, arity: int):
        if j == 0:
            return self.insert_unit(x, 0, arity)
        if j == arity + 1:
            return self.insert_unit(x, arity, arity)
        return self.apply_delta(x, j - 1, arity)

    def differential(self, x, arity: int):
        """Additive cobar differential ``sum_j (-1)^j coface_j``."""
        out = None
        for j in range(arity + 2):
            term = self.coface(x, j, arity)
            if j % 2:
                term = -term
            out = term if out is None else out + term
        return out % self.ring.p

    def counit_residuals(self, x, arity: int):
        """Legs on which applying the counit does not give zero."""
        return [leg for leg in range(arity) if self.apply_counit(x, leg, arity).any()]


def as_kernel(H) -> TensorKernel:
    if isinstance(H, TensorKernel):
        return H
    kernel = getattr(H, "kernel", None)
    if kernel is None:
        raise MalformedInputError(f"{type(H).__name__} has no coalgebra structure")
    return kernel


# -- Gamma^2, wedge^2, Frobenius twist ------------------------------------------

@dataclass(frozen=True)
class SymDecomposition:
    """Bases of ``wedge^2 V <= Gamma^2 V <= V (x) V`` in char 2.

    ``V^(1)`` is given the basis of classes ``[e_a (x) e_a]``, so ``pi``
    reads off the diagonal.
    """

    dim: int
    ring: BaseRing
    wedge: np.ndarray
    gamma: np.ndarray
    pi_matrix: np.ndarray

    @property
    def dims(self):
        return (len(self.wedge), len(self.gamma), self.pi_matrix.shape[0])


def sym_decompose(dim: int, ring: BaseRing) -> SymDecomposition:
    if ring.p != 2:
        raise MalformedInputError("the Gamma^2 / wedge^2 split is implemented in characteristic 2")
    n, D = dim, ring.D
    wedge, gamma = [], []
    for a in range(n):
        e = np.zeros((n, n, D), dtype=np.int64)
        e[a, a] = ring.one()
        gamma.append(e)
    for a in range(n):
        for b in range(a + 1, n):
            e = np.zeros((n, n, D), dtype=np.int64)
            e[a, b] = ring.one()
            e[b, a] = ring.one()
            wedge.append(e)
            gamma.append(e)
    pi = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        pi[a, a, a] = 1
    empty = np.zeros((0, n, n, D), dtype=np.int64)
    return SymDecomposition(n, ring, np.array(wedge).reshape(-1, n, n, D) if wedge else empty,
                            np.array(gamma), pi)


def flip_residual(x):
    data = _raw(x)
    return data + np.swapaxes(data, 0, 1)


def pi_apply(sd: SymDecomposition, x):
    """Coordinates of ``pi(x)`` in ``V^(1)`` for ``x`` in ``Gamma^2 V``."""
    data = _raw(x)
    res = flip_residual(data) % sd.ring.p
    if res.any():
        raise VerificationError("tensor is not in Gamma^2 (nonzero (id+tau)x)", res)
    idx = np.arange(sd.dim)
    return data[idx, idx] % sd.ring.p


def frobenius_root(sd: SymDecomposition, c):
    """The vector ``v`` with ``pi(v (x) v) = c``."""
    f = sd.ring.field
    if not sd.ring.is_field:
        raise MalformedInputError("square roots need a field base")
    codes = sd.ring.codes(np.asarray(c))
    return sd.ring.from_codes(f.sqrt(codes))


def psi_apply(sd: SymDecomposition, x):
    """``pi (x) id`` on a 3-tensor whose first two legs are symmetric."""
    data = _raw(x)
    res = (data + np.swapaxes(data, 0, 1)) % sd.ring.p
    if res.any():
        raise VerificationError("first two legs are not in Gamma^2", res)
    idx = np.arange(sd.dim)
    return data[idx, idx] % sd.ring.p


# -- Cartier complex -------------------------------------------------------------

def cartier_d(H, x, check_normalized: bool = True):
    """``d x = 1(x)x - sum_j (Delta on leg j) x + ... +- x(x)1`` (no signs in char 2)."""
    k = as_kernel(H)
    data = _raw(x)
    arity = data.ndim - 1
    if check_normalized:
        bad = k.counit_residuals(data, arity)
        if bad:
            raise MalformedInputError(
                f"cochain is not normalized: counit on leg {bad[0] + 1} is nonzero")
    out = k.differential(data, arity)
    if isinstance(x, TensorElement):
        return TensorElement(x.ring, x.dim, out)
    return out


def _augmentation_basis(k: TensorKernel):
    ring = k.ring
    if not ring.is_field:
        raise MalformedInputError("cochain cohomology needs a field base")
    codes = ring.codes(k.counit)
    R, piv = rref(ring.field, codes[None, :])
    basis = []
    for c in range(k.d):
        if c in piv:
            continue
        v = np.zeros(k.d, dtype=np.int64)
        v[c] = 1
        for r, pc in enumerate(piv):
            v[pc] = ring.field.neg[R[r, c]]
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), k.d)


def normalized_cochain_basis(H, arity: int):
    """Basis of ``(ker eps)^(x)arity`` as a batch of tensors."""
    k = as_kernel(H)
    ring = k.ring
    aug = _augmentation_basis(k)
    if arity == 0:
        return k.one(0)[None]
    count = len(aug) ** arity
    if count * k.d ** (arity + 1) > COCHAIN_ENTRY_BOUND:
        raise CapacityError(f"{count} cochains of arity {arity} in dimension {k.d}")
    f = ring.field
    out = aug
    for _ in range(arity - 1):
        out = _code_outer(f, out, aug)
    out = out.reshape((count,) + (k.d,) * arity)
    return ring.from_codes(out)


def _code_outer(f, x, y):
    # x: (m, ...), y: (n, d)  ->  (m*n, ..., d) with entries x*y in F_q codes
    m, n = x.shape[0], y.shape[0]
    xs = x.reshape(m, 1, -1, 1)
    ys = y.reshape(1, n, 1, -1)
    prod_ = f.mul[xs, ys]
    return prod_.reshape((m * n,) + x.shape[1:] + (y.shape[1],))


def _span_rank(ring, vecs):
    if len(vecs) == 0:
        return 0
    flat = ring.codes(np.asarray(vecs).reshape(len(vecs), -1, ring.D))
    return len(rref(ring.field, flat)[1])


@dataclass
class CochainCohomology:
    degree: int
    dim_cochains: int
    dim_cocycles: int
    dim_coboundaries: int
    representatives: np.ndarray

    @property
    def dim(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries


def cochain_cohomology(H, i: int) -> CochainCohomology:
    """Dimensions of Z^i, B^i, H^i of the normalized complex plus representatives."""
    k = as_kernel(H)
    ring = k.ring
    f = ring.field
    basis = normalized_cochain_basis(k, i)
    n = len(basis)
    images = k.differential(basis, i)
    img_codes = ring.codes(images.reshape(n, -1, ring.D))
    # kernel of d_i in cochain coordinates: left nullspace of the image rows
    R, piv = rref(f, img_codes.T)
    null = []
    for c in range(n):
        if c in piv:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[c] = 1
        for r, pc in enumerate(piv):
            v[pc] = f.neg[R[r, c]]
        null.append(v)
    basis_codes = ring.codes(basis.reshape(n, -1, ring.D))
    cocycles = [_combine(f, v, basis_codes) for v in null]
    if i > 0:
        prev = normalized_cochain_basis(k, i - 1)
        bimg = k.differential(prev, i - 1)
        bcodes = list(ring.codes(bimg.reshape(len(prev), -1, ring.D)))
    else:
        bcodes = []
    dim_b = len(rref(f, np.array(bcodes))[1]) if bcodes else 0
    reps = []
    current = [row for row in rref(f, np.array(bcodes))[0][:dim_b]] if bcodes else []
    r = dim_b
    for z in cocycles:
        trial = np.array(current + [z])
        rt = len(rref(f, trial)[1])
        if rt > r:
            current.append(z)
            r = rt
            reps.append(z)
    shape = (len(reps),) + (k.d,) * i + (ring.D,)
    rep_arr = ring.from_codes(np.array(reps, dtype=np.int64).reshape(len(reps), -1)).reshape(
        shape) if reps else np.zeros(shape, dtype=np.int64)
    return CochainCohomology(i, n, len(cocycles), dim_b, rep_arr)


def _combine(f, coeffs, rows):
    out = np.zeros(rows.shape[1], dtype=np.int64)
    for c, row in zip(coeffs, rows):
        if c:
            out = f.add[out, f.mul[c, row]]
    return out


def solve_coboundary(H, target, candidates):
    """Find ``f`` in the span of ``candidates`` with ``d f = target``, or ``None``.

    ``candidates`` is a batch of cochains; the returned ``f`` is the
    combination chosen by the deterministic pivot rule.
    """
    k = as_kernel(H)
    ring = k.ring
    arity = candidates.ndim - 2
    n = len(candidates)
    if n == 0:
        return None if _raw(target).any() else np.zeros(candidates.shape[1:], dtype=np.int64)
    images = k.differential(candidates, arity)
    M = images.reshape(n, -1, ring.D).transpose(1, 0, 2)
    sol = solve_linear(ring, M, _raw(target).reshape(-1, ring.D))
    if sol is None:
        return None
    return ring_einsum(ring, "n,n...->...", sol.solution, candidates.reshape(n, -1, ring.D)
                       ).reshape(candidates.shape[1:]) if ring.D > 1 else (
        np.einsum("n,n...->...", sol.solution[:, 0], candidates) % ring.p)


def beta_cocycle(r: int):
    """The divided-power datum D_r and ``beta = sum_l y^(l) (x) y^(2^r - l)``."""
    if not 1 <= r <= 4:
        raise MalformedInputError("r must lie in 1..4")
    from .quasihopf import divided_power

    H = divided_power(r)
    n = 2 ** r
    beta = np.zeros((n, n, 1), dtype=np.int64)
    for l in range(1, n):
        beta[l, n - l, 0] = 1
    return H, TensorElement(H.ring, n, beta)
