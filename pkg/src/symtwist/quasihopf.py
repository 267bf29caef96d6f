"""Finite-dimensional quasi-Hopf data with an R-matrix over an exact base ring.

A :class:`QuasiHopfDatum` stores structure constants in a fixed basis:
``mul[a, b]`` and ``delta[a]`` are coefficient vectors / 2-tensors, ``phi``
and ``R`` are raw tensors (see :mod:`symtwist.tensorops` for the layout).
Pseudotwists (no counit normalization) are allowed; the unit constraints
they induce are recovered from ``(id (x) eps (x) id)(Phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import product
from math import comb

import numpy as np

from .errors import MalformedInputError, NotInvertibleError, VerificationError
from .exactbase import BaseRing, make_field, prime_ring, rref, solve_linear
from .tensorops import TensorElement, TensorKernel, format_tensor, ring_einsum

CONVENTIONS = {
    "quasi_coassociativity": "(id⊗Δ)Δ(h)·Φ = Φ·(Δ⊗id)Δ(h)",
    "pentagon": "(id⊗id⊗Δ)(Φ)(Δ⊗id⊗id)(Φ) = (1⊗Φ)(id⊗Δ⊗id)(Φ)(Φ⊗1)",
    "hexagon_1": "(Δ⊗id)(R) = Φ^{312} R13 (Φ^{132})^{-1} R23 Φ",
    "hexagon_2": "(id⊗Δ)(R) = (Φ^{231})^{-1} R13 Φ^{213} R12 Φ^{-1}",
    "twist": "Φ^J = (1⊗J)(id⊗Δ)(J) Φ (Δ⊗id)(J)^{-1} (J⊗1)^{-1}, R^J = J21 R J^{-1}",
}
"""Axiom conventions.  ``Φ^{ijk}`` places the k-th tensor factor of Φ into
slot ``(ijk)[k]``; e.g. ``Φ^{312} = Σ Y⊗Z⊗X`` for ``Φ = Σ X⊗Y⊗Z``."""


def place_legs(x, word):
    """Put tensor factor k of ``x`` into slot ``word[k]`` (1-based digits)."""
    slots = [int(c) - 1 for c in word]
    arity = len(slots)
    inverse = [0] * arity
    for leg, slot in enumerate(slots):
        inverse[slot] = leg
    return np.transpose(x, inverse + [arity])


class QuasiHopfDatum:
    """``(H, m, 1, Delta, eps, Phi, R)`` in a fixed basis of H."""

    def __init__(self, ring: BaseRing, mul, unit, delta, counit, phi=None, R=None,
                 basis_names=None, name: str = ""):
        self.ring = ring
        D = ring.D
        self.mul = np.asarray(mul, dtype=np.int64) % ring.p
        self.unit = np.asarray(unit, dtype=np.int64) % ring.p
        self.delta = np.asarray(delta, dtype=np.int64) % ring.p
        self.counit = np.asarray(counit, dtype=np.int64) % ring.p
        d = self.unit.shape[0] if self.unit.ndim == 2 else -1
        self.dim = d
        expect = {"unit": (d, D), "mul": (d, d, d, D), "delta": (d, d, d, D), "counit": (d, D)}
        for key, shape in expect.items():
            if getattr(self, key).shape != shape:
                raise MalformedInputError(
                    f"field '{key}' has shape {getattr(self, key).shape}, expected {shape}")
        self.kernel = TensorKernel(ring, self.mul, self.unit, self.delta, self.counit)
        self.phi = self.kernel.one(3) if phi is None else np.asarray(phi, dtype=np.int64) % ring.p
        self.R = self.kernel.one(2) if R is None else np.asarray(R, dtype=np.int64) % ring.p
        if self.phi.shape != (d,) * 3 + (D,):
            raise MalformedInputError(f"field 'phi' has shape {self.phi.shape}")
        if self.R.shape != (d,) * 2 + (D,):
            raise MalformedInputError(f"field 'r' has shape {self.R.shape}")
        self.basis_names = list(basis_names) if basis_names else [f"e{i}" for i in range(d)]
        if len(self.basis_names) != d:
            raise MalformedInputError("basis_names length differs from dim")
        self.name = name
        self._check_unit_laws()

    def _check_unit_laws(self):
        eye = np.zeros((self.dim, self.dim, self.ring.D), dtype=np.int64)
        for a in range(self.dim):
            eye[a, a] = self.ring.one()
        left = ring_einsum(self.ring, "u,uab->ab", self.unit, self.mul)
        right = ring_einsum(self.ring, "u,aub->ab", self.unit, self.mul)
        if not (np.array_equal(left, eye) and np.array_equal(right, eye)):
            raise MalformedInputError("'unit' is not a two-sided unit for 'mul'")
        if not np.array_equal(ring_einsum(self.ring, "a,a->", self.unit, self.counit),
                              self.ring.one()):
            raise MalformedInputError("counit does not send the unit to 1")

    # typed views
    @property
    def Phi(self) -> TensorElement:
        return TensorElement(self.ring, self.dim, self.phi)

    @property
    def Rmat(self) -> TensorElement:
        return TensorElement(self.ring, self.dim, self.R)

    def replace(self, **changes) -> "QuasiHopfDatum":
        kw = dict(ring=self.ring, mul=self.mul, unit=self.unit, delta=self.delta,
                  counit=self.counit, phi=self.phi, R=self.R,
                  basis_names=self.basis_names, name=self.name)
        kw.update(changes)
        return QuasiHopfDatum(**kw)

    def same_as(self, other: "QuasiHopfDatum") -> bool:
        return (self.ring == other.ring and self.dim == other.dim
                and all(np.array_equal(getattr(self, f), getattr(other, f))
                        for f in ("mul", "unit", "delta", "counit", "phi", "R")))

    def element(self, coeffs):
        """An element of H from a list of ring codes."""
        return self.ring.from_codes(np.asarray(coeffs, dtype=np.int64))

    def basis_vector(self, a: int):
        e = np.zeros((self.dim, self.ring.D), dtype=np.int64)
        e[a] = self.ring.one()
        return e

    def format(self, x) -> str:
        return format_tensor(self.ring, x, self.basis_names)

    def change_basis(self, P, names=None) -> "QuasiHopfDatum":
        """Re-express in the basis whose vectors are the rows of ``P``."""
        ring = self.ring
        P = np.asarray(P, dtype=np.int64)
        if P.ndim == 2:
            P = ring.from_codes(P)
        Q = matrix_inverse(ring, P)
        re = lambda spec, *ops: ring_einsum(ring, spec, *ops)
        mul = re("ai,bj,ijk,kc->abc", P, P, self.mul, Q)
        delta = re("ai,ijk,jb,kc->abc", P, self.delta, Q, Q)
        unit = re("i,ia->a", self.unit, Q)
        counit = re("ai,i->a", P, self.counit)
        phi = re("ijk,ia,jb,kc->abc", self.phi, Q, Q, Q)
        R = re("ij,ia,jb->ab", self.R, Q, Q)
        return QuasiHopfDatum(ring, mul, unit, delta, counit, phi, R,
                              names or [f"b{i}" for i in range(self.dim)], self.name)

    def fiber(self) -> "QuasiHopfDatum":
        """Reduction modulo h (the datum over the residue field)."""
        if self.ring.is_field:
            return self
        m = self.ring.m
        base = BaseRing(self.ring.field, 1)
        cut = lambda x: x[..., :m]
        return QuasiHopfDatum(base, cut(self.mul), cut(self.unit), cut(self.delta),
                              cut(self.counit), cut(self.phi), cut(self.R),
                              self.basis_names, self.name)

    def __repr__(self):
        return f"QuasiHopfDatum({self.name or 'unnamed'}, dim={self.dim}, {self.ring!r})"


def matrix_inverse(ring: BaseRing, P):
    """Inverse of a square matrix given as ``(n, n, D)``."""
    n = P.shape[0]
    eye = np.zeros((n, n, ring.D), dtype=np.int64)
    for a in range(n):
        eye[a, a] = ring.one()
    cols = []
    # P^T y = e_a for the columns of Q^T
    PT = np.transpose(P, (1, 0, 2))
    for a in range(n):
        sol = solve_linear(ring, PT, eye[a])
        if sol is None or len(sol.nullspace):
            raise NotInvertibleError("change-of-basis matrix is singular")
        cols.append(sol.solution)
    # cols[a] = row a of Q, with Q P = 1 read as sum_i Q[a, i] P[i, b] = [a = b]
    Q = np.array(cols)
    check = ring_einsum(ring, "ai,ib->ab", Q, P)
    if not np.array_equal(check, eye):
        raise NotInvertibleError("change-of-basis matrix is singular")
    return Q


# -- constructors --------------------------------------------------------------

def _basis_element(ring, d, a):
    e = np.zeros((d, ring.D), dtype=np.int64)
    e[a] = ring.one()
    return e


def _empty(ring, d, arity):
    return np.zeros((d,) * arity + (ring.D,), dtype=np.int64)


def _cyclic_group(orders):
    orders = [int(o) for o in orders if int(o) > 1]
    elems = list(product(*[range(o) for o in orders])) if orders else [()]
    index = {e: i for i, e in enumerate(elems)}

    def add(x, y):
        return index[tuple((a + b) % o for a, b, o in zip(x, y, orders))]

    return elems, index, add, orders


def _group_label(orders):
    return "⊕".join(f"Z/{o}" for o in orders) or "0"


def group_algebra(orders=(2,), ring: BaseRing | None = None) -> QuasiHopfDatum:
    """``k[A]`` for ``A = (+) Z/o_i``, group-likes as basis, ``Phi = 1``, ``R = 1``."""
    if isinstance(orders, int):
        orders = (orders,)
    if hasattr(orders, "moduli"):
        orders = orders.moduli
    ring = ring or prime_ring(2)
    elems, index, add, orders = _cyclic_group(orders)
    d = len(elems)
    mul = _empty(ring, d, 3)
    delta = _empty(ring, d, 3)
    counit = np.zeros((d, ring.D), dtype=np.int64)
    for i, x in enumerate(elems):
        counit[i] = ring.one()
        delta[i, i, i] = ring.one()
        for j, y in enumerate(elems):
            mul[i, j, add(x, y)] = ring.one()
    names = ["1"] + [f"g{''.join(map(str, x))}" if len(x) > 1 else f"g^{x[0]}" for x in elems[1:]]
    if len(orders) == 1 and orders[0] == 2:
        names = ["1", "g"]
    return QuasiHopfDatum(ring, mul, _basis_element(ring, d, 0), delta, counit,
                          basis_names=names, name=f"group_algebra({_group_label(orders)})")


def function_algebra(orders=(2,), ring: BaseRing | None = None) -> QuasiHopfDatum:
    """Functions on A with the delta-function basis."""
    if isinstance(orders, int):
        orders = (orders,)
    if hasattr(orders, "moduli"):
        orders = orders.moduli
    ring = ring or prime_ring(2)
    elems, index, add, orders = _cyclic_group(orders)
    d = len(elems)
    mul = _empty(ring, d, 3)
    delta = _empty(ring, d, 3)
    unit = np.zeros((d, ring.D), dtype=np.int64)
    for i, x in enumerate(elems):
        mul[i, i, i] = ring.one()
        unit[i] = ring.one()
        for j, y in enumerate(elems):
            delta[add(x, y), i, j] = ring.one()
    counit = _basis_element(ring, d, 0)
    names = [f"δ{''.join(map(str, x))}" for x in elems]
    return QuasiHopfDatum(ring, mul, unit, delta, counit, basis_names=names,
                          name=f"function_algebra({_group_label(orders)})")


def _dual_numbers(ring, name, R_dd: bool):
    d = 2
    mul = _empty(ring, d, 3)
    mul[0, 0, 0] = mul[0, 1, 1] = mul[1, 0, 1] = ring.one()
    delta = _empty(ring, d, 3)
    delta[0, 0, 0] = ring.one()
    delta[1, 1, 0] = delta[1, 0, 1] = ring.one()
    counit = _basis_element(ring, d, 0)
    R = _empty(ring, d, 2)
    R[0, 0] = ring.one()
    if R_dd:
        R[1, 1] = ring.one()
    return QuasiHopfDatum(ring, mul, _basis_element(ring, d, 0), delta, counit, R=R,
                          basis_names=["1", "d"], name=name)


def alpha2(ring: BaseRing | None = None) -> QuasiHopfDatum:
    """``k[d]/(d^2)`` with ``d`` primitive and ``R = 1 (x) 1``."""
    return _dual_numbers(ring or prime_ring(2), "alpha2", False)


def category_D(ring: BaseRing | None = None) -> QuasiHopfDatum:
    """``k[d]/(d^2)`` with ``d`` primitive and ``R = 1 (x) 1 + d (x) d``."""
    return _dual_numbers(ring or prime_ring(2), "category_D", True)


def divided_power(r: int, ring: BaseRing | None = None) -> QuasiHopfDatum:
    """Dual of ``k[x]/(x^(2^r))`` with x primitive: basis ``y^(0..2^r-1)``."""
    if r < 1:
        raise MalformedInputError("divided_power needs r >= 1")
    ring = ring or prime_ring(2)
    n = 2 ** r
    mul = _empty(ring, n, 3)
    delta = _empty(ring, n, 3)
    for a in range(n):
        for b in range(n):
            if a + b < n and comb(a + b, a) % ring.p:
                mul[a, b, a + b] = ring.scalar(comb(a + b, a))
        for b in range(a + 1):
            delta[a, b, a - b] = ring.one()
    names = ["1"] + [f"y({l})" for l in range(1, n)]
    return QuasiHopfDatum(ring, mul, _basis_element(ring, n, 0), delta,
                          _basis_element(ring, n, 0), basis_names=names,
                          name=f"divided_power({r})")


def deformed_D(h_trunc: int = 2) -> QuasiHopfDatum:
    """First-order deformation of the category D over ``F_2[h]/(h^h_trunc)``."""
    if h_trunc < 2:
        raise MalformedInputError("deformed_D needs h_trunc >= 2")
    ring = BaseRing(make_field(2), h_trunc)
    base = category_D(ring)
    h = ring.h()
    delta = base.delta.copy()
    delta[1, 1, 1] = h
    phi = base.kernel.one(3)
    phi[1, 1, 1] = h
    return base.replace(delta=delta, phi=phi, name=f"deformed_D({h_trunc})")


def tensor_product(A: QuasiHopfDatum, B: QuasiHopfDatum, name: str = "") -> QuasiHopfDatum:
    """``A (x) B`` with interleaved Phi and R; basis index ``i * dim(B) + j``."""
    if A.ring != B.ring:
        raise MalformedInputError("tensor factors live over different rings")
    ring = A.ring
    dA, dB = A.dim, B.dim
    re = lambda spec, *ops: ring_einsum(ring, spec, *ops)
    mul = re("acx,bdy->abcdxy", A.mul, B.mul).reshape(dA * dB, dA * dB, dA * dB, ring.D)
    delta = re("axy,buv->abxuyv", A.delta, B.delta).reshape(dA * dB, dA * dB, dA * dB, ring.D)
    unit = re("a,b->ab", A.unit, B.unit).reshape(dA * dB, ring.D)
    counit = re("a,b->ab", A.counit, B.counit).reshape(dA * dB, ring.D)
    phi = re("ace,bdf->abcdef", A.phi, B.phi).reshape((dA * dB,) * 3 + (ring.D,))
    R = re("ac,bd->abcd", A.R, B.R).reshape((dA * dB,) * 2 + (ring.D,))
    names = [_join_names(x, y) for x in A.basis_names for y in B.basis_names]
    return QuasiHopfDatum(ring, mul, unit, delta, counit, phi, R, names,
                          name or f"{A.name}⊗{B.name}")


def _join_names(x, y):
    if x == "1":
        return y
    if y == "1":
        return x
    return x + y


def alpha2_pair() -> QuasiHopfDatum:
    """``F_2[a, b]/(a^2, b^2)``, a and b primitive, ``R = 1 + a (x) a``."""
    D = category_D()
    H = tensor_product(D, alpha2(), name="alpha2_pair")
    return H.replace(basis_names=["1", "b", "a", "ab"])


CONSTRUCTORS = {
    "group_algebra": group_algebra,
    "function_algebra": function_algebra,
    "alpha2": alpha2,
    "category_D": category_D,
    "divided_power": divided_power,
    "deformed_D": deformed_D,
    "alpha2_pair": alpha2_pair,
}


def constructors(kind: str, *args, **kwargs) -> QuasiHopfDatum:
    try:
        fn = CONSTRUCTORS[kind]
    except KeyError:
        raise MalformedInputError(f"unknown datum kind {kind!r}") from None
    return fn(*args, **kwargs)


# -- structure maps on tensors -----------------------------------------------------

def unit_constraints(D: QuasiHopfDatum):
    """``(lam, rho)`` with ``(id (x) eps (x) id)(Phi) = rho^-1 (x) lam``, or ``None``."""
    k = D.kernel
    X = k.apply_counit(D.phi, 1, 3)
    ring = D.ring
    for i, j in product(range(D.dim), repeat=2):
        if ring.is_unit(X[i, j]):
            break
    else:
        return None
    c = ring.inv(X[i, j])
    a = ring_einsum(ring, "x,->x", X[:, j], c)
    b = X[i, :]
    if not np.array_equal(k.outer(a, b), X):
        return None
    try:
        rho = k.inv(a)
        k.inv(b)
    except NotInvertibleError:
        return None
    return b, rho


def _conj(k, u, x, uinv=None):
    uinv = k.inv(u) if uinv is None else uinv
    return k.mult_many(u, x, uinv)


@dataclass
class AxiomReport:
    """Exact residual tensors; an axiom holds iff its residual is zero."""

    residuals: dict = dc_field(default_factory=dict)

    @property
    def failing(self):
        return [name for name, r in self.residuals.items() if r is None or np.any(r)]

    @property
    def ok(self) -> bool:
        return not self.failing

    def lines(self):
        for name, r in self.residuals.items():
            status = "ok" if (r is not None and not np.any(r)) else "FAIL"
            yield f"{name}: {status}"


def _per_basis(D, fn):
    return np.stack([fn(D.basis_vector(a)) for a in range(D.dim)])


def check_axioms(D: QuasiHopfDatum) -> AxiomReport:
    k, ring = D.kernel, D.ring
    one2 = k.one(2)
    res = {}
    re = lambda spec, *ops: ring_einsum(ring, spec, *ops)
    res["associativity"] = (re("abk,kcl->abcl", D.mul, D.mul)
                            - re("bck,akl->abcl", D.mul, D.mul)) % ring.p
    delta_of_products = re("abk,kxy->abxy", D.mul, D.delta)
    products_of_delta = re("axy,bzw,xzk,ywl->abkl", D.delta, D.delta, D.mul, D.mul)
    res["delta_multiplicative"] = (delta_of_products - products_of_delta) % ring.p
    res["delta_unit"] = (k.apply_delta(D.unit, 0, 1) - one2) % ring.p
    res["counit_multiplicative"] = (re("abk,k->ab", D.mul, D.counit)
                                    - re("a,b->ab", D.counit, D.counit)) % ring.p
    uc = unit_constraints(D)
    if uc is None:
        res["unit_constraints"] = None
        lam = rho = None
    else:
        lam, rho = uc
        res["unit_constraints"] = np.zeros(1, dtype=np.int64)
        lam_inv, rho_inv = k.inv(lam), k.inv(rho)
        left = _per_basis(D, lambda e: k.apply_counit(k.apply_delta(e, 0, 1), 0, 2)
                          - _conj(k, lam, e, lam_inv))
        right = _per_basis(D, lambda e: k.apply_counit(k.apply_delta(e, 0, 1), 1, 2)
                           - _conj(k, rho, e, rho_inv))
        res["counit"] = np.concatenate([left, right]) % ring.p
        res["r_counit"] = np.concatenate([
            k.apply_counit(D.R, 0, 2) - k.mult(rho, lam_inv),
            k.apply_counit(D.R, 1, 2) - k.mult(lam, rho_inv)]) % ring.p
    try:
        phi_inv = k.inv(D.phi)
        k.inv(D.R)
    except NotInvertibleError:
        res["invertibility"] = None
        return AxiomReport(res)
    res["invertibility"] = np.zeros(1, dtype=np.int64)

    def coassoc(e):
        dd = k.apply_delta(e, 0, 1)
        lhs = k.mult(k.apply_delta(dd, 1, 2), D.phi)
        rhs = k.mult(D.phi, k.apply_delta(dd, 0, 2))
        return lhs - rhs

    res["quasi_coassociativity"] = _per_basis(D, coassoc) % ring.p
    res["pentagon"] = pentagon_residual(D, phi_inv)
    h1, h2 = hexagon_residuals(D, phi_inv)
    res["hexagon_1"], res["hexagon_2"] = h1, h2

    def braid(e):
        dd = k.apply_delta(e, 0, 1)
        return k.mult(D.R, dd) - k.mult(np.swapaxes(dd, 0, 1), D.R)

    res["braiding"] = _per_basis(D, braid) % ring.p
    res["triangularity"] = (k.mult(np.swapaxes(D.R, 0, 1), D.R) - one2) % ring.p
    return AxiomReport(res)


def pentagon_residual(D: QuasiHopfDatum, phi_inv=None):
    k = D.kernel
    P = D.phi
    lhs = k.mult(k.apply_delta(P, 2, 3), k.apply_delta(P, 0, 3))
    rhs = k.mult_many(k.insert_unit(P, 0, 3), k.apply_delta(P, 1, 3), k.insert_unit(P, 3, 3))
    return (lhs - rhs) % D.ring.p


def hexagon_residuals(D: QuasiHopfDatum, phi_inv=None):
    k = D.kernel
    P = D.phi
    Pi = k.inv(P) if phi_inv is None else phi_inv
    R = D.R
    R12 = k.insert_unit(R, 2, 2)
    R23 = k.insert_unit(R, 0, 2)
    R13 = k.insert_unit(R, 1, 2)
    lhs1 = k.apply_delta(R, 0, 2)
    rhs1 = k.mult_many(place_legs(P, "312"), R13, place_legs(Pi, "132"), R23, P)
    lhs2 = k.apply_delta(R, 1, 2)
    rhs2 = k.mult_many(place_legs(Pi, "231"), R13, place_legs(P, "213"), R12, Pi)
    return (lhs1 - rhs1) % D.ring.p, (lhs2 - rhs2) % D.ring.p


# -- twisting --------------------------------------------------------------------------

def apply_twist(D: QuasiHopfDatum, J) -> QuasiHopfDatum:
    """Gauge transform by an invertible 2-tensor ``J`` (pseudotwists allowed)."""
    k = D.kernel
    J = np.asarray(J.data if isinstance(J, TensorElement) else J, dtype=np.int64) % D.ring.p
    if J.shape != (D.dim,) * 2 + (D.ring.D,):
        raise MalformedInputError(f"twist has shape {J.shape}")
    Jinv = k.inv(J)
    delta = np.stack([k.mult_many(J, D.delta[a], Jinv) for a in range(D.dim)])
    dJ_left = k.apply_delta(J, 0, 2)    # (Delta (x) id)(J)
    dJ_right = k.apply_delta(J, 1, 2)   # (id (x) Delta)(J)
    phi = k.mult_many(k.insert_unit(J, 0, 2), dJ_right, D.phi, k.inv(dJ_left),
                      k.insert_unit(Jinv, 2, 2))
    R = k.mult_many(np.swapaxes(J, 0, 1), D.R, Jinv)
    return D.replace(delta=delta, phi=phi, R=R)


def is_counit_normalized(D: QuasiHopfDatum, J) -> bool:
    k = D.kernel
    one = D.unit
    return bool(np.array_equal(k.apply_counit(J, 0, 2), one)
                and np.array_equal(k.apply_counit(J, 1, 2), one))


def coboundary_twist(D: QuasiHopfDatum, x):
    """``(x (x) x) Delta(x)^-1`` for an invertible x with ``eps(x) = 1``."""
    k = D.kernel
    x = np.asarray(x, dtype=np.int64) % D.ring.p
    if not np.array_equal(ring_einsum(D.ring, "a,a->", x, D.counit), D.ring.one()):
        raise MalformedInputError("coboundary twist needs eps(x) = 1")
    dx = k.apply_delta(x, 0, 1)
    return k.mult(k.outer(x, x), k.inv(dx))


@dataclass
class TwistCertificate:
    """Ordered pseudotwists; replaying them reproduces a normalization."""

    entries: list = dc_field(default_factory=list)  # (kind, raw 2-tensor)

    def add(self, J, kind: str):
        self.entries.append((kind, np.asarray(J, dtype=np.int64)))

    def __len__(self):
        return len(self.entries)

    @property
    def is_twist(self) -> bool:
        return all(kind == "twist" for kind, _ in self.entries)

    def replay(self, D: QuasiHopfDatum) -> QuasiHopfDatum:
        for _, J in self.entries:
            D = apply_twist(D, J)
        return D

    def transformed(self, ring, P) -> "TwistCertificate":
        """Entries re-expressed through ``P`` (rows = basis vectors in target coordinates)."""
        out = TwistCertificate()
        for kind, J in self.entries:
            out.add(ring_einsum(ring, "ab,ai,bj->ij", J, P, P), kind)
        return out


# -- primitives, grouplikes -------------------------------------------------------------

def primitives(D: QuasiHopfDatum):
    """Basis (over the residue field) of ``{u : Delta(u) = u (x) 1 + 1 (x) u}``."""
    k = D.kernel
    basis = np.stack([D.basis_vector(a) for a in range(D.dim)])
    images = k.apply_delta(basis, 0, 1) - k.insert_unit(basis, 1, 1) - k.insert_unit(basis, 0, 1)
    M = np.transpose((images % D.ring.p).reshape(D.dim, -1, D.ring.D), (1, 0, 2))
    sol = solve_linear(D.ring, M, np.zeros((M.shape[0], D.ring.D), dtype=np.int64))
    return sol.nullspace


def grouplikes(D: QuasiHopfDatum):
    """All g with ``Delta(g) = g (x) g`` and ``eps(g) = 1`` (exhaustive)."""
    k = D.kernel
    if D.ring.order ** D.dim > 2 ** 16:
        raise MalformedInputError("grouplike search is exhaustive; algebra too large")
    out = []
    for codes in product(range(D.ring.order), repeat=D.dim):
        g = D.ring.from_codes(np.array(codes))
        if not np.array_equal(ring_einsum(D.ring, "a,a->", g, D.counit), D.ring.one()):
            continue
        if np.array_equal(k.apply_delta(g, 0, 1), k.outer(g, g)):
            out.append(g)
    return out


# -- Jacobson radical ----------------------------------------------------------------

def _fp_structure(D: QuasiHopfDatum):
    """Structure constants of H as an algebra over F_p (dimension dim * D)."""
    ring = D.ring
    S = ring.structure
    C = np.einsum("klv,abcw,vwu->akblcu", S, D.mul, S) % ring.p
    n = D.dim * ring.D
    return C.reshape(n, n, n)


def _matpow_mod(M, e, mod):
    result = np.eye(M.shape[0], dtype=np.int64)
    base = M % mod
    while e:
        if e & 1:
            result = (result @ base) % mod
        e >>= 1
        if e:
            base = (base @ base) % mod
    return result


def _fp_nullspace(p, A):
    # rows x with x A = 0, i.e. nullspace of A^T, over F_p
    f = make_field(p)
    R, piv = rref(f, np.asarray(A).T % p)
    n = A.shape[0]
    out = []
    for c in range(n):
        if c in piv:
            continue
        v = np.zeros(n, dtype=np.int64)
        v[c] = 1
        for r, pc in enumerate(piv):
            v[pc] = (-R[r, c]) % p
        out.append(v)
    return np.array(out, dtype=np.int64).reshape(len(out), n)


def radical_fp(C, p: int):
    """F_p-basis of the radical from structure constants ``C`` (iterated trace forms)."""
    n = C.shape[0]
    basis = np.eye(n, dtype=np.int64)
    top = 0
    while p ** (top + 1) <= n:
        top += 1
    for i in range(top + 1):
        if len(basis) == 0:
            break
        mod = p ** (i + 1)
        G = np.zeros((len(basis), n), dtype=np.int64)
        for r, b in enumerate(basis):
            for j in range(n):
                x = (b @ C[:, j, :]) % p
                L = np.einsum("a,abc->cb", x, C) % p
                tr = int(np.trace(_matpow_mod(L, p ** i, mod))) % mod
                if tr % (p ** i):
                    raise VerificationError("trace form not divisible as expected")
                G[r, j] = (tr // p ** i) % p
        coeffs = _fp_nullspace(p, G)
        basis = (coeffs @ basis) % p if len(coeffs) else np.zeros((0, n), dtype=np.int64)
    return basis


def _code_rows(ring, vecs):
    """F_q code rows from ``(k, dim, D)`` arrays."""
    return ring.codes(np.asarray(vecs))


def _span_basis(field, rows):
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    R, piv = rref(field, rows)
    return R[: len(piv)]


def _rank(field, rows):
    rows = np.asarray(rows)
    if len(rows) == 0:
        return 0
    return len(rref(field, rows)[1])


@dataclass
class RadicalFiltration:
    """``Rad^0 = H > Rad > Rad^2 > ... > Rad^N = 0`` with an adapted basis.

    ``basis`` rows are the adapted basis in the original coordinates (codes);
    ``weights[a]`` is the layer of basis vector a.  Tensor degrees use
    ``deg(e_{a1} (x) ... ) = weights[a1] + ...`` in the adapted basis.
    """

    ring: BaseRing
    dim: int
    powers: list
    basis: np.ndarray
    weights: np.ndarray
    inverse: np.ndarray
    lifted_fp_dim: int | None = None

    @property
    def radical(self):
        return self.powers[1] if len(self.powers) > 1 else np.zeros((0, self.dim), np.int64)

    @property
    def nilpotency_index(self) -> int:
        return len(self.powers) - 1

    @property
    def gr_dims(self):
        return tuple(int(np.sum(self.weights == w)) for w in range(self.nilpotency_index))

    @property
    def is_local(self) -> bool:
        return int(np.sum(self.weights == 0)) == 1

    def _P(self):
        return self.ring.from_codes(self.basis)

    def _Q(self):
        return self.ring.from_codes(self.inverse)

    def to_adapted(self, x):
        Q = self._Q()
        out = np.asarray(x)
        arity = out.ndim - 1
        for leg in range(arity):
            out = np.moveaxis(ring_einsum(self.ring, "...a,ab->...b",
                                          np.moveaxis(out, leg, -2), Q), -2, leg)
        return out

    def from_adapted(self, x):
        P = self._P()
        out = np.asarray(x)
        arity = out.ndim - 1
        for leg in range(arity):
            out = np.moveaxis(ring_einsum(self.ring, "...a,ab->...b",
                                          np.moveaxis(out, leg, -2), P), -2, leg)
        return out

    def weight_grid(self, arity: int):
        grid = np.zeros((self.dim,) * arity, dtype=np.int64)
        for leg in range(arity):
            shape = [1] * arity
            shape[leg] = self.dim
            grid = grid + self.weights.reshape(shape)
        return grid

    def degree_adapted(self, x):
        x = np.asarray(x)
        nz = x.any(axis=-1)
        if not nz.any():
            return float("inf")
        return int(self.weight_grid(x.ndim - 1)[nz].min())

    def degree(self, x):
        return self.degree_adapted(self.to_adapted(x))

    def homogeneous_part(self, x_adapted, n: int):
        x = np.array(x_adapted, copy=True)
        x[self.weight_grid(x.ndim - 1) != n] = 0
        return x

    def leading_part(self, x):
        """``(degree, gr-component in adapted coordinates)`` of a tensor."""
        xa = self.to_adapted(x)
        deg = self.degree_adapted(xa)
        if deg == float("inf"):
            return deg, xa
        return deg, self.homogeneous_part(xa, deg)


def jacobson_radical(D: QuasiHopfDatum) -> RadicalFiltration:
    if not D.ring.is_field:
        base = D.fiber()
        filt = jacobson_radical(base)
        # Rad over the deformation ring = Rad(fiber) + h H, counted over F_p
        filt.lifted_fp_dim = (len(filt.radical) * base.ring.D
                              + D.dim * D.ring.m * (D.ring.h_trunc - 1))
        return filt
    ring, f = D.ring, D.ring.field
    rad_fp = radical_fp(_fp_structure(D), ring.p)
    rad = _span_basis(f, _code_rows(ring, rad_fp.reshape(len(rad_fp), D.dim, ring.D)))
    _verify_radical(D, rad)
    powers = [_span_basis(f, np.eye(D.dim, dtype=np.int64)), rad]
    while len(powers[-1]):
        prev = ring.from_codes(powers[-1])
        gens = ring.from_codes(rad)
        prods = ring_einsum(ring, "ia,jb,abc->ijc", prev, gens, D.mul)
        nxt = _span_basis(f, _code_rows(ring, prods.reshape(-1, D.dim, ring.D)))
        if len(nxt) >= len(powers[-1]):
            raise VerificationError("radical is not nilpotent")
        powers.append(nxt)
    basis, weights = _adapted_basis(D, powers)
    inverse = ring.codes(matrix_inverse(ring, ring.from_codes(basis)))
    return RadicalFiltration(ring, D.dim, powers, basis, np.array(weights), inverse)


def _verify_radical(D, rad):
    ring, f = D.ring, D.ring.field
    if not len(rad):
        return
    r = ring.from_codes(rad)
    eye = np.stack([D.basis_vector(a) for a in range(D.dim)])
    left = ring_einsum(ring, "ia,jb,abc->ijc", eye, r, D.mul).reshape(-1, D.dim, ring.D)
    right = ring_einsum(ring, "ia,jb,abc->ijc", r, eye, D.mul).reshape(-1, D.dim, ring.D)
    base_rank = _rank(f, rad)
    for prods in (left, right):
        if _rank(f, np.concatenate([rad, _code_rows(ring, prods)])) != base_rank:
            raise VerificationError("computed radical is not a two-sided ideal")


def _adapted_basis(D, powers):
    ring, f = D.ring, D.ring.field
    eps = ring.codes(D.counit)
    unit = ring.codes(D.unit)
    basis, weights = [], []
    for w in range(len(powers) - 1):
        below = list(powers[w + 1])
        if w == 0:
            cands = [unit]
            for a in range(D.dim):
                v = np.zeros(D.dim, dtype=np.int64)
                v[a] = 1
                # move into ker(eps) so non-unit layer-0 vectors are normalized
                v = f.add[v, f.neg[f.mul[eps[a], unit]]]
                cands.append(v)
        else:
            cands = list(powers[w])
        current = below + [b for b, wt in zip(basis, weights) if wt == w]
        r = _rank(f, current)
        for c in cands:
            rt = _rank(f, current + [c])
            if rt > r:
                current.append(c)
                basis.append(np.asarray(c, dtype=np.int64))
                weights.append(w)
                r = rt
    return np.array(basis, dtype=np.int64), weights
