"""Twisting triangular quasi-Hopf data over char-2 fields to the form
``Phi = 1``, ``R = 1 + d (x) d`` with ``d`` primitive and ``d^2 = 0``.

All work happens in a basis adapted to the radical filtration (see
:class:`~symtwist.quasihopf.RadicalFiltration`): the filtration degree of a
tensor is the least weight sum of its nonzero coordinates and the
associated graded part of degree ``n`` is the weight-``n`` coordinate slice.
Certificates are converted back to the caller's basis at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations_with_replacement

import numpy as np

from .errors import MalformedInputError, VerificationError
from .exactbase import solve_linear
from .quasihopf import (
    QuasiHopfDatum,
    RadicalFiltration,
    TwistCertificate,
    apply_twist,
    check_axioms,
    grouplikes,
    is_counit_normalized,
    jacobson_radical,
    matrix_inverse,
    place_legs,
    unit_constraints,
)
from .tensorops import TensorKernel, alt3, cyc3, permute_legs

CHEVALLEY_FAILURE = "assumption violated: input not pseudotwist-equivalent to Chevalley form"


@dataclass
class NormalizationResult:
    """Outcome of :func:`normalize`, expressed in the input basis.

    ``delta`` is the leading graded part of ``d`` in adapted coordinates
    (so it is comparable across twists of one algebra) and ``degree`` its
    filtration degree; both describe ``d = 0`` as ``(zeros, None)``.
    """

    final: QuasiHopfDatum
    certificate: TwistCertificate
    d: np.ndarray
    delta: np.ndarray
    degree: int | None
    transcript: list
    filtration: RadicalFiltration
    is_twist: bool = False

    @property
    def d_is_zero(self) -> bool:
        return not self.d.any()


@dataclass
class TrivializationResult:
    datum: QuasiHopfDatum
    certificate: TwistCertificate
    d: np.ndarray
    transcript: list = dc_field(default_factory=list)


def _require_char2(D: QuasiHopfDatum):
    if D.ring.p != 2 or not D.ring.is_field:
        raise MalformedInputError(
            f"normalization is implemented over fields of characteristic 2, got {D.ring!r}")


class _Run:
    """Mutable state of one normalization, in adapted coordinates."""

    def __init__(self, D: QuasiHopfDatum, filt: RadicalFiltration):
        self.filt = filt
        self.P = D.ring.from_codes(filt.basis)
        self.D = D.change_basis(self.P)
        self.ring = D.ring
        self.p = D.ring.p
        self.w = filt.weights
        self.cert = TwistCertificate()
        self.transcript = []
        self._grids = {}
        self._gr = None
        self._check_filtered()

    # degrees
    def grid(self, arity):
        if arity not in self._grids:
            self._grids[arity] = self.filt.weight_grid(arity)
        return self._grids[arity]

    def deg(self, x):
        nz = np.asarray(x).any(axis=-1)
        if not nz.any():
            return None
        return int(self.grid(nz.ndim)[nz].min())

    def part(self, x, n):
        out = np.array(x, copy=True)
        out[self.grid(out.ndim - 1) != n] = 0
        return out

    @property
    def k(self) -> TensorKernel:
        return self.D.kernel

    def one(self, arity):
        return self.k.one(arity)

    def _check_filtered(self):
        delta = self.D.delta.any(axis=-1)
        w = self.w
        low = delta & ((w[None, :, None] + w[None, None, :]) < w[:, None, None])
        if low.any():
            raise VerificationError(
                "comultiplication does not preserve the radical filtration; " + CHEVALLEY_FAILURE)

    def gr_kernel(self) -> TensorKernel:
        """Kernel of gr(H): weight-preserving parts of the structure maps."""
        if self._gr is None:
            w = self.w
            D = self.D
            keep_m = (w[:, None, None] + w[None, :, None]) == w[None, None, :]
            keep_d = (w[None, :, None] + w[None, None, :]) == w[:, None, None]
            mul = np.where(keep_m[..., None], D.mul, 0)
            delta = np.where(keep_d[..., None], D.delta, 0)
            self._gr = TensorKernel(self.ring, mul, D.unit, delta, D.counit)
        return self._gr

    def twist(self, J, label):
        kind = "twist" if is_counit_normalized(self.D, J) else "pseudotwist"
        self.D = apply_twist(self.D, J)
        self.cert.add(J, kind)
        return kind

    # -- unit constraints ----------------------------------------------------
    def repair_units(self):
        k = self.k
        X = k.apply_counit(self.D.phi, 1, 3)
        if np.array_equal(X, self.one(2)):
            return
        uc = unit_constraints(self.D)
        if uc is None:
            raise VerificationError("(id⊗ε⊗id)(Φ) is not a product of units", X)
        lam, rho = uc
        a = k.inv(rho)
        scale = _scalar_of(self.ring, self.D.counit, a)
        a = _scale(self.ring, a, self.ring.inv(scale))
        b = _scale(self.ring, lam, scale)
        K = k.outer(a, k.inv(b))
        self.twist(K, "unit repair")
        self.transcript.append({"stage": "units"})
        if not np.array_equal(k.apply_counit(self.D.phi, 1, 3), self.one(2)):
            raise VerificationError("unit repair did not normalize Φ",
                                    k.apply_counit(self.D.phi, 1, 3))

    def check_normalized(self):
        k = self.k
        for name, x, arity in (("Φ", self.D.phi, 3), ("R", self.D.R, 2)):
            rest = (x - self.one(arity)) % self.p
            bad = k.counit_residuals(rest, arity)
            if bad:
                raise VerificationError(
                    f"{name} is not counit-normalized on leg {bad[0] + 1}", rest)

    # -- R --------------------------------------------------------------------
    def trivialize_R(self, d, min_twist_degree=None):
        k, p = self.k, self.p
        if d is None:
            d = np.zeros((self.D.dim, self.ring.D), dtype=np.int64)
        start = (self.D.R - self.one(2)) % p
        if start.any() and self.deg(start) == 0:
            raise VerificationError(
                "R is not 1 modulo positive filtration degree (semisimple part not reduced)",
                start)
        last = -1
        while True:
            k = self.k
            S = (self.D.R - self.one(2) - k.outer(d, d)) % p
            n = self.deg(S)
            if n is None:
                break
            if n <= last:
                raise VerificationError("R-trivialization degree did not increase", S)
            dd = self.deg(d)
            if dd is not None and 2 * dd >= n:
                d = np.zeros_like(d)
                continue
            s = self.part(S, n)
            if np.any((s - np.swapaxes(s, 0, 1)) % p):
                raise VerificationError(
                    f"degree-{n} discrepancy of R is not symmetric; input not triangular", s)
            idx = np.arange(self.D.dim)
            diag = s[idx, idx]
            v = self.ring.from_codes(self.ring.field.sqrt(self.ring.codes(diag)))
            rest = (s - k.outer(v, v)) % p
            u = np.triu(np.ones((self.D.dim,) * 2, dtype=bool), 1)[..., None] * rest
            entry = {"stage": "R", "degree": n, "pi_rank": int(v.any(axis=-1).sum()),
                     "wedge_terms": int(u.any(axis=-1).sum())}
            if u.any():
                self._twist_checked(self.one(2) + u, min_twist_degree, "wedge")
            if v.any():
                if dd is None:
                    d = v
                else:
                    J = self.one(2) + k.outer(d, v)
                    jd = self.deg(J - self.one(2))
                    if jd < n / 2 + dd:
                        raise VerificationError("merge twist degree below n/2 + deg d", J)
                    self._twist_checked(J, min_twist_degree, "merge")
                    d = (d + v) % p
                    if self.deg(v) < n / 2:
                        raise VerificationError("deg(d_n - d_(n-1)) < n/2", v)
            self.transcript.append(entry)
            last = n
        return d

    def _twist_checked(self, J, min_degree, label):
        if min_degree is not None:
            jd = self.deg((J - self.one(2)) % self.p)
            if jd is not None and jd < min_degree:
                raise VerificationError(
                    f"{label} twist has degree {jd} < {min_degree}; would spoil Φ", J)
        self.twist(J % self.p, label)

    # -- Phi ------------------------------------------------------------------
    def trivialize_Phi(self, d, check_four_cocycle=False):
        p = self.p
        last = -1
        while True:
            k = self.k
            rest = (self.D.phi - self.one(3)) % p
            ell = self.deg(rest)
            if ell is None:
                break
            if ell <= last:
                raise VerificationError("Φ-trivialization degree did not increase", rest)
            phi = self.part(rest, ell)
            entry = {"stage": "Phi", "degree": ell}
            entry.update(self._diagnostics(phi, ell, d, check_four_cocycle))
            f, ncand, rank = self._solve_symmetric(phi, ell)
            entry.update(candidates=ncand, rank=rank)
            self.twist((self.one(2) + f) % p, "symmetric coboundary")
            if self._phi_degree() <= ell:
                raise VerificationError("symmetric twist left degree-ℓ part in Φ",
                                        self.part((self.D.phi - self.one(3)) % p, ell))
            if d is not None and d.any():
                entry["branch"] = self._repair_R(f, d, ell)
            d = self.trivialize_R(d, min_twist_degree=ell + 1)
            if self._phi_degree() <= ell:
                raise VerificationError("R repair spoiled Φ below degree ℓ+1")
            self.transcript.append(entry)
            last = ell
        return d

    def _phi_degree(self):
        x = (self.D.phi - self.one(3)) % self.p
        deg = self.deg(x)
        return float("inf") if deg is None else deg

    def _diagnostics(self, phi, ell, d, check_four_cocycle):
        gk = self.gr_kernel()
        p = self.p
        out = {}
        bad = gk.counit_residuals(phi, 3)
        if bad:
            raise VerificationError(f"φ is not normalized on leg {bad[0] + 1}", phi)
        dphi = gk.differential(phi, 3)
        if dphi.any():
            raise VerificationError("input axiom corruption: dφ ≠ 0", dphi)
        if alt3(phi, p).any():
            raise VerificationError("input axiom corruption: Alt(φ) ≠ 0", alt3(phi, p))
        dim = self.D.dim
        if d is None or not d.any():
            T = np.zeros((dim, dim, self.ring.D), dtype=np.int64)
            delta = np.zeros((dim, self.ring.D), dtype=np.int64)
            out["d_degree"] = None
        else:
            dp = self.deg(d)
            delta = self.part(d, dp)
            k = self.k
            prim = (k.apply_delta(d, 0, 1) - k.insert_unit(d, 1, 1) - k.insert_unit(d, 0, 1)) % p
            pd = self.deg(prim)
            if pd is not None and pd < ell - dp:
                raise VerificationError("deg(Δd - d⊗1 - 1⊗d) < ℓ - deg d", prim)
            T = self.part(prim, ell - dp)
            out["d_degree"] = dp
            out["T_nonzero"] = bool(T.any())
            if np.any((T - np.swapaxes(T, 0, 1)) % p):
                raise VerificationError("T is not symmetric", T)
            if gk.differential(T, 2).any():
                raise VerificationError("T is not a 2-cocycle", gk.differential(T, 2))
            if check_four_cocycle and T.any():
                out["TT_coboundary"] = self._four_cocycle_check(T, 2 * (ell - dp))
        for name, res in hexagon_identities(gk, phi, T, delta).items():
            if res.any():
                raise VerificationError(f"hexagon identity {name} fails", res)
        if not (d is not None and d.any()) and cyc3(phi, p).any():
            raise VerificationError("Cyc(φ) ≠ 0 with d = 0", cyc3(phi, p))
        return out

    def _four_cocycle_check(self, T, weight):
        gk = self.gr_kernel()
        TT = gk.outer(T, T)
        cands = _normalized_homogeneous(self, 3, weight)
        if not len(cands):
            return not TT.any()
        images = gk.differential(cands, 3)
        n = len(cands)
        M = np.transpose(images.reshape(n, -1, self.ring.D), (1, 0, 2))
        ok = solve_linear(self.ring, M, TT.reshape(-1, self.ring.D)) is not None
        if not ok:
            raise VerificationError("T⊗T is not a coboundary", TT)
        return ok

    def _solve_symmetric(self, phi, ell):
        gk = self.gr_kernel()
        cands = symmetric_candidates(self.w, ell, self.ring)
        if not len(cands):
            raise VerificationError(CHEVALLEY_FAILURE, phi)
        n = len(cands)
        images = gk.differential(cands, 2)
        M = np.transpose(images.reshape(n, -1, self.ring.D), (1, 0, 2))
        sol = solve_linear(self.ring, M, phi.reshape(-1, self.ring.D))
        if sol is None:
            raise VerificationError(CHEVALLEY_FAILURE, phi)
        f = _combine(self.ring, sol.solution, cands)
        return f, n, n - len(sol.nullspace)

    def _repair_R(self, f, d, ell):
        """The two explicit R-repair twists after a symmetric coboundary twist."""
        k, p = self.k, self.p
        dim = self.D.dim
        idx = np.arange(dim)
        v = self.ring.from_codes(self.ring.field.sqrt(self.ring.codes(f[idx, idx])))
        h = np.triu(np.ones((dim, dim), dtype=bool), 1)[..., None] * ((f - k.outer(v, v)) % p)
        dd = k.outer(d, d)
        comm = (k.mult(dd, h) - k.mult(h, dd)) % p
        J1 = (self.one(2) + comm + k.outer(k.mult(d, v), k.mult(v, d))) % p
        if np.any(J1 != self.one(2)):
            self.twist(J1, "R repair")
            if self._phi_degree() <= ell:
                raise VerificationError("first R-repair twist spoiled Φ")
        k = self.k
        dv = (k.mult(d, v) - k.mult(v, d)) % p
        branch = "ell<4p" if ell < 4 * self.deg(d) else "ell>=4p"
        J2 = (self.one(2) + k.outer(d, dv)) % p
        if dv.any():
            self.twist(J2, "R repair")
            if self._phi_degree() <= ell:
                raise VerificationError(f"second R-repair twist ({branch}) spoiled Φ")
        return branch


def _scalar_of(ring, counit, x):
    from .tensorops import ring_einsum
    return ring_einsum(ring, "a,a->", x, counit)


def _scale(ring, x, c):
    from .tensorops import ring_einsum
    return ring_einsum(ring, "a,->a", x, c)


def _combine(ring, coeffs, cands):
    from .tensorops import ring_einsum
    n = len(cands)
    flat = cands.reshape(n, -1, ring.D)
    return ring_einsum(ring, "n,nx->x", coeffs, flat).reshape(cands.shape[1:])


def symmetric_candidates(weights, ell, ring):
    """Basis of symmetric normalized 2-tensors of weight ``ell`` (index 0 is the unit)."""
    weights = np.asarray(weights)
    dim = len(weights)
    out = []
    for a, b in combinations_with_replacement(range(1, dim), 2):
        if weights[a] + weights[b] != ell:
            continue
        e = np.zeros((dim, dim, ring.D), dtype=np.int64)
        e[a, b] = ring.one()
        e[b, a] = ring.one()
        out.append(e)
    return np.array(out, dtype=np.int64).reshape((len(out), dim, dim, ring.D))


def _normalized_homogeneous(run, arity, weight):
    dim = run.D.dim
    grid = run.grid(arity)
    out = []
    for idx in zip(*np.nonzero(grid == weight)):
        if 0 in idx:
            continue
        e = np.zeros((dim,) * arity + (run.ring.D,), dtype=np.int64)
        e[idx] = run.ring.one()
        out.append(e)
    return np.array(out, dtype=np.int64).reshape((len(out),) + (dim,) * arity + (run.ring.D,))


def hexagon_identities(kernel, phi, T, delta, convention: str = "place"):
    """Residuals of the four hexagon-derived identities for ``(phi, T, delta)``.

    With ``convention="place"`` a word like ``312`` sends tensor factor k of
    ``phi`` to slot ``w[k]`` (the reading under which the identities follow
    from the hexagon axioms); ``"slot"`` uses :func:`permute_legs` instead and
    is kept only to show that the other reading breaks the identities.
    """
    p = kernel.ring.p
    move = {"place": place_legs, "slot": permute_legs}[convention]
    Td = kernel.outer(T, delta)
    dT = kernel.outer(delta, T)
    x = lambda w: move(phi, w)
    return {
        "a": (Td + x("312") + x("132") + phi) % p,
        "b": (dT + x("231") + x("213") + phi) % p,
        "c": (phi + x("321") + Td + dT) % p,
        "d": (cyc3(phi, p) + cyc3(Td, p)) % p,
    }


# -- public operations ----------------------------------------------------------

def _start(D, filt):
    _require_char2(D)
    report = check_axioms(D)
    if not report.ok:
        raise VerificationError(f"axioms fail: {', '.join(report.failing)}")
    filt = jacobson_radical(D) if filt is None else filt
    run = _Run(D, filt)
    run.repair_units()
    run.check_normalized()
    return run


def _to_input_basis(run, D, d_adapted):
    """Certificate, final datum and d in the basis of ``D``."""
    ring = D.ring
    cert = run.cert.transformed(ring, run.P)
    Q = matrix_inverse(ring, run.P)
    final = run.D.change_basis(Q).replace(basis_names=D.basis_names, name=D.name)
    from .tensorops import ring_einsum
    d = ring_einsum(ring, "a,ai->i", d_adapted, run.P)
    return cert, final, d


def trivialize_R(D: QuasiHopfDatum, filt: RadicalFiltration | None = None) -> TrivializationResult:
    """Twist ``D`` until ``R = 1 + d (x) d`` exactly (``Phi`` may stay nontrivial)."""
    run = _start(D, filt)
    d = run.trivialize_R(None)
    cert, final, d_in = _to_input_basis(run, D, d)
    return TrivializationResult(final, cert, d_in, run.transcript)


def trivialize_Phi(D: QuasiHopfDatum, filt: RadicalFiltration | None = None,
                   check_four_cocycle: bool = False) -> TrivializationResult:
    """Twist ``D`` (with ``R = 1 + d (x) d``) until ``Phi = 1``; R stays in that form."""
    run = _start(D, filt)
    d = run.trivialize_Phi(run.trivialize_R(None), check_four_cocycle)
    cert, final, d_in = _to_input_basis(run, D, d)
    return TrivializationResult(final, cert, d_in, run.transcript)


def normalize(D: QuasiHopfDatum, filt: RadicalFiltration | None = None,
              check_four_cocycle: bool = False) -> NormalizationResult:
    """Bring ``D`` to ``Phi = 1``, ``R = 1 + d (x) d`` and certify the twists used."""
    run = _start(D, filt)
    d = run.trivialize_R(None)
    d = run.trivialize_Phi(d, check_four_cocycle)
    _check_final(run.D, d)
    cert, final, d_in = _to_input_basis(run, D, d)
    replayed = cert.replay(D)
    if not replayed.same_as(final):
        raise VerificationError("certificate replay does not reproduce the normalized datum")
    deg = run.deg(d)
    delta = run.part(d, deg) if deg is not None else np.zeros_like(d)
    phi_trivial = np.array_equal(D.phi, D.kernel.one(3))
    is_twist = phi_trivial and cert.is_twist
    return NormalizationResult(final, cert, d_in, delta, deg, run.transcript, run.filt, is_twist)


def _check_final(D: QuasiHopfDatum, d):
    k = D.kernel
    p = D.ring.p
    if np.any(D.phi != k.one(3)):
        raise VerificationError("final Φ ≠ 1", (D.phi - k.one(3)) % p)
    if np.any((D.R - k.one(2) - k.outer(d, d)) % p):
        raise VerificationError("final R ≠ 1 + d⊗d", (D.R - k.one(2) - k.outer(d, d)) % p)
    prim = (k.apply_delta(d, 0, 1) - k.insert_unit(d, 1, 1) - k.insert_unit(d, 0, 1)) % p
    if prim.any():
        raise VerificationError("final d is not primitive", prim)
    if k.mult(d, d).any():
        raise VerificationError("final d² ≠ 0", k.mult(d, d))
    report = check_axioms(D)
    if not report.ok:
        raise VerificationError(f"normalized datum fails {', '.join(report.failing)}")


# -- cross-check: symmetrization by primitive corrections ---------------------------------

def primitive_basis(kernel: TensorKernel):
    """Basis of primitive elements as rows ``(n, dim, D)``."""
    ring = kernel.ring
    dim = kernel.d
    basis = np.zeros((dim, dim, ring.D), dtype=np.int64)
    for a in range(dim):
        basis[a, a] = ring.one()
    images = (kernel.apply_delta(basis, 0, 1) - kernel.insert_unit(basis, 1, 1)
              - kernel.insert_unit(basis, 0, 1)) % ring.p
    M = np.transpose(images.reshape(dim, -1, ring.D), (1, 0, 2))
    sol = solve_linear(ring, M, np.zeros((M.shape[0], ring.D), dtype=np.int64))
    return sol.nullspace.reshape(-1, dim, ring.D)


def symmetrize_by_primitives(kernel: TensorKernel, f):
    """Make a 2-cochain symmetric by adding ``sum_{i<j} c_ij p_i (x) p_j``.

    Requires ``f + f_21`` to lie in ``P (x) P`` with a symmetric coefficient
    matrix of zero diagonal (``P`` the primitives); ``d f`` is unchanged
    because each ``p_i (x) p_j`` is a cocycle.
    """
    ring = kernel.ring
    p = ring.p
    w = (f + np.swapaxes(f, 0, 1)) % p
    prims = primitive_basis(kernel)
    n = len(prims)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    if not pairs:
        if w.any():
            raise VerificationError("f + f21 is not in P⊗P", w)
        return f
    cols = np.stack([kernel.outer(prims[i], prims[j]) for i, j in pairs])
    M = np.transpose(cols.reshape(len(pairs), -1, ring.D), (1, 0, 2))
    sol = solve_linear(ring, M, w.reshape(-1, ring.D))
    if sol is None:
        raise VerificationError("f + f21 is not in P⊗P", w)
    c = sol.solution.reshape(n, n, ring.D)
    if np.any((c - np.swapaxes(c, 0, 1)) % p) or c[np.arange(n), np.arange(n)].any():
        raise VerificationError("coefficients of f + f21 are not symmetric with zero diagonal", c)
    out = np.array(f, copy=True)
    for i in range(n):
        for j in range(i + 1, n):
            if c[i, j].any():
                out = out + _scale_tensor(ring, kernel.outer(prims[i], prims[j]), c[i, j])
    return out % p


def _scale_tensor(ring, x, c):
    from .tensorops import ring_einsum
    return ring_einsum(ring, "ab,->ab", x, c)


# -- scrambling ---------------------------------------------------------------------------

def random_pseudotwist(D: QuasiHopfDatum, rng: np.random.Generator, normalized=False,
                       max_tries: int = 1000):
    """A random invertible 2-tensor ``J`` with ``(eps (x) eps)(J) = 1``.

    With ``normalized=True`` the result is ``1 + u`` with ``u`` killed by the
    counit on both legs.
    """
    ring, k = D.ring, D.kernel
    shape = (D.dim, D.dim, ring.D)
    for _ in range(max_tries):
        J = rng.integers(0, ring.p, size=shape, dtype=np.int64)
        if normalized:
            J = (J - k.insert_unit(k.apply_counit(J, 0, 2), 0, 1)) % ring.p
            J = (J - k.insert_unit(k.apply_counit(J, 1, 2), 1, 1)) % ring.p
            J = (J + k.one(2)) % ring.p
        c = k.apply_counit(k.apply_counit(J, 1, 2), 0, 1)
        if not ring.is_unit(c):
            continue
        J = _scale_tensor(ring, J, ring.inv(c))
        if k.is_invertible(J):
            return J
    raise VerificationError("could not sample an invertible pseudotwist")


def scramble(D: QuasiHopfDatum, rng: np.random.Generator, normalized=False):
    """``(apply_twist(D, J), J)`` for a random pseudotwist ``J``."""
    J = random_pseudotwist(D, rng, normalized)
    return apply_twist(D, J), J


# -- dimension 2 -------------------------------------------------------------------------

FPDIM2_LABELS = ("Vec(Z/2Z)", "Rep(Z/2Z)", "Rep(α₂)", "D")


def identify_fpdim2(D: QuasiHopfDatum) -> str:
    """Label of a 2-dimensional triangular datum in characteristic 2.

    The labels are ``Vec(Z/2Z)``, ``Rep(Z/2Z)``, ``Rep(α₂)`` and ``D``
    (the category of F₂[d]/(d²)-modules with braiding ``1 + d⊗d``).
    """
    if D.dim != 2 or D.ring.p != 2:
        raise MalformedInputError("identify_fpdim2 needs a 2-dimensional datum in characteristic 2")
    filt = jacobson_radical(D)
    if len(filt.radical) == 0:
        return FPDIM2_LABELS[0]
    one = D.unit
    if any(not np.array_equal(g, one) for g in grouplikes(D)):
        return FPDIM2_LABELS[1]
    res = normalize(D, filt)
    if res.d_is_zero:
        if len(primitive_basis(res.final.kernel)) == 0:
            raise VerificationError("not a valid char-2 dim-2 triangular Hopf datum")
        return FPDIM2_LABELS[2]
    return FPDIM2_LABELS[3]
