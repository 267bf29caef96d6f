import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtwist.errors import MalformedInputError, VerificationError
from symtwist.exactbase import BaseRing, make_field, prime_ring
from symtwist.quasihopf import alpha2, alpha2_pair, category_D, divided_power, group_algebra
from symtwist.tensorops import (
    TensorElement,
    alt3,
    as_kernel,
    beta_cocycle,
    cartier_d,
    cochain_cohomology,
    cyc3,
    normalized_cochain_basis,
    permute_legs,
    pi_apply,
    psi_apply,
    solve_coboundary,
    sym_decompose,
)

F2 = prime_ring(2)


def vec(n, *idx):
    v = np.zeros((n, 1), dtype=np.int64)
    for i in idx:
        v[i, 0] ^= 1
    return v


def pure(*vs):
    """Pure tensor of 1-dim-coefficient vectors over F_2."""
    out = vs[0][..., 0]
    for v in vs[1:]:
        out = np.multiply.outer(out, v[..., 0])
    return out[..., None] % 2


def test_permute_examples():
    n = 3
    a, b, c = vec(n, 0), vec(n, 1), vec(n, 2)
    x = TensorElement(F2, n, pure(a, b, c))
    assert np.array_equal(permute_legs(x, "312").data, pure(c, a, b))
    assert np.array_equal(permute_legs(pure(a, b), "21"), pure(b, a))
    s = pure(a, b) + pure(b, a)
    assert np.array_equal(permute_legs(s, "21"), s)


def test_permute_rejects_bad_word():
    with pytest.raises(MalformedInputError):
        permute_legs(np.zeros((2, 2, 1), dtype=np.int64), "13")


def test_sym_dims():
    assert sym_decompose(2, F2).dims == (1, 3, 2)
    assert sym_decompose(4, F2).dims == (6, 10, 4)


def test_pi_examples():
    sd = sym_decompose(2, F2)
    e1, e2 = vec(2, 0), vec(2, 1)
    wedge = pure(e1, e2) + pure(e2, e1)
    assert not pi_apply(sd, wedge).any()
    x = (pure(e1, e1) + wedge) % 2
    assert np.array_equal(pi_apply(sd, x), e1)


def test_pi_rejects_asymmetric():
    sd = sym_decompose(2, F2)
    with pytest.raises(VerificationError):
        pi_apply(sd, pure(vec(2, 0), vec(2, 1)))


def test_pi_semilinear_over_f4():
    ring = BaseRing(make_field(2, 2), 1)
    sd = sym_decompose(2, ring)
    f = ring.field
    for lam in range(1, 4):
        for v0 in range(4):
            for v1 in range(4):
                v = np.array([v0, v1])
                lv = f.mul[lam, v]
                x = f.mul[lv[:, None], lv[None, :]]
                got = ring.codes(pi_apply(sd, ring.from_codes(x)))
                assert np.array_equal(got, f.mul[f.mul[lam, lam], f.mul[v, v]])


def test_psi_examples():
    H, beta = beta_cocycle(2)
    sd = sym_decompose(4, F2)
    y = vec(4, 1)
    out = psi_apply(sd, pure_tensor(beta.data, y))
    assert np.array_equal(out, pure(vec(4, 2), y))
    wedge = pure(vec(4, 1), vec(4, 3)) + pure(vec(4, 3), vec(4, 1))
    assert not psi_apply(sd, pure_tensor(wedge, y)).any()
    with pytest.raises(VerificationError):
        psi_apply(sd, pure(vec(4, 1), vec(4, 2), y))


def pure_tensor(t, v):
    return (np.multiply.outer(t[..., 0], v[..., 0]) % 2)[..., None]


def test_alt_and_cyc():
    n = 3
    a, b, c = vec(n, 0), vec(n, 1), vec(n, 2)
    assert not alt3(pure(a, a, a)).any()
    assert np.array_equal(cyc3(pure(a, b, c)), (pure(a, b, c) + pure(c, a, b) + pure(b, c, a)) % 2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=27, max_size=27))
def test_alt_is_cyc_plus_swapped_cyc(bits):
    x = np.array(bits, dtype=np.int64).reshape(3, 3, 3, 1)
    rhs = (cyc3(x) + cyc3(permute_legs(x, "213"))) % 2
    assert np.array_equal(alt3(x), rhs)


def test_cartier_examples():
    H = group_algebra(2)
    x = vec(2, 0, 1)  # g + 1
    assert np.array_equal(cartier_d(H, x), pure(x, x))
    assert not cartier_d(alpha2(), vec(2, 1)).any()


def test_cartier_rejects_unnormalized():
    with pytest.raises(MalformedInputError, match="leg 1"):
        cartier_d(alpha2(), vec(2, 0))


@pytest.mark.parametrize("make", [alpha2, lambda: group_algebra(2), lambda: group_algebra((2, 2)),
                                  lambda: divided_power(2), alpha2_pair])
def test_d_squared_zero(make):
    H = make()
    k = as_kernel(H)
    rng = np.random.default_rng(7)
    for arity in (1, 2):
        basis = normalized_cochain_basis(H, arity)
        coeffs = rng.integers(0, 2, size=(500, len(basis)))
        xs = np.einsum("nc,c...->n...", coeffs, basis) % 2
        dd = k.differential(k.differential(xs, arity), arity + 1)
        assert not dd.any()


def test_cohomology_examples():
    a = cochain_cohomology(alpha2(), 1)
    assert a.dim == 1 and np.array_equal(a.representatives[0], vec(2, 1))
    b = cochain_cohomology(alpha2(), 2)
    assert b.dim == 1 and np.array_equal(b.representatives[0], pure(vec(2, 1), vec(2, 1)))
    assert cochain_cohomology(group_algebra(2), 1).dim == 0


def test_beta_examples():
    _, b1 = beta_cocycle(1)
    assert np.array_equal(b1.data, pure(vec(2, 1), vec(2, 1)))
    _, b2 = beta_cocycle(2)
    expected = pure(vec(4, 1), vec(4, 3)) + pure(vec(4, 2), vec(4, 2)) + pure(vec(4, 3), vec(4, 1))
    assert np.array_equal(b2.data, expected % 2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_beta_suite(r):
    H, beta = beta_cocycle(r)
    n = 2 ** r
    assert cartier_d(H, beta).is_zero()
    cands = normalized_cochain_basis(H, 1)
    assert solve_coboundary(H, beta.data, cands) is None
    sd = sym_decompose(n, F2)
    assert np.array_equal(pi_apply(sd, beta), vec(n, 2 ** (r - 1)))


def test_beta_range():
    with pytest.raises(MalformedInputError):
        beta_cocycle(5)


def test_solve_coboundary_finds_preimage():
    H = divided_power(2)
    cands = normalized_cochain_basis(H, 1)
    target = cartier_d(H, vec(4, 3))
    f = solve_coboundary(H, target, cands)
    assert f is not None and np.array_equal(cartier_d(H, f), target)


def test_category_d_kernel_is_alpha2():
    assert np.array_equal(as_kernel(category_D()).delta, as_kernel(alpha2()).delta)
