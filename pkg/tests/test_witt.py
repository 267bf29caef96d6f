from itertools import product

import numpy as np
import pytest

from symtwist.errors import CapacityError, MalformedInputError
from symtwist.exactbase import make_field
from symtwist.witt import (
    all_coordinates,
    artin_schreier,
    batch_add,
    batch_frobenius,
    batch_mul,
    batch_neg,
    coker_P,
    doubling_identity_check,
    ker_P,
    witt_from_int,
    witt_neg,
    witt_structure_polynomials,
    witt_vector,
)


def W(p, n, q, coords):
    f = make_field(p, {2: 1, 4: 2, 8: 3, 3: 1, 9: 2}.get(q, 1)) if q != p else make_field(p)
    return witt_vector(witt_structure_polynomials(p, n), f, coords)


def test_second_sum_polynomial_p2():
    ctx = witt_structure_polynomials(2, 2)
    assert dict(ctx.sum_polys[1]) == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1, (1, 0, 1, 0): 1}


def test_second_sum_polynomial_p3():
    ctx = witt_structure_polynomials(3, 2)
    assert dict(ctx.sum_polys[1]) == {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1,
                                      (2, 0, 1, 0): 2, (1, 0, 2, 0): 2}


@pytest.mark.parametrize("p", [2, 3, 5])
def test_length_two_closed_forms(p):
    from fractions import Fraction
    from math import comb
    ctx = witt_structure_polynomials(p, 2)
    expected = {(0, 1, 0, 0): 1, (0, 0, 0, 1): 1}
    for i in range(1, p):
        c = Fraction(comb(p - 1, i - 1), i)
        # the correction term enters with a minus sign (ghost components force it)
        expected[(i, 0, p - i, 0)] = (-c.numerator * pow(c.denominator, -1, p)) % p
    assert dict(ctx.sum_polys[1]) == expected
    assert dict(ctx.prod_polys[1]) == {(0, 1, p, 0): 1, (p, 0, 0, 1): 1}


@pytest.mark.parametrize("p", [2, 3, 7])
def test_length_one_is_the_field(p):
    ctx = witt_structure_polynomials(p, 1)
    assert dict(ctx.sum_polys[0]) == {(1, 0): 1, (0, 1): 1}
    assert dict(ctx.prod_polys[0]) == {(1, 1): 1}


def test_small_examples():
    one = W(2, 2, 2, [1, 0])
    assert (one + one).coords == (0, 1)
    assert (W(2, 2, 2, [0, 1]) * W(2, 2, 2, [1, 1])).coords == (0, 1)
    assert witt_neg(one).coords == (1, 1)


def test_artin_schreier_examples():
    ctx = witt_structure_polynomials(2, 2)
    f2 = make_field(2)
    X = all_coordinates(ctx, f2)
    assert np.array_equal(batch_frobenius(ctx, f2, X), X)
    f4 = make_field(2, 2)
    omega = witt_vector(witt_structure_polynomials(2, 1), f4, [2])
    assert artin_schreier(omega).coords == (1,)
    assert artin_schreier(witt_vector(ctx, f4, [1, 0])).is_zero()


def test_length_and_size_bounds():
    with pytest.raises(MalformedInputError):
        witt_structure_polynomials(2, 0)
    with pytest.raises(CapacityError):
        witt_structure_polynomials(2, 9)


# Witt vectors of F_p are the p-adic integers mod p^n
@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_prime_field_witt_ring_is_cyclic(p, n):
    ctx = witt_structure_polynomials(p, n)
    f = make_field(p)
    N = p ** n
    elems = [witt_from_int(ctx, f, k) for k in range(N)]
    index = {e.coords: k for k, e in enumerate(elems)}
    assert len(index) == N
    for a, b in product(range(N), repeat=2):
        assert index[(elems[a] + elems[b]).coords] == (a + b) % N
        assert index[(elems[a] * elems[b]).coords] == (a * b) % N


@pytest.mark.parametrize("p,n,q,m", [(2, 2, 2, 1), (2, 2, 4, 2), (2, 3, 2, 1), (3, 2, 3, 1)])
def test_ring_axioms_exhaustive(p, n, q, m):
    ctx = witt_structure_polynomials(p, n)
    f = make_field(p, m)
    X = all_coordinates(ctx, f)
    N = len(X)
    I, J = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    I, J = I.ravel(), J.ravel()
    code = lambda A: A @ (f.q ** np.arange(n - 1, -1, -1))
    add = code(batch_add(ctx, f, X[I], X[J])).reshape(N, N)
    mul = code(batch_mul(ctx, f, X[I], X[J])).reshape(N, N)
    assert np.array_equal(add, add.T) and np.array_equal(mul, mul.T)
    a = np.arange(N)
    for t in (add, mul):
        lhs = t[t[:, :, None], a[None, None, :]]
        rhs = t[a[:, None, None], t[None, :, :]]
        assert np.array_equal(lhs, rhs)
    assert np.array_equal(mul[a[:, None, None], add[None, :, :]],
                          add[mul[:, :, None], mul[:, None, :]])
    neg = code(batch_neg(ctx, f, X))
    assert np.all(add[a, neg] == 0)
    one = code(np.array([[1] + [0] * (n - 1)]))[0]
    assert np.array_equal(mul[one], a)


@pytest.mark.parametrize("p,q,m,n", [(2, 4, 2, 2), (2, 8, 3, 2), (3, 9, 2, 2), (2, 4, 2, 3)])
def test_frobenius_power_is_identity(p, q, m, n):
    ctx = witt_structure_polynomials(p, n)
    f = make_field(p, m)
    X = all_coordinates(ctx, f)
    Y = X
    for _ in range(m):
        Y = batch_frobenius(ctx, f, Y)
    assert np.array_equal(X, Y)


GRID = [(2, q, m, n) for q, m in ((2, 1), (4, 2), (8, 3)) for n in (1, 2, 3)] + [
    (3, q, m, n) for q, m in ((3, 1), (9, 2)) for n in (1, 2)]


@pytest.mark.parametrize("p,q,m,n", GRID)
def test_cokernel_and_kernel_are_cyclic(p, q, m, n):
    ctx = witt_structure_polynomials(p, n)
    f = make_field(p, m)
    coker, ker = coker_P(ctx, f), ker_P(ctx, f)
    assert coker.invariant_factors == (p ** n,)
    assert ker.invariant_factors == (p ** n,)
    assert len(ker.elements) * len(coker.image) == q ** n


def test_cokernel_small_examples():
    f4 = make_field(2, 2)
    res = coker_P(witt_structure_polynomials(2, 1), f4)
    assert res.invariant_factors == (2,)
    assert sorted(res.image.tolist()) == [0, 1]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_doubling_identity(m):
    ok, bad = doubling_identity_check(make_field(2, m))
    assert ok and bad == []


def test_doubling_examples():
    assert (2 * W(2, 2, 2, [1, 1])).coords == (0, 1)
    f4 = make_field(2, 2)
    x = witt_vector(witt_structure_polynomials(2, 2), f4, [2, 0])
    assert (x + x).coords == (0, f4.mul[2, 2])
    y = witt_vector(witt_structure_polynomials(2, 2), f4, [0, 3])
    assert (y + y).is_zero()


def test_doubling_rejects_odd_characteristic():
    with pytest.raises(MalformedInputError):
        doubling_identity_check(make_field(3))
