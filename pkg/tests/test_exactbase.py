import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtwist.errors import CapacityError, MalformedInputError, NotInvertibleError
from symtwist.exactbase import BaseRing, ExactMatrix, make_field, prime_ring, ring_ops, solve_linear
from symtwist.tensorops import ring_einsum

SMALL_FIELDS = [(2, 1), (2, 2), (2, 3), (2, 4), (2, 6), (3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 2)]


def test_prime_field_from_linear_modulus():
    f = make_field(2, 1, [1])
    assert f.q == 2 and f.mul[1, 1] == 1


def test_f4_omega_squared():
    f = make_field(2, 2, [1, 1, 1])
    omega = f.from_coeffs([0, 1])
    assert f.mul[omega, omega] == f.from_coeffs([1, 1])


def test_reducible_modulus_is_rejected():
    with pytest.raises(MalformedInputError, match=r"reducible: \(t\+1\)²"):
        make_field(2, 2, [1, 0, 1])


@pytest.mark.parametrize("p,m", [(4, 1), (2, 0)])
def test_bad_parameters(p, m):
    with pytest.raises(MalformedInputError):
        make_field(p, m)


def test_field_size_bound():
    with pytest.raises(CapacityError):
        make_field(2, 20)


def test_ring_ops_examples():
    F4 = BaseRing(make_field(2, 2, [1, 1, 1]))
    omega = F4.from_code(2)
    assert F4.code(ring_ops(F4, "inv", omega)) == 3
    assert F4.code(ring_ops(F4, "frobenius", omega)) == F4.code(F4.mul(omega, omega)) == 3
    R = BaseRing(make_field(2), 3)
    inv = ring_ops(R, "inv", R.add(R.one(), R.h()))
    assert R.format(inv) == "1+h+h^2"
    assert not R.pow(R.h(), 3).any()


def test_non_unit_inverse_raises():
    R = BaseRing(make_field(2), 2)
    with pytest.raises(NotInvertibleError):
        R.inv(R.h())


@pytest.mark.parametrize("p,m,h", [(2, 1, 3), (2, 2, 2), (3, 1, 2)])
def test_units_are_exactly_nonzero_constant_term(p, m, h):
    R = BaseRing(make_field(p, m), h)
    for e in R.elements():
        head = R.to_field_codes(e)[0]
        assert R.is_unit(e) == (head != 0)
        if head:
            assert np.array_equal(R.mul(e, R.inv(e)), R.one())


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_field_axioms_exhaustive(p, m):
    f = make_field(p, m)
    q = f.q
    A, M = f.add, f.mul
    a = np.arange(q)
    assert np.array_equal(A, A.T) and np.array_equal(M, M.T)
    assert np.array_equal(A[A[:, :, None], a[None, None, :]], A[a[:, None, None], A[None, :, :]])
    assert np.array_equal(M[M[:, :, None], a[None, None, :]], M[a[:, None, None], M[None, :, :]])
    lhs = M[a[:, None, None], A[None, :, :]]
    rhs = A[M[:, :, None], M[:, None, :]]
    assert np.array_equal(lhs, rhs)
    assert np.all(A[a, f.neg[a]] == 0)
    assert np.all(M[a[1:], f.inv[a[1:]]] == 1)
    assert f.power(int(a[-1]), q - 1) == 1


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_frobenius_is_ring_homomorphism(p, m):
    f = make_field(p, m)
    F = f.frob
    assert np.array_equal(F[f.add], f.add[F[:, None], F[None, :]])
    assert np.array_equal(F[f.mul], f.mul[F[:, None], F[None, :]])
    assert np.array_equal(f.sqrt(F), np.arange(f.q))


def test_solve_linear_examples():
    F2 = prime_ring(2)
    eye = F2.from_codes(np.eye(3, dtype=np.int64))
    b = F2.from_codes(np.array([1, 0, 1]))
    sol = solve_linear(F2, eye, b)
    assert np.array_equal(sol.solution, b) and len(sol.nullspace) == 0
    zero = np.zeros((2, 2, 1), dtype=np.int64)
    assert len(solve_linear(F2, zero, np.zeros((2, 1), dtype=np.int64)).nullspace) == 2
    ones = F2.from_codes(np.ones((2, 2), dtype=np.int64))
    assert solve_linear(F2, ones, F2.from_codes(np.array([1, 0]))) is None


RINGS = [prime_ring(2), BaseRing(make_field(2, 2)), prime_ring(3), BaseRing(make_field(2), 2),
         BaseRing(make_field(3), 2)]


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_solve_linear_random_systems(ring):
    rng = np.random.default_rng(ring.order)
    for _ in range(1000):
        rows, cols = rng.integers(1, 6, size=2)
        M = ring.from_codes(rng.integers(0, ring.order, size=(rows, cols)))
        x = ring.from_codes(rng.integers(0, ring.order, size=cols))
        b = ring_einsum(ring, "rc,c->r", M, x)
        sol = solve_linear(ring, M, b)
        assert sol is not None
        assert np.array_equal(ring_einsum(ring, "rc,c->r", M, sol.solution), b)
        for v in sol.nullspace:
            assert not ring_einsum(ring, "rc,c->r", M, v).any()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 3), min_size=4, max_size=4), min_size=1, max_size=5))
def test_exact_matrix_nullspace_dimension(rows):
    F4 = BaseRing(make_field(2, 2))
    A = ExactMatrix.from_codes(F4, np.array(rows))
    assert A.rank() + len(A.nullspace()) == A.cols
