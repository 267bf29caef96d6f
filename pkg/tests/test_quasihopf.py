import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtwist.errors import MalformedInputError, NotInvertibleError
from symtwist.exactbase import BaseRing, make_field
from symtwist.normalize import random_pseudotwist
from symtwist.quasihopf import (
    TwistCertificate,
    alpha2,
    alpha2_pair,
    apply_twist,
    category_D,
    check_axioms,
    coboundary_twist,
    constructors,
    deformed_D,
    divided_power,
    function_algebra,
    group_algebra,
    jacobson_radical,
    matrix_inverse,
    pentagon_residual,
    primitives,
)


def t2(dim, *pairs):
    x = np.zeros((dim, dim, 1), dtype=np.int64)
    for a, b in pairs:
        x[a, b, 0] ^= 1
    return x


def el(dim, *idx):
    x = np.zeros((dim, 1), dtype=np.int64)
    for a in idx:
        x[a, 0] ^= 1
    return x


ALL = [
    category_D, alpha2, lambda: group_algebra(2), lambda: group_algebra(3),
    lambda: group_algebra((2, 2)), lambda: group_algebra(4), lambda: function_algebra(2),
    lambda: function_algebra((2, 2)), lambda: divided_power(1), lambda: divided_power(2),
    lambda: divided_power(3), alpha2_pair, lambda: deformed_D(2),
]


@pytest.mark.parametrize("make", ALL)
def test_constructors_satisfy_axioms(make):
    rep = check_axioms(make())
    assert rep.ok, rep.failing


def test_category_d_shape():
    D = category_D()
    assert D.dim == 2
    assert np.array_equal(D.R, t2(2, (0, 0), (1, 1)))
    assert np.array_equal(D.delta[1], t2(2, (1, 0), (0, 1)))
    assert np.array_equal(D.phi, D.kernel.one(3))
    assert np.array_equal(alpha2().R, D.kernel.one(2))


def test_constructors_dispatch():
    assert constructors("divided_power", 2).dim == 4
    with pytest.raises(MalformedInputError):
        constructors("nonsense")


def test_deformed_d_pentagon_residual():
    D3 = deformed_D(3)
    res = pentagon_residual(D3)
    h2 = D3.ring.h()
    h2 = D3.ring.mul(h2, h2)
    expected = np.zeros_like(res)
    expected[1, 1, 1, 1] = h2
    assert np.array_equal(res, expected)
    assert not pentagon_residual(deformed_D(2)).any()


def test_deformed_d_other_axioms_hold_at_h3():
    failing = set(check_axioms(deformed_D(3)).failing)
    assert "pentagon" in failing


def test_radical_examples():
    F = jacobson_radical(group_algebra(2))
    assert F.radical.tolist() == [[1, 1]] and F.nilpotency_index == 2
    assert len(jacobson_radical(group_algebra(3)).radical) == 0
    F = jacobson_radical(divided_power(2))
    rad = {tuple(r) for r in F.radical}
    assert len(rad) == 3 and all(r[0] == 0 for r in rad)
    # y(1)y(2) = y(3) and y(1)^2 = 0, so Rad/Rad^2 is spanned by y(1), y(2)
    assert F.gr_dims == (1, 2, 1)
    assert F.nilpotency_index == 3


def test_radical_over_deformation_ring():
    F = jacobson_radical(deformed_D(2))
    assert F.gr_dims == (1, 1)


def test_primitives_examples():
    P = primitives(alpha2())
    assert len(P) == 1 and np.array_equal(P[0], el(2, 1))
    assert len(primitives(group_algebra(2))) == 0
    assert len(primitives(alpha2_pair())) == 2


def test_leading_part_of_d():
    D = category_D()
    F = jacobson_radical(D)
    deg, lead = F.leading_part(el(2, 1))
    assert deg == 1
    assert np.array_equal(F.from_adapted(lead), el(2, 1))


def test_twist_by_one_is_identity():
    for make in ALL[:6]:
        D = make()
        assert apply_twist(D, D.kernel.one(2)).same_as(D)


def test_symmetric_twist_keeps_r():
    D = category_D()
    J = t2(2, (0, 0), (1, 1))
    assert np.array_equal(apply_twist(D, J).R, D.R)


def test_scrambling_fixture():
    # basis 1, b, a, ab
    H = alpha2_pair()
    J = t2(4, (0, 0), (2, 1))
    assert np.array_equal(H.kernel.inv(J), J)
    R = apply_twist(H, J).R
    assert np.array_equal(R, t2(4, (0, 0), (2, 2), (2, 1), (1, 2), (3, 3)))


def test_coboundary_twist_examples():
    D = category_D()
    assert np.array_equal(coboundary_twist(D, D.unit), D.kernel.one(2))
    J = coboundary_twist(D, el(2, 0, 1))
    assert np.array_equal(apply_twist(D, J).R, t2(2, (0, 0), (1, 1)))
    H = alpha2_pair()
    J = coboundary_twist(H, el(4, 0, 3))
    T = apply_twist(H, J)
    assert np.array_equal(T.delta[2], H.delta[2])
    cert = TwistCertificate()
    cert.add(J, "twist")
    assert cert.replay(H).same_as(T) and cert.is_twist


def test_coboundary_twist_needs_counit_one():
    with pytest.raises(MalformedInputError):
        coboundary_twist(category_D(), el(2, 1))


def test_non_invertible_twist_rejected():
    with pytest.raises(NotInvertibleError):
        apply_twist(category_D(), t2(2, (1, 1)))


FAMILIES = [category_D, alpha2_pair, lambda: divided_power(2), lambda: group_algebra((2, 2))]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_twisting_preserves_axioms(fam, seed):
    D = FAMILIES[fam]()
    J = random_pseudotwist(D, np.random.default_rng(seed))
    rep = check_axioms(apply_twist(D, J))
    assert rep.ok, rep.failing


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3), st.integers(0, 2 ** 32 - 1))
def test_twists_compose(fam, seed):
    D = FAMILIES[fam]()
    rng = np.random.default_rng(seed)
    J1 = random_pseudotwist(D, rng)
    J2 = random_pseudotwist(D, rng)
    step = apply_twist(apply_twist(D, J1), J2)
    assert step.same_as(apply_twist(D, D.kernel.mult(J2, J1)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_twisting_back_recovers_datum(seed):
    D = alpha2_pair()
    J = random_pseudotwist(D, np.random.default_rng(seed))
    back = apply_twist(apply_twist(D, J), D.kernel.inv(J))
    assert back.same_as(D)


def test_change_basis_round_trip():
    D = divided_power(2)
    P = np.array([[1, 0, 0, 0], [1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1]])
    E = D.change_basis(P)
    assert check_axioms(E).ok
    Q = D.ring.codes(matrix_inverse(D.ring, D.ring.from_codes(P)))
    assert E.change_basis(Q).same_as(D.replace(basis_names=[f"b{i}" for i in range(4)]))


def test_group_algebra_over_f4():
    D = group_algebra(2, BaseRing(make_field(2, 2), 1))
    assert check_axioms(D).ok
