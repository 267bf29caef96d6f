import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtwist.abcoh import (
    AbelianPGroup,
    GroupPresentation,
    class_order,
    dual_group,
    h2_inv_formula,
    hom_count_bruteforce,
    hom_group,
    is_twist,
    sweedler_bruteforce,
    sweedler_dims_formula,
    torsor_decompose,
    twist_classes_bruteforce,
    twisted_dual_algebra,
)
from symtwist.errors import MalformedInputError
from symtwist.exactbase import make_field

F2 = make_field(2)
F4 = make_field(2, 2)
F3 = make_field(3)


def grp(*orders, p=2):
    return AbelianPGroup.from_orders(p, orders)


def gp(*factors):
    return GroupPresentation(tuple(factors))


def test_dual_group_examples():
    assert dual_group(grp(4), 2).moduli == (4,)
    assert sorted(dual_group(grp(2, 4), 2).moduli) == [2, 4]
    assert dual_group(grp(), 3).order == 1


def test_dual_group_needs_enough_torsion():
    with pytest.raises(MalformedInputError):
        dual_group(grp(8), 2)


def test_hom_group_examples():
    assert hom_group(grp(4), gp(4)) == gp(4)
    assert hom_group(grp(2, 4), gp(4)) == gp(2, 4)
    assert hom_group(grp(2, 4), gp()) == gp()


def test_hom_rule_matches_counting():
    for a, b in [((2, 4), (4,)), ((2,), (4,)), ((4,), (2, 2)), ((2, 2), (2, 4))]:
        rule = hom_group(grp(*a), grp(*b))
        assert rule.order == hom_count_bruteforce(grp(*a), grp(*b))
    assert hom_count_bruteforce(grp(2, 4), grp(4)) == 8


def test_hom_group_rejects_mixed_primes():
    with pytest.raises(MalformedInputError):
        hom_group(grp(2), grp(3, p=3))


def test_h2_inv_formula_examples():
    assert h2_inv_formula(grp(4), F2) == gp(4)
    assert h2_inv_formula(grp(), F2) == gp()
    assert h2_inv_formula(grp(2, 4), F4) == gp(2, 4)


def test_h2_inv_formula_independent_of_witt_length():
    # any n >= r1 gives the same answer
    for n in (2, 3):
        assert h2_inv_formula(grp(4), F2, n=n) == gp(4)
    assert h2_inv_formula(grp(2), F2, n=2) == gp(2)


def test_h2_inv_formula_char_mismatch():
    with pytest.raises(MalformedInputError):
        h2_inv_formula(grp(2), F3)


@pytest.mark.parametrize("orders,field", [((2,), F2), ((2,), F4), ((4,), F2), ((2, 2), F2)])
def test_formula_matches_bruteforce(orders, field):
    A = grp(*orders)
    brute = twist_classes_bruteforce(A, field)
    formula = h2_inv_formula(A, field)
    assert brute.count == formula.order
    assert brute.group == formula


def test_bruteforce_trivial_group():
    assert twist_classes_bruteforce(grp(), F2).count == 1


def test_class_count_stable_under_extension():
    assert twist_classes_bruteforce(grp(2), F2).count == twist_classes_bruteforce(grp(2), F4).count == 2


def test_sweedler_formula_examples():
    assert sweedler_dims_formula(grp(2), F2, 4) == [gp(2), gp(2), gp(), gp()]
    assert sweedler_dims_formula(grp(4), F4, 3) == [gp(4), gp(4), gp()]
    assert sweedler_dims_formula(grp(), F2, 3) == [gp(), gp(), gp()]


def test_sweedler_bruteforce_z2():
    got = [sweedler_bruteforce(grp(2), F2, k).group for k in (1, 2, 3, 4)]
    assert got == sweedler_dims_formula(grp(2), F2, 4)


def test_representatives_are_twists_and_unit_first():
    A = grp(4)
    classes = twist_classes_bruteforce(A, F2)
    for J in classes.representatives:
        assert is_twist(A, F2, J)
    unit = np.zeros((4, 4), dtype=np.int64)
    unit[0, 0] = 1
    assert np.array_equal(classes.representatives[0], unit)


def test_torsor_degrees():
    c2 = twist_classes_bruteforce(grp(2), F2)
    assert torsor_decompose(grp(2), F2, c2.representatives[0]) == [1, 1]
    assert torsor_decompose(grp(2), F2, c2.representatives[1]) == [2]
    c4 = twist_classes_bruteforce(grp(4), F2)
    order4 = [J for J in c4.representatives if class_order(grp(4), F2, J, c4) == 4]
    assert order4
    for J in order4:
        assert torsor_decompose(grp(4), F2, J) == [4]


def test_nontrivial_z2_torsor_is_a_field():
    A = grp(2)
    J = twist_classes_bruteforce(A, F2).representatives[1]
    M, unit = twisted_dual_algebra(A, F2, J)
    # commutative 2-dim algebra; no idempotent besides 0 and 1
    elems = [np.array(v) for v in ((0, 0), (1, 0), (0, 1), (1, 1))]

    def mul(x, y):
        return np.einsum("i,j,ijk->k", x, y, M) % 2

    for x in elems:
        for y in elems:
            assert np.array_equal(mul(x, y), mul(y, x))
    idem = [tuple(x) for x in elems if np.array_equal(mul(x, x), x)]
    assert sorted(idem) == sorted([(0, 0), tuple(np.asarray(unit) % 2)])


def test_torsor_rejects_non_twist():
    bad = np.zeros((2, 2), dtype=np.int64)
    bad[1, 1] = 1
    with pytest.raises(MalformedInputError):
        torsor_decompose(grp(2), F2, bad)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from([2, 4, 8]), max_size=3), st.lists(st.sampled_from([2, 4, 8]), max_size=2))
def test_hom_order_symmetric(a, b):
    # |Hom(A, B)| = |Hom(B, A)| for finite abelian groups
    assert hom_group(grp(*a), grp(*b)).order == hom_group(grp(*b), grp(*a)).order
