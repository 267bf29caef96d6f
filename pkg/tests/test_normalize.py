import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symtwist.errors import MalformedInputError, VerificationError
from symtwist.exactbase import BaseRing, make_field
from symtwist.normalize import (
    CHEVALLEY_FAILURE,
    FPDIM2_LABELS,
    _Run,
    hexagon_identities,
    identify_fpdim2,
    normalize,
    primitive_basis,
    random_pseudotwist,
    scramble,
    symmetrize_by_primitives,
    trivialize_Phi,
    trivialize_R,
)
from symtwist.quasihopf import (
    alpha2,
    alpha2_pair,
    apply_twist,
    category_D,
    check_axioms,
    deformed_D,
    divided_power,
    function_algebra,
    group_algebra,
    jacobson_radical,
)
from symtwist.tensorops import normalized_cochain_basis


def t2(dim, *pairs):
    x = np.zeros((dim, dim, 1), dtype=np.int64)
    for a, b in pairs:
        x[a, b, 0] ^= 1
    return x


def final_form_ok(res):
    D, d = res.final, res.d
    k = D.kernel
    assert np.array_equal(D.phi, k.one(3))
    assert np.array_equal(D.R, (k.one(2) + k.outer(d, d)) % 2)
    prim = (k.apply_delta(d, 0, 1) + k.insert_unit(d, 1, 1) + k.insert_unit(d, 0, 1)) % 2
    assert not prim.any()
    assert not k.mult(d, d).any()
    assert check_axioms(D).ok
    return True


def test_category_d_is_already_normal():
    res = normalize(category_D())
    assert len(res.certificate) == 0
    assert res.final.same_as(category_D())
    assert np.array_equal(res.d, np.array([[0], [1]]))
    assert res.degree == 1


def test_group_algebra_z3_is_tannakian():
    res = normalize(group_algebra(3))
    assert res.d_is_zero and final_form_ok(res)


def test_trivialize_r_on_category_d():
    out = trivialize_R(category_D())
    assert len(out.certificate) == 0
    assert np.array_equal(out.d, np.array([[0], [1]]))


def test_trivialize_r_on_scrambled_fixture():
    H = alpha2_pair()
    S = apply_twist(H, t2(4, (0, 0), (2, 1)))
    out = trivialize_R(S)
    k = out.datum.kernel
    assert np.array_equal(out.datum.R, (k.one(2) + k.outer(out.d, out.d)) % 2)
    filt = jacobson_radical(S)
    deg, lead = filt.leading_part(out.d)
    assert deg == 1
    # leading class of d' is a (basis 1, b, a, ab)
    assert np.array_equal(filt.from_adapted(lead), np.array([[0], [0], [1], [0]]))


def test_trivialize_r_group_algebra_gives_zero():
    D = group_algebra(2)
    rng = np.random.default_rng(3)
    for _ in range(10):
        S, _ = scramble(D, rng)
        assert not trivialize_R(S).d.any()


def test_trivialize_phi_identity_when_phi_trivial():
    out = trivialize_Phi(category_D())
    assert len(out.certificate) == 0


def test_trivialize_phi_divided_power_round_trip():
    D = divided_power(2)
    rng = np.random.default_rng(11)
    S, _ = scramble(D, rng)
    out = trivialize_Phi(S)
    k = out.datum.kernel
    assert np.array_equal(out.datum.phi, k.one(3))
    assert np.array_equal(out.datum.R, k.one(2)) and not out.d.any()


def test_trivialize_phi_category_d_round_trip():
    D = category_D()
    S, _ = scramble(D, np.random.default_rng(5))
    res = normalize(S)
    assert final_form_ok(res)
    assert res.degree == 1 and res.delta[1].any()


FAMILIES = {
    "category_D": category_D,
    "alpha2": alpha2,
    "Z/2": lambda: group_algebra(2),
    "D_2": lambda: divided_power(2),
    "alpha2_pair": alpha2_pair,
}


@pytest.mark.parametrize("name", FAMILIES)
def test_scrambles_reach_final_form_with_stable_delta(name):
    D = FAMILIES[name]()
    reference = normalize(D)
    rng = np.random.default_rng(2024)
    for _ in range(15):
        S, _ = scramble(D, rng)
        res = normalize(S)
        assert final_form_ok(res)
        assert res.certificate.replay(S).same_as(res.final)
        assert res.degree == reference.degree
        assert np.array_equal(res.delta, reference.delta)
    if name in ("alpha2", "Z/2", "D_2"):
        assert reference.d_is_zero


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_normalize_property(seed, normalized):
    D = alpha2_pair()
    S, _ = scramble(D, np.random.default_rng(seed), normalized=normalized)
    res = normalize(S, check_four_cocycle=True)
    assert final_form_ok(res)
    if normalized:
        assert res.certificate.is_twist


def test_both_repair_branches_occur():
    D = alpha2_pair()
    rng = np.random.default_rng(1)
    seen = set()
    for _ in range(30):
        S, _ = scramble(D, rng)
        for e in normalize(S).transcript:
            if "branch" in e:
                seen.add(e["branch"])
    assert seen == {"ell<4p", "ell>=4p"}


def test_unit_repair_recorded_for_pseudotwists():
    D = divided_power(2)
    S, J = scramble(D, np.random.default_rng(9))
    res = normalize(S)
    kinds = [kind for kind, _ in res.certificate.entries]
    assert kinds[0] == "pseudotwist"
    assert {"stage": "units"} in res.transcript


def _first_phi_stage(D, seed):
    """A scrambled datum and its state right before the first Φ step."""
    rng = np.random.default_rng(seed)
    while True:
        S, _ = scramble(D, rng)
        run = _Run(S, jacobson_radical(S))
        run.repair_units()
        d = run.trivialize_R(None)
        rest = (run.D.phi - run.one(3)) % 2
        ell = run.deg(rest)
        if ell is not None:
            return run, d, ell, run.part(rest, ell)


def test_hexagon_identities_need_place_reading():
    D = divided_power(2)
    slot_failures = 0
    for seed in range(8):
        run, d, ell, phi = _first_phi_stage(D, seed)
        dim = run.D.dim
        T = np.zeros((dim, dim, 1), dtype=np.int64)
        delta = np.zeros((dim, 1), dtype=np.int64)
        gk = run.gr_kernel()
        assert not any(r.any() for r in hexagon_identities(gk, phi, T, delta).values())
        slot = hexagon_identities(gk, phi, T, delta, convention="slot")
        slot_failures += any(slot[key].any() for key in ("a", "b"))
    assert slot_failures > 0


def test_symmetrize_by_primitives_agrees_with_direct_solve():
    # pick f non-symmetric with f + f21 in P⊗P; d f must be unchanged
    H = alpha2_pair()
    k = H.kernel
    prims = primitive_basis(k)
    a, b = prims[0], prims[1]
    rng = np.random.default_rng(0)
    basis = normalized_cochain_basis(H, 2)
    for _ in range(20):
        c = rng.integers(0, 2, size=len(basis))
        sym = np.einsum("n,n...->...", c, basis) % 2
        sym = (sym + np.swapaxes(sym, 0, 1) + k.outer(a, a)) % 2
        f = (sym + k.outer(a, b)) % 2
        g = symmetrize_by_primitives(k, f)
        assert np.array_equal(g, np.swapaxes(g, 0, 1))
        assert np.array_equal(k.differential(g, 2), k.differential(f, 2))


def test_symmetrize_rejects_bad_input():
    k = divided_power(2).kernel
    f = t2(4, (1, 2))
    with pytest.raises(VerificationError):
        symmetrize_by_primitives(k, f)


def test_identify_labels():
    labels = [
        identify_fpdim2(function_algebra(2)),
        identify_fpdim2(group_algebra(2)),
        identify_fpdim2(alpha2()),
        identify_fpdim2(category_D()),
    ]
    assert labels == list(FPDIM2_LABELS)
    assert len(set(labels)) == 4


def test_identify_is_twist_invariant():
    rng = np.random.default_rng(8)
    for D in (category_D(), alpha2(), group_algebra(2), function_algebra(2)):
        expected = identify_fpdim2(D)
        for _ in range(5):
            J = random_pseudotwist(D, rng, normalized=True)
            assert identify_fpdim2(apply_twist(D, J)) == expected


def test_identify_needs_dimension_two():
    with pytest.raises(MalformedInputError):
        identify_fpdim2(divided_power(2))


def test_normalize_rejects_non_char2():
    with pytest.raises(MalformedInputError):
        normalize(group_algebra(3, BaseRing(make_field(3), 1)))


def test_normalize_rejects_deformation_ring():
    with pytest.raises(MalformedInputError):
        normalize(deformed_D(2))


def test_normalize_rejects_broken_axioms():
    D = category_D()
    with pytest.raises(VerificationError):
        normalize(D.replace(R=t2(2, (0, 0), (1, 0))))


def test_chevalley_failure_message():
    assert "Chevalley" in CHEVALLEY_FAILURE


def test_certificate_entries_are_invertible():
    D = divided_power(2)
    S, _ = scramble(D, np.random.default_rng(4))
    res = normalize(S)
    for _, J in res.certificate.entries:
        assert S.kernel.is_invertible(J)
