import random
from itertools import product

import pytest

from charvar.sl2 import (CENTRAL_MINUS, CENTRAL_PLUS, NONSPLIT, NONSQUARE,
                         SPLIT, SQUARE, UNIPOTENT_PLUS,
                         FieldElement, GeometricClass, SL2Element,
                         admissible_lambdas, centralizer_order, commutator,
                         enumerate_sl2, geometric_members, group_table,
                         inverse_mod, orbit_size, rational_class_of, w4, W0,
                         W1, W2, W3, W4ANY)


def all_elements(p):
    return list(enumerate_sl2(p))


def det_filter_oracle(p):
    """Independent enumeration: filter all p^4 matrices by determinant."""
    out = []
    for a, b, c, d in product(range(p), repeat=4):
        if (a * d - b * c) % p == 1:
            out.append((a, b, c, d))
    return out


# ---------------------------------------------------------------------------
# field elements


def test_field_element_arithmetic():
    x = FieldElement(3, 7)
    y = FieldElement(5, 7)
    assert (x + y).value == 1
    assert (x * y).value == 1
    assert (x - y).value == 5
    assert (-x).value == 4
    assert y.inverse() * y == FieldElement(1, 7)


def test_field_element_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        FieldElement(0, 7).inverse()
    with pytest.raises(ZeroDivisionError):
        inverse_mod(0, 7)


def test_field_element_rejects_bad_modulus():
    for bad in (1, 2, 4, 9):
        with pytest.raises(ValueError):
            FieldElement(1, bad)


def test_field_element_mixed_moduli():
    with pytest.raises(ValueError):
        FieldElement(1, 5) + FieldElement(1, 7)


# ---------------------------------------------------------------------------
# enumeration


@pytest.mark.parametrize("p", [3, 5, 7])
def test_enumeration_matches_det_filter_oracle(p):
    ours = [m.entries() for m in enumerate_sl2(p)]
    oracle = det_filter_oracle(p)
    assert len(ours) == p ** 3 - p
    assert sorted(ours) == sorted(oracle)
    assert len(set(ours)) == len(ours)


def test_enumeration_sizes():
    assert len(all_elements(3)) == 24
    assert len(all_elements(5)) == 120


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_enumeration_contains_identity(p):
    assert any(m.is_identity() for m in enumerate_sl2(p))


def test_enumeration_rejects_bad_input():
    for bad in (2, 4, 1, 9, 15):
        with pytest.raises(ValueError):
            list(enumerate_sl2(bad))
    with pytest.raises(ValueError):
        list(enumerate_sl2(103, max_prime=101))


def test_enumeration_deterministic_order():
    assert [m.entries() for m in enumerate_sl2(5)] == \
        [m.entries() for m in enumerate_sl2(5)]


def test_sl2_element_validates_determinant():
    with pytest.raises(ValueError):
        SL2Element(1, 1, 1, 1, 5)


# ---------------------------------------------------------------------------
# commutator


def test_commutator_with_identity_and_self():
    p = 7
    for b in list(enumerate_sl2(p))[:40]:
        assert commutator(SL2Element.identity(p), b).is_identity()
        assert commutator(b, b).is_identity()


def test_commutator_against_direct_product_oracle():
    p = 5
    a = SL2Element(1, 1, 0, 1, p)
    b = SL2Element(1, 0, 1, 1, p)

    def mat_mul(x, y):
        return ((x[0] * y[0] + x[1] * y[2]) % p, (x[0] * y[1] + x[1] * y[3]) % p,
                (x[2] * y[0] + x[3] * y[2]) % p, (x[2] * y[1] + x[3] * y[3]) % p)

    ainv = (1, -1 % p, 0, 1)
    binv = (1, 0, -1 % p, 1)
    expected = mat_mul(mat_mul(a.entries(), b.entries()), mat_mul(ainv, binv))
    assert commutator(a, b).entries() == expected


def test_commutator_rejects_mixed_moduli():
    with pytest.raises(ValueError):
        commutator(SL2Element.identity(5), SL2Element.identity(7))


# ---------------------------------------------------------------------------
# rational classes


def test_central_labels():
    assert rational_class_of(SL2Element.minus_identity(5)).kind == CENTRAL_MINUS
    assert rational_class_of(SL2Element.identity(5)).kind == CENTRAL_PLUS


def test_jplus_label_at_5():
    label = rational_class_of(SL2Element.jplus(5))
    assert label == (UNIPOTENT_PLUS, SQUARE)


def test_offdiagonal_two_is_other_unipotent_class_at_5():
    m = SL2Element(1, 2, 0, 1, 5)
    label = rational_class_of(m)
    assert label == (UNIPOTENT_PLUS, NONSQUARE)
    # exhaustive conjugacy search: not conjugate to J+
    jplus = SL2Element.jplus(5)
    conjugates = {jplus.conjugated_by(g).entries() for g in enumerate_sl2(5)}
    assert m.entries() not in conjugates
    assert len(conjugates) == orbit_size(jplus)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_number_of_realized_labels_is_p_plus_4(p):
    labels = {rational_class_of(m) for m in enumerate_sl2(p)}
    assert len(labels) == p + 4


@pytest.mark.parametrize("p", [5, 7, 11])
def test_label_is_conjugation_invariant(p):
    rng = random.Random(p)
    elements = all_elements(p)
    for _ in range(1000):
        m = rng.choice(elements)
        g = rng.choice(elements)
        assert rational_class_of(m.conjugated_by(g)) == rational_class_of(m)


@pytest.mark.parametrize("p", [5, 7])
def test_unipotent_details_match_exhaustive_conjugacy_oracle(p):
    """The square-class flag separates trace ±2 non-central elements exactly
    as SL2-conjugacy does."""
    table = group_table(p)
    group = all_elements(p)
    for trace_sign in (2, p - 2):
        members = [m for m in group
                   if m.trace() == trace_sign
                   and not (m.is_identity() or m.is_minus_identity())]
        by_label = {}
        for m in members:
            by_label.setdefault(rational_class_of(m), set()).add(m.entries())
        assert len(by_label) == 2
        # brute orbits
        seed = members[0]
        orbit1 = {seed.conjugated_by(g).entries() for g in group}
        rest = {m.entries() for m in members} - orbit1
        assert {frozenset(v) for v in by_label.values()} == \
            {frozenset(orbit1), frozenset(rest)}
    del table


# ---------------------------------------------------------------------------
# centralizers


def test_centralizer_examples():
    p = 5
    assert centralizer_order(SL2Element.identity(p)) == 120
    assert centralizer_order(SL2Element.jplus(p)) == 10
    assert centralizer_order(SL2Element.diagonal(2, p)) == 4


@pytest.mark.parametrize("p", [5, 7])
def test_centralizer_matches_brute_count_per_class(p):
    group = all_elements(p)
    seen = set()
    for m in group:
        label = rational_class_of(m)
        if label in seen:
            continue
        seen.add(label)
        brute = sum(1 for g in group if g * m == m * g)
        assert centralizer_order(m) == brute, (label, brute)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_orbit_partition(p):
    n = p ** 3 - p
    total = 0
    counted = set()
    for m in enumerate_sl2(p):
        label = rational_class_of(m)
        if label in counted:
            continue
        counted.add(label)
        assert n % centralizer_order(m) == 0
        total += orbit_size(m)
    assert total == n


# ---------------------------------------------------------------------------
# geometric classes


def test_w0_members():
    for p in (5, 7):
        members = geometric_members(p, W0)
        assert members == [SL2Element.identity(p)]


def test_w2_members_at_5():
    members = geometric_members(5, W2)
    assert len(members) == 24
    assert all(m.trace() == 2 and not m.is_identity() for m in members)


def test_w4_members_at_5():
    members = geometric_members(5, w4(2))
    assert len(members) == 30
    assert all(m.trace() == 0 for m in members)  # 2 + 2^{-1} = 0 mod 5


@pytest.mark.parametrize("p", [5, 7, 11])
def test_geometric_cardinalities(p):
    assert len(geometric_members(p, W1)) == 1
    assert len(geometric_members(p, W2)) == p * p - 1
    assert len(geometric_members(p, W3)) == p * p - 1
    assert len(geometric_members(p, w4(2))) == p * p + p
    assert len(geometric_members(p, W4ANY)) == p ** 3 - 2 * p ** 2 - p


def test_w4_rejects_degenerate_lambda():
    for lam in (0, 1, -1, 4):   # 4 = -1 mod 5
        with pytest.raises(ValueError):
            geometric_members(5, w4(lam))
    with pytest.raises(ValueError):
        geometric_members(3, w4(2))   # 2 = -1 mod 3


def test_w4_lambda_inverse_same_point_set():
    a = [m.entries() for m in geometric_members(7, w4(2))]
    b = [m.entries() for m in geometric_members(7, w4(4))]   # 4 = 2^{-1} mod 7
    assert a == b


def test_geometric_class_validation():
    with pytest.raises(ValueError):
        GeometricClass("W5")
    with pytest.raises(ValueError):
        GeometricClass("W4")          # missing parameter
    with pytest.raises(ValueError):
        GeometricClass("W2", lam=2)   # spurious parameter


@pytest.mark.parametrize("p", [5, 7])
def test_w2_splits_into_two_unipotent_labels(p):
    labels = {rational_class_of(m) for m in geometric_members(p, W2)}
    assert labels == {(UNIPOTENT_PLUS, SQUARE), (UNIPOTENT_PLUS, NONSQUARE)}


@pytest.mark.parametrize("p", [5, 7])
def test_w4_members_form_one_split_label(p):
    lam = 2
    labels = {rational_class_of(m) for m in geometric_members(p, w4(lam))}
    t = (lam + inverse_mod(lam, p)) % p
    assert labels == {(SPLIT, t)}


def test_admissible_lambdas():
    assert admissible_lambdas(5) == [2]          # {2, 3} is one inverse pair
    assert set(admissible_lambdas(7)) == {2, 3}  # pairs {2,4} and {3,5}
    assert admissible_lambdas(3) == []


# ---------------------------------------------------------------------------
# vectorized tables agree with the scalar path


@pytest.mark.parametrize("p", [5, 7])
def test_group_table_label_codes_agree_with_scalar_labels(p):
    table = group_table(p)
    for row in range(table.n):
        m = table.element(row)
        assert table.label_of_code(int(table.codes[row])) == rational_class_of(m)


def test_group_table_centralizers(p=5):
    table = group_table(p)
    for row in (0, 10, 50, 100):
        m = table.element(row)
        assert int(table.centralizers[row]) == centralizer_order(m)


def test_nonsplit_labels_exist():
    # trace 1 and 4 at p=5 have irreducible characteristic polynomial
    labels = {rational_class_of(m) for m in enumerate_sl2(5)}
    assert (NONSPLIT, 1) in labels and (NONSPLIT, 4) in labels
