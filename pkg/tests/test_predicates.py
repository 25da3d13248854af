import pytest
from hypothesis import given, strategies as st

from promsat.predicates import (
    Predicate,
    SymmetryGroup,
    canonical_form,
    complement_shift,
    enumerate_canonical,
    forced_one_bits,
    format_predicate,
    orbit,
    parse_predicate,
    predicate_from_elements,
    project_zero,
    xor_shift,
)


def pred(*strs):
    return predicate_from_elements(len(strs[0]), [int(s, 2) for s in strs])


def test_string_encoding_is_base_two_msb_first():
    A = pred("011", "100")
    assert A.elements() == [0b011, 0b100]
    assert A.strings() == ["011", "100"]
    assert A.accepts(0b011) and not A.accepts(0b111)


def test_predicate_must_be_nonempty_and_proper():
    with pytest.raises(ValueError):
        Predicate(2, 0)
    with pytest.raises(ValueError):
        Predicate(2, (1 << 4) - 1)


def test_parse_and_format_round_trip():
    A = pred("001", "010", "100")
    assert parse_predicate("001,010,100") == A
    assert parse_predicate(format_predicate(A)) == A
    assert parse_predicate("3:0x16") == A


def test_parse_rejects_bad_input():
    for text in ("", "01,001", "021", "9:0x1"):
        with pytest.raises(ValueError):
            parse_predicate(text)


def test_xor_and_complement_shift():
    A = pred("001", "110")
    assert xor_shift(A, 0b111) == pred("110", "001")
    assert complement_shift(pred("001", "010")) == pred("110", "101")


def test_project_zero():
    A = pred("0001", "0011", "0101", "1000")
    # strings that are zero outside {3,4}: 0001 -> 01, 0011 -> 11
    assert project_zero(A, [3, 4]) == pred("01", "11")
    assert project_zero(A, [2]) is None


def test_forced_one_bits():
    assert forced_one_bits(pred("011", "111")) == {2, 3}
    assert forced_one_bits(pred("001", "010")) == set()


CANONICAL_COUNTS = {
    SymmetryGroup.PERM: {2: 5, 3: 39, 4: 1991},
    SymmetryGroup.PERM_COMPLEMENT: {2: 5, 3: 32, 4: 1549},
    SymmetryGroup.PERM_SHIFT: {2: 4, 3: 20, 4: 400},
}


@pytest.mark.parametrize("group", list(SymmetryGroup))
@pytest.mark.parametrize("k", [2, 3, 4])
def test_canonical_class_counts(group, k):
    count = sum(1 for _ in enumerate_canonical(k, group))
    assert count == CANONICAL_COUNTS[group][k]


masks = st.integers(min_value=1, max_value=(1 << 8) - 2)


def _compatible(mask, group):
    # permutation-based groups act on predicates rejecting the all-zero string
    return group is SymmetryGroup.PERM_SHIFT or mask % 2 == 0


@given(mask=masks, group=st.sampled_from(list(SymmetryGroup)))
def test_canonical_form_is_idempotent_and_minimal(mask, group):
    if not _compatible(mask, group):
        mask &= ~1
        if mask == 0:
            return
    A = Predicate(3, mask)
    c = canonical_form(A, group)
    assert canonical_form(c, group) == c
    orb = orbit(A, group)
    assert c.mask == min(orb)
    assert A.mask in orb


@given(mask=masks, group=st.sampled_from(list(SymmetryGroup)))
def test_orbit_members_share_canonical_form(mask, group):
    if not _compatible(mask, group):
        mask &= ~1
        if mask == 0:
            return
    A = Predicate(3, mask)
    c = canonical_form(A, group)
    for m in orbit(A, group):
        assert canonical_form(Predicate(3, m), group) == c


@given(mask=masks)
def test_perm_shift_orbit_contains_all_shifts(mask):
    A = Predicate(3, mask)
    orb = orbit(A, SymmetryGroup.PERM_SHIFT)
    for b in range(8):
        if not A.accepts(b):
            assert xor_shift(A, b).mask in orb
